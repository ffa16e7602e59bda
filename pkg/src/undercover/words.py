"""Word pairs and their human-written reference definitions.

Each pair carries one definition sentence per word; the definitions feed the
soundness metric and the desk prover, and can be edited freely in config files.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidConfig


@dataclass(frozen=True)
class WordPair:
    citizen_word: str
    spy_word: str
    citizen_reference: str
    spy_reference: str

    def __post_init__(self) -> None:
        if self.citizen_word == self.spy_word:
            raise InvalidConfig("citizen and spy words must differ")
        if not self.citizen_reference.strip() or not self.spy_reference.strip():
            raise InvalidConfig("both reference sentences must be non-empty")

    def word_for(self, is_spy: bool) -> str:
        return self.spy_word if is_spy else self.citizen_word

    def reference_for(self, word: str) -> str:
        if word == self.citizen_word:
            return self.citizen_reference
        if word == self.spy_word:
            return self.spy_reference
        raise KeyError(f"word {word!r} is not part of this pair")

    def to_dict(self) -> dict:
        return {
            "citizen_word": self.citizen_word,
            "spy_word": self.spy_word,
            "citizen_reference": self.citizen_reference,
            "spy_reference": self.spy_reference,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WordPair":
        return cls(
            citizen_word=data["citizen_word"],
            spy_word=data["spy_word"],
            citizen_reference=data["citizen_reference"],
            spy_reference=data["spy_reference"],
        )


# Stock pair list. First word of each pair is dealt to citizens, second to the
# spy; swap them in config to flip the deal.
DEFAULT_WORD_PAIRS: tuple[WordPair, ...] = (
    WordPair(
        "Lip balm", "Lip cream",
        "A waxy stick applied to the lips to soothe them and prevent chapping.",
        "A soft moisturising cream for the lips, applied from a small tub or tube.",
    ),
    WordPair(
        "Imagination", "Imaginary",
        "The mental faculty of forming new ideas and images of things not present to the senses.",
        "Existing only in the mind rather than in the real world.",
    ),
    WordPair(
        "Cherry Blossom", "Peach Blossom",
        "The pink flower of the cherry tree, celebrated in spring viewing festivals in Japan.",
        "The pink flower of the peach tree, one of the earliest blooms of spring.",
    ),
    WordPair(
        "Ophiophagus", "Naja",
        "The king cobra, a venomous snake genus whose diet consists mainly of other snakes.",
        "The genus of true cobras, venomous snakes that spread a hood when threatened.",
    ),
    WordPair(
        "Earl Grey Tea", "Ceylon Tea",
        "A black tea flavoured with oil of bergamot and named after a British nobleman.",
        "A black tea grown on the island formerly known as Ceylon, now Sri Lanka.",
    ),
    WordPair(
        "Sweet Orange", "Navel Orange",
        "The common cultivated orange, a sweet citrus fruit eaten fresh or pressed for juice.",
        "A seedless sweet orange bearing a small secondary fruit at its apex that resembles a navel.",
    ),
    WordPair(
        "Ethics", "Morality",
        "The branch of philosophy that studies the principles of right and wrong conduct.",
        "The standards of behaviour by which a society distinguishes right from wrong.",
    ),
    WordPair(
        "Impatiens hawkeri", "Impatiens walleriana",
        "The New Guinea impatiens, a bedding plant with large showy flowers and dark foliage.",
        "The busy Lizzie, a shade-loving bedding plant that carries abundant small flowers.",
    ),
    WordPair(
        "Filistatidae", "Hypochilidae",
        "A family of cribellate crevice weaver spiders that build silk-lined tube retreats in walls.",
        "A family of lampshade weaver spiders that spin lampshade-shaped webs beneath rock overhangs.",
    ),
    WordPair(
        "Saussurella", "Tettigidea",
        "A genus of pygmy grasshoppers from Southeast Asia with a sharply pointed pronotum.",
        "A genus of groundhopper insects from the Americas in the pygmy grasshopper family.",
    ),
)
