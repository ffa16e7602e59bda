from __future__ import annotations

import pytest

from undercover.backends import QueueBackend
from undercover.prover import MockProver
from undercover.similarity import MockEmbedder
from undercover.words import DEFAULT_WORD_PAIRS, WordPair

TEA_PAIR = next(p for p in DEFAULT_WORD_PAIRS if p.citizen_word == "Earl Grey Tea")

# Single-round golden game: five role-hypothesizing citizens and one plain
# spy at seat 6; base_seed 1 seats the spy there through the seed derivation.
GOLDEN_BASE_SEED = 1

GOLDEN_DESCRIBE_REPLIES = {
    1: (
        "Intention Selection: Since this is the first round and there are no other "
        "players' descriptions, I cannot deduce if I am the spy or not.\n"
        "Conclusion Inference: I will describe my word card as accurately as "
        "possible, while being careful not to reveal too much information.\n"
        "Description:A type of tea known for its distinct flavor and named after "
        "a British nobleman."
    ),
    2: (
        "Intention Selection: Player 1's description could potentially deduce my "
        "word card, as it describes a type of tea. However, it does not "
        "specifically mention Earl Grey Tea.\n"
        "Conclusion Inference: Since I am not certain if I am the spy or not, I "
        "will describe my word card in a way that aligns with Player 1's "
        "description, but does not explicitly reveal my word.\n"
        "Description:A type of tea that is often enjoyed with a slice of lemon "
        "and named after a British nobleman."
    ),
    3: (
        "Intention Selection: Both Player 1 and Player 2 have described their "
        "word as a type of tea named after a British nobleman. This aligns with "
        "my word card, Earl Grey Tea. Therefore, I am not the spy.\n"
        "Conclusion Inference: Since I am not the spy, I will describe my word "
        "card in a way that aligns with the other players' descriptions, while "
        "ensuring it is unique.\n"
        "Description:A type of tea that is often served with milk and sugar and "
        "named after a British nobleman."
    ),
    4: (
        "Intention Selection: All descriptions provided by the other players "
        "seem to be describing a type of tea named after a British nobleman. "
        "This aligns with my word card, Earl Grey Tea. Therefore, I am likely "
        "not the spy.\n"
        "Conclusion Inference: Since I am not the spy, I will describe my word "
        "card in a way that aligns with the other players' descriptions, while "
        "ensuring my description is unique.\n"
        "Description:A type of tea that is often enjoyed in the afternoon and "
        "named after a British nobleman."
    ),
    5: (
        "Intention Selection: All descriptions provided by the other players "
        "seem to be describing a type of tea named after a British nobleman. "
        "This aligns with my word card, Earl Grey Tea. Therefore, I am likely "
        "not the spy.\n"
        "Conclusion Inference: Since I am not the spy, I will describe my word "
        "card accurately and in a way that fits with the other players' "
        "descriptions.\n"
        "Description:A type of tea that is often enjoyed with a splash of milk "
        "and named after a British nobleman."
    ),
    6: (
        "A type of tea that originates from the island formerly known as "
        "Ceylon, now Sri Lanka."
    ),
}

GOLDEN_VOTE_REPLIES = {
    1: (
        "Intention Selection: All the other players' descriptions seem to align "
        "with my word card, I am not the spy.\n"
        "Conclusion Inference: Player 6's description does not mention a British "
        "nobleman, which is a key characteristic of Earl Grey Tea.\n"
        "Vote:I will vote for player 6."
    ),
    2: (
        "Intention Selection: The majority of the descriptions align with my "
        "word card, Earl Grey Tea. However, Player 6's description does not "
        "match the others, as it mentions the origin of the tea rather than its "
        "association with a British nobleman.\n"
        "Conclusion Inference: Since I am not the spy, I will vote for Player 6 "
        "as the spy, as their description does not align with the majority of "
        "the descriptions.\n"
        "Vote:I will vote for player 6."
    ),
    3: (
        "Intention Selection: All the other players' descriptions align with my "
        "word card, Earl Grey Tea, I am not the spy.\n"
        "Conclusion Inference: Player 6's description mentions the origin of "
        "the tea, which does not align with my word card. Therefore, Player 6 "
        "is likely the spy.\n"
        "Vote:I will vote for player 6."
    ),
    4: (
        "Intention Selection: All descriptions provided by the other players "
        "seem to be describing a type of tea named after a British nobleman, "
        "except for Player 6's description. This aligns with my word card, Earl "
        "Grey Tea. Therefore, I am likely not the spy, and Player 6 is the most "
        "suspicious.\n"
        "Conclusion Inference: I will vote for Player 6 as the spy, as their "
        "description does not align with the majority of the other players' "
        "descriptions.\n"
        "Vote:I will vote for player 6."
    ),
    5: (
        "Intention Selection: All descriptions provided by the other players "
        "seem to be describing a type of tea. However, Player 6's description "
        "does not align with the others, as it does not mention a British "
        "nobleman. Therefore, Player 6 is likely the spy.\n"
        "Conclusion Inference: Since I am not the spy, I will vote for Player 6 "
        "as the spy.\n"
        "Vote:I will vote for player 6."
    ),
    6: "I will vote for Player 5.",
}


class FixtureRuntime:
    """Queue-backed chat per seat, desk prover, offline embedder."""

    name = "fixture"

    def __init__(self, replies_by_seat: dict[int, list[str]]):
        self.replies_by_seat = replies_by_seat
        self.backends: dict[int, QueueBackend] = {}

    def chat_backend(self, game_seed: int, seat: int, agent_spec=None):
        backend = QueueBackend(list(self.replies_by_seat.get(seat, [])))
        self.backends[seat] = backend
        return backend

    def prover(self, pair: WordPair):
        return MockProver(pair)

    def embedder(self):
        return MockEmbedder()


@pytest.fixture
def tea_pair() -> WordPair:
    return TEA_PAIR


def golden_runtime() -> FixtureRuntime:
    return FixtureRuntime(
        {
            seat: [GOLDEN_DESCRIBE_REPLIES[seat], GOLDEN_VOTE_REPLIES[seat]]
            for seat in range(1, 7)
        }
    )
