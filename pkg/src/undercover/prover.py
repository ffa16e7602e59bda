"""Prover interface plus the deterministic desk prover used offline.

A prover takes opaque theory text and answers with one of three statuses:
``valid`` (a proof was found), ``invalid`` (no proof), or ``syntax_error``,
together with message lines that become the trace on non-valid outcomes.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from enum import Enum

from .errors import ProverUnavailable
from .words import WordPair

# Presence of this marker in a theory makes the desk prover report a syntax
# error; the synthetic repair call strips it.
SYNTAX_MARKER = "(*ill-formed*)"

_FACT_COMMENT = re.compile(r"\(\* (?:Fact|Rule) \d+: (.*?) \*\)")
_THEOREM_GOAL = re.compile(r'shows "EX x\. (\w+) x"')
_TOKEN = re.compile(r"[a-z0-9]+")


class VerdictKind(Enum):
    VALID = "valid"
    INVALID = "invalid"
    SYNTAX_ERROR = "syntax_error"


@dataclass(frozen=True)
class ProofTrace:
    messages: tuple[str, ...]

    def __post_init__(self) -> None:
        assert self.messages, "a trace must carry at least one message"


@dataclass(frozen=True)
class ProverVerdict:
    kind: VerdictKind
    trace: ProofTrace | None = None

    def __post_init__(self) -> None:
        # valid outcomes carry no trace; the others must explain themselves
        assert (self.trace is None) == (self.kind is VerdictKind.VALID)

    @property
    def is_valid(self) -> bool:
        return self.kind is VerdictKind.VALID


def verdict_from(status: str, messages: list[str]) -> ProverVerdict:
    kind = VerdictKind(status)
    if kind is VerdictKind.VALID:
        return ProverVerdict(kind)
    trace = ProofTrace(tuple(messages) or ("no details reported",))
    return ProverVerdict(kind, trace)


def word_predicate(word: str) -> str:
    """Camel-cased predicate name for a word ("Earl Grey Tea" -> EarlGreyTea)."""
    parts = re.split(r"[^0-9A-Za-z]+", word)
    return "".join(p[:1].upper() + p[1:] for p in parts if p)


def theory_digest(theory_text: str) -> str:
    return hashlib.sha256(theory_text.encode("utf-8")).hexdigest()


class MockProver:
    """Deterministic desk prover keyed to one word pair.

    The theory's fact comments carry the original description sentences and
    the theorem names the target word's predicate. The verdict is ``valid``
    exactly when the descriptions share more vocabulary with the target
    word's reference sentence than with the contrasting word's. Theories
    whose goal predicate matches neither word are unprovable here.
    """

    def __init__(self, pair: WordPair):
        self.pair = pair

    def check(self, theory_text: str) -> tuple[str, list[str]]:
        if SYNTAX_MARKER in theory_text:
            line_no = next(
                i + 1
                for i, line in enumerate(theory_text.splitlines())
                if SYNTAX_MARKER in line
            )
            return "syntax_error", [f"malformed expression at line {line_no}"]

        facts = _FACT_COMMENT.findall(theory_text)
        goal = _THEOREM_GOAL.search(theory_text)
        if goal is None or not facts:
            return "syntax_error", ["theory lacks a goal or axioms"]

        predicate = goal.group(1)
        if predicate == word_predicate(self.pair.citizen_word):
            target, contrast = self.pair.citizen_word, self.pair.spy_word
        elif predicate == word_predicate(self.pair.spy_word):
            target, contrast = self.pair.spy_word, self.pair.citizen_word
        else:
            return "invalid", [f"goal predicate {predicate} matches no known word"]

        spoken = set()
        for fact in facts:
            spoken.update(_TOKEN.findall(fact.lower()))
        target_overlap = len(spoken & self._reference_tokens(target))
        contrast_overlap = len(spoken & self._reference_tokens(contrast))
        if target_overlap > contrast_overlap:
            return "valid", []
        return "invalid", [
            f"no proof found: descriptions share {target_overlap} tokens with the "
            f"goal definition but {contrast_overlap} with the contrasting one"
        ]

    def _reference_tokens(self, word: str) -> set[str]:
        return set(_TOKEN.findall(self.pair.reference_for(word).lower()))


class SequenceProver:
    """Scripted statuses in order; repeats the final one when exhausted."""

    def __init__(self, statuses: list[str]):
        if not statuses:
            raise ValueError("need at least one scripted status")
        self.statuses = list(statuses)
        self.calls = 0

    def check(self, theory_text: str) -> tuple[str, list[str]]:
        status = self.statuses[min(self.calls, len(self.statuses) - 1)]
        self.calls += 1
        messages = [] if status == "valid" else [f"scripted outcome #{self.calls}"]
        return status, messages


class AlwaysBrokenProver:
    """Reports a syntax error on every check; exercises the repair bound."""

    def __init__(self):
        self.calls = 0

    def check(self, theory_text: str) -> tuple[str, list[str]]:
        self.calls += 1
        return "syntax_error", [f"unfixable syntax near token {self.calls}"]


class FlakyProver:
    """Seeded flakiness wrapper: some checks return a perturbed status.

    Makes the majority-vote loop do real work in end-to-end mock runs while
    staying a pure function of (seed, call index, theory)."""

    def __init__(self, base, seed: int = 0, flake_rate: float = 0.3):
        import random

        self.base = base
        self.rng = random.Random(seed)
        self.flake_rate = flake_rate
        self.calls = 0

    def check(self, theory_text: str) -> tuple[str, list[str]]:
        self.calls += 1
        status, messages = self.base.check(theory_text)
        if self.rng.random() < self.flake_rate:
            others = [
                k.value for k in VerdictKind if k.value != status
            ]
            status = self.rng.choice(others)
            messages = [f"flaky run #{self.calls} perturbed the outcome"]
            if status == VerdictKind.VALID.value:
                messages = []
        return status, messages


class HttpProverClient:
    """Client for the /prove endpoint: {theory, timeout_s} -> {status, messages}."""

    def __init__(self, url: str, session=None, timeout_s: float = 60.0):
        if session is None:
            import requests

            session = requests.Session()
        self.url = url.rstrip("/")
        self.session = session
        self.timeout_s = timeout_s

    def check(self, theory_text: str) -> tuple[str, list[str]]:
        try:
            resp = self.session.post(
                f"{self.url}/prove",
                json={"theory": theory_text, "timeout_s": self.timeout_s},
                timeout=self.timeout_s + 10,
            )
        except Exception as exc:
            raise ProverUnavailable(f"prover endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProverUnavailable(
                f"prover endpoint returned {resp.status_code}: {resp.text[:200]}"
            )
        payload = resp.json()
        return payload["status"], list(payload.get("messages", []))
