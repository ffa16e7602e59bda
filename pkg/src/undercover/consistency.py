"""Cumulative-consistency checking of a finished game's clue log.

A pluggable oracle decides whether a set of descriptions is consistent with
a word; the checker applies it to every player's cumulative clue set at every
round, so a contradiction keeps flagging from its round of injection onward.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

ConsistencyOracle = Callable[[str, tuple[str, ...]], bool]


@dataclass(frozen=True)
class ConsistencyViolation:
    player: int
    round: int


@dataclass(frozen=True)
class ConsistencyReport:
    violations: tuple[ConsistencyViolation, ...]
    rounds_checked: int
    players_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "violations": [[v.player, v.round] for v in self.violations],
            "rounds_checked": self.rounds_checked,
            "players_checked": self.players_checked,
        }


def check_cumulative_consistency(
    descriptions: list[tuple[int, int, str]],
    words: dict[int, str],
    oracle: ConsistencyOracle,
) -> ConsistencyReport:
    """Run oracle(word, cumulative clues up to round R) for every player and R."""
    if not descriptions:
        return ConsistencyReport(violations=(), rounds_checked=0, players_checked=0)
    max_round = max(r for r, _, _ in descriptions)
    violations: list[ConsistencyViolation] = []
    for player, word in sorted(words.items()):
        for round_no in range(1, max_round + 1):
            cumulative = tuple(
                t
                for r, p, t in descriptions
                if p == player and r <= round_no
            )
            if not cumulative:
                continue
            if not oracle(word, cumulative):
                violations.append(ConsistencyViolation(player=player, round=round_no))
    return ConsistencyReport(
        violations=tuple(violations),
        rounds_checked=max_round,
        players_checked=len(words),
    )


def marker_oracle(marker: str = "[contradiction]") -> ConsistencyOracle:
    """Desk oracle: a clue set is inconsistent iff any clue carries the marker."""

    def oracle(word: str, clues: tuple[str, ...]) -> bool:
        return not any(marker in clue for clue in clues)

    return oracle
