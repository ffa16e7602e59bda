"""Attribution metrics and aggregate game statistics.

Soundness compares each description against the two reference definitions;
alignment compares it against the other live descriptions of the same round.
Both are averaged over rounds with weights proportional to the round index,
so later rounds (spoken with more evidence on the table) count more.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    EmptyInput,
    EmptyRounds,
    MissingReference,
    NoQualifyingRound,
)
from .game import GameOutcome, Winner
from .similarity import SimilarityIndex
from .words import WordPair

# Externally reported live-model baselines, kept for orientation only: the
# offline mock services make no attempt to reproduce them.
LIVE_BASELINE_ATTRIBUTION_SCORES = {
    "naive": 0.600,
    "attributive": 0.688,
    "neurosym": 0.780,
}
LIVE_BASELINE_SPY_WIN_RATE = 0.1708


@dataclass(frozen=True)
class Transcript:
    """Minimal metric input: who said what in which round."""

    descriptions: tuple[tuple[int, int, str], ...]  # (round, player, text)

    def rounds_of(self, player: int) -> tuple[int, ...]:
        return tuple(sorted({r for r, p, _ in self.descriptions if p == player}))

    def text_of(self, player: int, round_no: int) -> str | None:
        for r, p, t in self.descriptions:
            if r == round_no and p == player:
                return t
        return None

    def speakers_in(self, round_no: int) -> tuple[int, ...]:
        return tuple(sorted(p for r, p, _ in self.descriptions if r == round_no))

    def players(self) -> tuple[int, ...]:
        return tuple(sorted({p for _, p, _ in self.descriptions}))


@dataclass
class RoundTrace:
    round: int
    soundness: float | None = None
    alignment: float | None = None
    soundness_weight: float | None = None
    alignment_weight: float | None = None


@dataclass
class AttributionReport:
    player: int
    soundness: float
    alignment: float
    score: float
    traces: list[RoundTrace] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "player": self.player,
            "soundness": self.soundness,
            "alignment": self.alignment,
            "score": self.score,
            "traces": [
                {
                    "round": t.round,
                    "soundness": t.soundness,
                    "alignment": t.alignment,
                    "soundness_weight": t.soundness_weight,
                    "alignment_weight": t.alignment_weight,
                }
                for t in self.traces
            ],
        }


@dataclass(frozen=True)
class GameMetrics:
    spy_win_rate: float
    citizen_elimination_rate: float
    avg_rounds: float
    n_games: int

    def to_dict(self) -> dict:
        return {
            "spy_win_rate": self.spy_win_rate,
            "citizen_elimination_rate": self.citizen_elimination_rate,
            "avg_rounds": self.avg_rounds,
            "n_games": self.n_games,
        }


def round_weights(rounds: list[int] | tuple[int, ...]) -> list[float]:
    """Weights proportional to the round index, normalized to sum 1."""
    if not rounds:
        raise EmptyRounds("no rounds to weight")
    if any(r <= 0 for r in rounds) or list(rounds) != sorted(set(rounds)):
        raise EmptyRounds(f"rounds must be positive and strictly increasing: {rounds}")
    total = sum(rounds)
    return [r / total for r in rounds]


def attributional_soundness(
    player: int,
    transcript: Transcript,
    pair: WordPair,
    index: SimilarityIndex,
) -> tuple[float, list[RoundTrace]]:
    """Round-weighted ratio of similarity to the citizen vs the spy definition."""
    if not pair.citizen_reference.strip() or not pair.spy_reference.strip():
        raise MissingReference("word pair lacks a reference sentence")
    rounds = transcript.rounds_of(player)
    if not rounds:
        raise EmptyRounds(f"player {player} never described")
    weights = round_weights(rounds)
    traces = []
    total = 0.0
    for r, w in zip(rounds, weights):
        text = transcript.text_of(player, r)
        ratio = index.sim(text, pair.citizen_reference) / index.sim(
            text, pair.spy_reference
        )
        total += w * ratio
        traces.append(RoundTrace(round=r, soundness=ratio, soundness_weight=w))
    return total, traces


def attributional_alignment(
    player: int,
    transcript: Transcript,
    index: SimilarityIndex,
) -> tuple[float, list[RoundTrace]]:
    """Round-weighted mean similarity to the other live descriptions.

    Rounds where the player spoke alone carry no alignment signal and are
    dropped; the weights renormalize over what remains.
    """
    qualifying = [
        r
        for r in transcript.rounds_of(player)
        if len(transcript.speakers_in(r)) >= 2
    ]
    if not qualifying:
        raise NoQualifyingRound(f"player {player} has no round with company")
    weights = round_weights(qualifying)
    traces = []
    total = 0.0
    for r, w in zip(qualifying, weights):
        own = transcript.text_of(player, r)
        others = [
            transcript.text_of(p, r)
            for p in transcript.speakers_in(r)
            if p != player
        ]
        mean_sim = sum(index.sim(own, other) for other in others) / len(others)
        total += w * mean_sim
        traces.append(RoundTrace(round=r, alignment=mean_sim, alignment_weight=w))
    return total, traces


def attributional_score(soundness: float, alignment: float) -> float:
    return soundness * alignment


def attribution_report(
    player: int,
    transcript: Transcript,
    pair: WordPair,
    index: SimilarityIndex,
) -> AttributionReport:
    soundness, s_traces = attributional_soundness(player, transcript, pair, index)
    alignment, a_traces = attributional_alignment(player, transcript, index)
    merged: dict[int, RoundTrace] = {t.round: t for t in s_traces}
    for t in a_traces:
        if t.round in merged:
            merged[t.round].alignment = t.alignment
            merged[t.round].alignment_weight = t.alignment_weight
        else:
            merged[t.round] = t
    return AttributionReport(
        player=player,
        soundness=soundness,
        alignment=alignment,
        score=attributional_score(soundness, alignment),
        traces=[merged[r] for r in sorted(merged)],
    )


def aggregate_game_metrics(outcomes: list[GameOutcome]) -> GameMetrics:
    if not outcomes:
        raise EmptyInput("no game outcomes to aggregate")
    spy_wins = sum(1 for o in outcomes if o.winner is Winner.SPY)
    elimination = sum(
        o.eliminated_citizens / (o.n_players - 1) for o in outcomes
    ) / len(outcomes)
    avg_rounds = sum(o.rounds_played for o in outcomes) / len(outcomes)
    return GameMetrics(
        spy_win_rate=spy_wins / len(outcomes),
        citizen_elimination_rate=elimination,
        avg_rounds=avg_rounds,
        n_games=len(outcomes),
    )
