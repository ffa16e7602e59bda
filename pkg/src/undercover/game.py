"""Deterministic state machine for the lying-prohibited undercover game.

One spy among ``n_players`` holds the odd word. Each round runs a sequential
description phase (ascending player id over alive players) followed by a
simultaneous voting phase. States are immutable snapshots; every transition
returns a fresh ``GameState``.
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    DeadTarget,
    DuplicateDescription,
    EmptyText,
    IncompleteBallot,
    InvalidConfig,
    OutOfTurn,
    SelfVote,
    UnknownPlayer,
)
from .words import WordPair

_WS = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Collapse whitespace runs; duplicate checks compare this form."""
    return _WS.sub(" ", text).strip()


class Role(Enum):
    SPY = "spy"
    CITIZEN = "citizen"


class Phase(Enum):
    DESCRIBING = "describing"
    VOTING = "voting"
    FINISHED = "finished"


class Winner(Enum):
    CITIZENS = "citizens"
    SPY = "spy"


class Reason(Enum):
    SPY_ELIMINATED = "spy_eliminated"
    SURVIVED_TO_FINAL = "survived_to_final"
    TIE_LIMIT = "tie_limit"


@dataclass(frozen=True)
class GameConfig:
    word_pair: WordPair
    n_players: int = 6
    tie_limit: int = 3
    max_parse_retries: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_players < 3:
            raise InvalidConfig(f"need at least 3 players, got {self.n_players}")
        if self.tie_limit < 1:
            raise InvalidConfig(f"tie_limit must be >= 1, got {self.tie_limit}")

    def to_dict(self) -> dict:
        return {
            "word_pair": self.word_pair.to_dict(),
            "n_players": self.n_players,
            "tie_limit": self.tie_limit,
            "max_parse_retries": self.max_parse_retries,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        return cls(
            word_pair=WordPair.from_dict(data["word_pair"]),
            n_players=data["n_players"],
            tie_limit=data["tie_limit"],
            max_parse_retries=data["max_parse_retries"],
            seed=data["seed"],
        )


@dataclass(frozen=True)
class GameOutcome:
    winner: Winner
    reason: Reason
    rounds_played: int
    eliminated_citizens: int
    n_players: int

    def __post_init__(self) -> None:
        # forced pairing: the citizens can only win by removing the spy
        assert (self.reason is Reason.SPY_ELIMINATED) == (self.winner is Winner.CITIZENS)

    def to_dict(self) -> dict:
        return {
            "winner": self.winner.value,
            "reason": self.reason.value,
            "rounds_played": self.rounds_played,
            "eliminated_citizens": self.eliminated_citizens,
            "n_players": self.n_players,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameOutcome":
        return cls(
            winner=Winner(data["winner"]),
            reason=Reason(data["reason"]),
            rounds_played=data["rounds_played"],
            eliminated_citizens=data["eliminated_citizens"],
            n_players=data["n_players"],
        )


@dataclass(frozen=True)
class VoteTally:
    round: int
    votes: tuple[tuple[int, int], ...]  # (voter, target), sorted by voter
    eliminated: int | None  # None on a tie

    @property
    def is_tie(self) -> bool:
        return self.eliminated is None

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "votes": {str(v): t for v, t in self.votes},
            "eliminated": self.eliminated,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VoteTally":
        votes = tuple(sorted((int(v), int(t)) for v, t in data["votes"].items()))
        return cls(round=data["round"], votes=votes, eliminated=data["eliminated"])


@dataclass(frozen=True)
class GameState:
    config: GameConfig
    assignments: tuple[tuple[int, str, Role], ...]  # (player, word, role), by player
    alive: tuple[int, ...]
    round: int
    phase: Phase
    next_speaker: int | None
    descriptions: tuple[tuple[int, int, str], ...]  # (round, player, text)
    vote_history: tuple[VoteTally, ...]
    tie_streak: int
    outcome: GameOutcome | None

    @property
    def players(self) -> tuple[int, ...]:
        return tuple(p for p, _, _ in self.assignments)

    def word_of(self, player: int) -> str:
        for p, word, _ in self.assignments:
            if p == player:
                return word
        raise UnknownPlayer(f"no player {player}")

    def role_of(self, player: int) -> Role:
        for p, _, role in self.assignments:
            if p == player:
                return role
        raise UnknownPlayer(f"no player {player}")

    @property
    def spy(self) -> int:
        for p, _, role in self.assignments:
            if role is Role.SPY:
                return p
        raise AssertionError("no spy in assignments")

    @property
    def eliminated(self) -> tuple[int, ...]:
        return tuple(p for p in self.players if p not in self.alive)

    def eliminated_citizen_count(self) -> int:
        return sum(1 for p in self.eliminated if self.role_of(p) is Role.CITIZEN)

    def round_descriptions(self, round_no: int) -> tuple[tuple[int, str], ...]:
        return tuple((p, t) for r, p, t in self.descriptions if r == round_no)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "assignments": {
                str(p): {"word": w, "role": role.value} for p, w, role in self.assignments
            },
            "alive": list(self.alive),
            "round": self.round,
            "phase": self.phase.value,
            "next_speaker": self.next_speaker,
            "descriptions": [[r, p, t] for r, p, t in self.descriptions],
            "vote_history": [t.to_dict() for t in self.vote_history],
            "tie_streak": self.tie_streak,
            "outcome": self.outcome.to_dict() if self.outcome else None,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


@dataclass(frozen=True)
class TranscriptView:
    """Everything one player is allowed to see: never another player's word,
    never any role assignment."""

    viewer: int
    own_word: str
    round: int
    phase: Phase
    alive: tuple[int, ...]
    eliminated: tuple[int, ...]
    descriptions: tuple[tuple[int, int, str], ...]
    vote_history: tuple[VoteTally, ...]
    tie_streak: int
    max_parse_retries: int

    def others_alive(self) -> tuple[int, ...]:
        return tuple(p for p in self.alive if p != self.viewer)

    def descriptions_of(self, player: int) -> tuple[tuple[int, str], ...]:
        return tuple((r, t) for r, p, t in self.descriptions if p == player)

    def to_dict(self) -> dict:
        return {
            "viewer": self.viewer,
            "own_word": self.own_word,
            "round": self.round,
            "phase": self.phase.value,
            "alive": list(self.alive),
            "eliminated": list(self.eliminated),
            "descriptions": [[r, p, t] for r, p, t in self.descriptions],
            "vote_history": [t.to_dict() for t in self.vote_history],
            "tie_streak": self.tie_streak,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def new_game(config: GameConfig) -> GameState:
    """Deal words, seat the spy via the seeded RNG, open round 1."""
    rng = random.Random(config.seed)
    spy_seat = rng.randrange(config.n_players) + 1
    pair = config.word_pair
    assignments = tuple(
        (
            p,
            pair.spy_word if p == spy_seat else pair.citizen_word,
            Role.SPY if p == spy_seat else Role.CITIZEN,
        )
        for p in range(1, config.n_players + 1)
    )
    alive = tuple(range(1, config.n_players + 1))
    return GameState(
        config=config,
        assignments=assignments,
        alive=alive,
        round=1,
        phase=Phase.DESCRIBING,
        next_speaker=alive[0],
        descriptions=(),
        vote_history=(),
        tie_streak=0,
        outcome=None,
    )


def submit_description(state: GameState, player: int, text: str) -> GameState:
    if state.phase is not Phase.DESCRIBING or state.next_speaker != player:
        raise OutOfTurn(f"player {player} may not describe now")
    if player not in state.alive:
        raise OutOfTurn(f"player {player} is eliminated")
    if not text.strip():
        raise EmptyText("description must be non-empty")
    norm = normalize_text(text)
    for p, other in state.round_descriptions(state.round):
        if normalize_text(other) == norm:
            raise DuplicateDescription(
                f"player {player} repeats player {p}'s description this round"
            )

    descriptions = state.descriptions + ((state.round, player, text),)
    later = [p for p in state.alive if p > player]
    if later:
        return replace(state, descriptions=descriptions, next_speaker=later[0])
    return replace(
        state, descriptions=descriptions, phase=Phase.VOTING, next_speaker=None
    )


def tally_votes(votes: dict[int, int]) -> int | None:
    """Unique maximum wins; a shared maximum is a tie (returns None)."""
    counts: dict[int, int] = {}
    for target in votes.values():
        counts[target] = counts.get(target, 0) + 1
    top = max(counts.values())
    leaders = [t for t, c in counts.items() if c == top]
    return leaders[0] if len(leaders) == 1 else None


def apply_votes(state: GameState, votes: dict[int, int]) -> tuple[GameState, VoteTally]:
    if state.phase is not Phase.VOTING:
        raise OutOfTurn("not in the voting phase")
    if set(votes) != set(state.alive):
        raise IncompleteBallot(
            f"ballot must cover exactly the alive set {sorted(state.alive)}"
        )
    for voter, target in votes.items():
        if voter == target:
            raise SelfVote(f"player {voter} voted for itself")
        if target not in state.alive:
            raise DeadTarget(f"player {voter} voted for eliminated player {target}")

    eliminated = tally_votes(votes)
    tally = VoteTally(
        round=state.round,
        votes=tuple(sorted(votes.items())),
        eliminated=eliminated,
    )
    vote_history = state.vote_history + (tally,)

    if eliminated is None:
        alive = state.alive
        tie_streak = state.tie_streak + 1
    else:
        alive = tuple(p for p in state.alive if p != eliminated)
        tie_streak = 0

    spy = state.spy
    next_state = replace(
        state, alive=alive, vote_history=vote_history, tie_streak=tie_streak
    )

    def finish(winner: Winner, reason: Reason) -> GameState:
        result = GameOutcome(
            winner=winner,
            reason=reason,
            rounds_played=state.round,
            eliminated_citizens=next_state.eliminated_citizen_count(),
            n_players=state.config.n_players,
        )
        return replace(
            next_state, phase=Phase.FINISHED, next_speaker=None, outcome=result
        )

    if eliminated == spy:
        return finish(Winner.CITIZENS, Reason.SPY_ELIMINATED), tally
    if tie_streak >= state.config.tie_limit:
        return finish(Winner.SPY, Reason.TIE_LIMIT), tally
    if len(alive) == 2 and spy in alive:
        return finish(Winner.SPY, Reason.SURVIVED_TO_FINAL), tally

    next_state = replace(
        next_state,
        round=state.round + 1,
        phase=Phase.DESCRIBING,
        next_speaker=alive[0],
    )
    return next_state, tally


def transcript_view(state: GameState, viewer: int) -> TranscriptView:
    if viewer not in state.players:
        raise UnknownPlayer(f"no player {viewer}")
    return TranscriptView(
        viewer=viewer,
        own_word=state.word_of(viewer),
        round=state.round,
        phase=state.phase,
        alive=state.alive,
        eliminated=state.eliminated,
        descriptions=state.descriptions,
        vote_history=state.vote_history,
        tie_streak=state.tie_streak,
        max_parse_retries=state.config.max_parse_retries,
    )


def outcome(state: GameState) -> GameOutcome | None:
    return state.outcome
