"""Contest orchestration: run seeded games, persist transcripts, replay them.

A game record is a hash-chained event log that replays through the engine
without any backend. Contests shard cleanly because every game's seed is a
stable hash of (base seed, game index).
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .agents import (
    AgentKind,
    AgentSpec,
    AttributiveAgent,
    NaiveAgent,
    NeuroSymbolicAgent,
    ScriptedAgent,
)
from .backends import SyntheticBackend
from .errors import ArenaError, BackendUnavailable, CorruptRecord, ProverUnavailable
from .events import append_event, read_jsonl, verify_chain, write_jsonl
from .game import (
    GameConfig,
    GameOutcome,
    GameState,
    Phase,
    apply_votes,
    canonical_json,
    new_game,
    submit_description,
    transcript_view,
)
from .metrics import Transcript
from .neurosym import build_logical_record, initial_guess, run_verification, update_guess
from .prompts import build_context, describe_history
from .prover import MockProver
from .similarity import MockEmbedder
from .words import WordPair


def derive_seed(base_seed: int, game_index: int) -> int:
    material = f"{base_seed}:{game_index}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def assignments_digest(state: GameState) -> str:
    payload = canonical_json(
        {str(p): [w, r.value] for p, w, r in state.assignments}
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ContestSpec:
    spy_agent: AgentSpec
    citizen_agent: AgentSpec
    word_pairs: tuple[WordPair, ...]
    mode: str = "fixed_opponent"  # fixed_opponent | round_robin | custom
    n_games: int = 30
    n_players: int = 6
    tie_limit: int = 3
    max_parse_retries: int = 3
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_games < 1:
            raise ValueError("n_games must be >= 1")
        if not self.word_pairs:
            raise ValueError("need at least one word pair")
        if self.mode not in ("fixed_opponent", "round_robin", "custom"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "spy_agent": self.spy_agent.to_dict(),
            "citizen_agent": self.citizen_agent.to_dict(),
            "word_pairs": [p.to_dict() for p in self.word_pairs],
            "mode": self.mode,
            "n_games": self.n_games,
            "n_players": self.n_players,
            "tie_limit": self.tie_limit,
            "max_parse_retries": self.max_parse_retries,
            "base_seed": self.base_seed,
        }

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()


@dataclass
class GameRecord:
    spec_digest: str
    game_index: int
    seed: int
    events: list[dict]
    outcome: GameOutcome | None
    aborted: bool = False

    def config(self) -> GameConfig:
        return GameConfig.from_dict(self.events[0]["config"])

    def transcript(self) -> Transcript:
        return Transcript(
            descriptions=tuple(
                (e["round"], e["player"], e["text"])
                for e in self.events
                if e["type"] == "description"
            )
        )

    def spy_seat(self) -> int | None:
        for event in self.events:
            if event["type"] == "outcome":
                return event["spy"]
        return None

    def has_fallback(self) -> bool:
        return any(
            e["type"] == "description" and e.get("fallback")
            for e in self.events
        )


class MockRuntime:
    """Offline services: synthetic chat, desk prover, hashed embedder."""

    name = "mock"

    def __init__(self, base_seed: int = 0):
        self.base_seed = base_seed

    def chat_backend(self, game_seed: int, seat: int, agent_spec: AgentSpec | None = None):
        return SyntheticBackend(seed=derive_seed(game_seed, seat))

    def prover(self, pair: WordPair):
        return MockProver(pair)

    def embedder(self):
        return MockEmbedder()


def _build_agent(spec: AgentSpec, seat: int, backend, own_reference: str):
    if spec.kind is AgentKind.SCRIPTED:
        return ScriptedAgent(seat, spec.script)
    cls = {
        AgentKind.NAIVE: NaiveAgent,
        AgentKind.ATTRIBUTIVE: AttributiveAgent,
        AgentKind.NEUROSYMBOLIC: NeuroSymbolicAgent,
    }[spec.kind]
    return cls(seat, backend, own_reference=own_reference)


def _neurosym_extras(agent, view, prover):
    """Initial guess on the first turn, then a fresh record for this view."""
    if agent.guess is None:
        agent.guess = initial_guess(view, view.own_word, agent.conversation)
    record = build_logical_record(view, view.own_word, agent.backend, prover)
    return record, agent.guess


def _act_for_phase(agent, view, phase, prover):
    """Dispatch one move; returns (attribution | None, action, record | None)."""
    if agent.kind is AgentKind.NEUROSYMBOLIC:
        record, guess = _neurosym_extras(agent, view, prover)
        attribution, action = agent.act(view, phase, record, guess)
        return attribution, action, record
    if agent.kind is AgentKind.ATTRIBUTIVE:
        attribution, action = agent.act(view, phase)
        return attribution, action, None
    return None, agent.act(view, phase), None


def _unique_description(state: GameState, player: int, action, agent, view):
    """Resolve same-round duplicates: re-prompt chat agents, then disambiguate."""
    from .game import normalize_text
    from .parsing import parse_description

    text = action.text
    taken = {
        normalize_text(t) for p, t in state.round_descriptions(state.round)
    }
    if normalize_text(text) not in taken:
        return action
    retries = state.config.max_parse_retries
    if hasattr(agent, "_ask"):
        for _ in range(retries):
            try:
                raw = agent._ask(
                    "Your description repeats another player's description this "
                    "round. Give a different one-sentence description.\nDescription:"
                )
                candidate = parse_description(raw)
            except ArenaError:
                continue
            if normalize_text(candidate) not in taken:
                return type(action)(
                    kind="described",
                    text=candidate,
                    raw_reply=raw,
                    parse_attempts=action.parse_attempts + 1,
                    fallback_used=action.fallback_used,
                )
    return type(action)(
        kind="described",
        text=f"{text} (speaker {player})",
        raw_reply=action.raw_reply,
        parse_attempts=action.parse_attempts,
        fallback_used=True,
    )


def run_game(
    spec: ContestSpec,
    game_index: int,
    runtime,
    agent_sink: dict | None = None,
) -> GameRecord:
    """Play one seeded game to completion, emitting every event in order.

    ``agent_sink``, when given, receives the seat -> agent map so callers can
    inspect conversation histories after the game.
    """
    seed = derive_seed(spec.base_seed, game_index)
    pair = spec.word_pairs[game_index % len(spec.word_pairs)]
    config = GameConfig(
        word_pair=pair,
        n_players=spec.n_players,
        tie_limit=spec.tie_limit,
        max_parse_retries=spec.max_parse_retries,
        seed=seed,
    )
    state = new_game(config)
    prover = runtime.prover(pair)

    agents = {}
    for seat in state.players:
        agent_spec = spec.spy_agent if seat == state.spy else spec.citizen_agent
        backend = runtime.chat_backend(seed, seat, agent_spec)
        own_ref = pair.reference_for(state.word_of(seat))
        agents[seat] = _build_agent(agent_spec, seat, backend, own_ref)
    if agent_sink is not None:
        agent_sink.update(agents)

    events: list[dict] = []
    append_event(
        events,
        "game_start",
        spec_digest=spec.digest(),
        game_index=game_index,
        seed=seed,
        config=config.to_dict(),
        spy_kind=spec.spy_agent.kind.value,
        citizen_kind=spec.citizen_agent.kind.value,
        assignments_digest=assignments_digest(state),
    )

    record = GameRecord(
        spec_digest=spec.digest(),
        game_index=game_index,
        seed=seed,
        events=events,
        outcome=None,
    )

    try:
        while state.phase is not Phase.FINISHED:
            state = _run_description_phase(state, agents, events, prover)
            state = _run_voting_phase(state, agents, events, prover)
    except (BackendUnavailable, ProverUnavailable) as exc:
        append_event(events, "abort", reason=str(exc))
        record.aborted = True
        return record

    append_event(events, "outcome", **state.outcome.to_dict(), spy=state.spy)
    record.outcome = state.outcome
    return record


def _run_description_phase(state, agents, events, prover) -> GameState:
    while state.phase is Phase.DESCRIBING:
        speaker = state.next_speaker
        view = transcript_view(state, speaker)
        agent = agents[speaker]
        attribution, action, logical = _act_for_phase(
            agent, view, Phase.DESCRIBING, prover
        )
        if agent.kind is AgentKind.NEUROSYMBOLIC:
            append_event(
                events,
                "guess",
                round=state.round,
                player=speaker,
                word=agent.guess.word,
                flagged=agent.guess.flagged,
            )
        if logical is not None:
            append_event(
                events,
                "logical_record",
                round=state.round,
                player=speaker,
                **logical.to_dict(),
            )
        if attribution is not None:
            append_event(
                events,
                "attribution",
                round=state.round,
                phase="describing",
                player=speaker,
                **attribution.to_dict(),
            )
        action = _unique_description(state, speaker, action, agent, view)
        append_event(
            events,
            "description",
            round=state.round,
            player=speaker,
            text=action.text,
            parse_attempts=action.parse_attempts,
            fallback=action.fallback_used,
        )
        state = submit_description(state, speaker, action.text)
    return state


def _run_voting_phase(state, agents, events, prover) -> GameState:
    if state.phase is not Phase.VOTING:
        return state
    collected = []
    for voter in state.alive:
        view = transcript_view(state, voter)
        agent = agents[voter]
        attribution, action, logical = _act_for_phase(
            agent, view, Phase.VOTING, prover
        )
        collected.append((voter, attribution, action, logical))

    for voter, attribution, action, logical in collected:
        if logical is not None:
            append_event(
                events,
                "logical_record",
                round=state.round,
                player=voter,
                **logical.to_dict(),
            )
        if attribution is not None:
            append_event(
                events,
                "attribution",
                round=state.round,
                phase="voting",
                player=voter,
                **attribution.to_dict(),
            )

    votes = {voter: action.target for voter, _, action, _ in collected}
    fallbacks = {
        voter: action.fallback_used for voter, _, action, _ in collected
    }
    state, tally = apply_votes(state, votes)
    append_event(
        events,
        "votes",
        round=tally.round,
        votes={str(v): t for v, t in tally.votes},
        eliminated=tally.eliminated,
        tie_streak=state.tie_streak,
        fallback_votes=[v for v, f in sorted(fallbacks.items()) if f],
    )
    if tally.eliminated is not None:
        append_event(events, "elimination", round=tally.round, player=tally.eliminated)
    if state.phase is not Phase.FINISHED and tally.eliminated is not None:
        _refresh_guesses(state, agents, events, tally, prover)
    return state


def _refresh_guesses(state, agents, events, tally, prover) -> None:
    """After a citizen is voted out, every surviving neuro-symbolic agent
    re-checks its guess word against the eliminated player's clues."""
    eliminated = tally.eliminated
    gone_clues = [t for r, p, t in state.descriptions if p == eliminated]
    for seat in state.alive:
        agent = agents[seat]
        if agent.kind is not AgentKind.NEUROSYMBOLIC or agent.guess is None:
            continue
        result = run_verification(
            eliminated, gone_clues, agent.guess.word, agent.backend, prover
        )
        view = transcript_view(state, seat)
        context = build_context(
            view,
            {
                "voted_out_player_number": eliminated,
                "voted_out_player_descriptions": describe_history(
                    view, (eliminated,)
                ),
                "guessed_word": agent.guess.word,
                "isabelle_code": result.theory.text,
                "error_code": "\n".join(
                    result.verdict.trace.messages
                )
                if result.verdict.trace
                else "None",
            },
        )
        self_hyp = (
            agent.last_attribution.self_hypothesis.value
            if agent.last_attribution
            else "citizen"
        )
        agent.guess = update_guess(
            agent.guess,
            self_hyp,
            result.verdict,
            agent.conversation,
            context,
            view.own_word,
            round_no=tally.round,
        )
        append_event(
            events,
            "guess_update",
            round=tally.round,
            player=seat,
            word=agent.guess.word,
            verdict=result.verdict.kind.value,
            reason=agent.guess.history[-1][2],
            flagged=agent.guess.flagged,
        )


def replay(record: GameRecord) -> GameOutcome:
    """Re-drive the engine from the event log alone and cross-check the result."""
    events = record.events
    if not events or events[0].get("type") != "game_start":
        raise CorruptRecord("record does not start with game_start")
    verify_chain(events)

    config = GameConfig.from_dict(events[0]["config"])
    state = new_game(config)
    if assignments_digest(state) != events[0]["assignments_digest"]:
        raise CorruptRecord("assignments digest mismatch")

    recorded_outcome: dict | None = None
    try:
        for event in events[1:]:
            if event["type"] == "description":
                state = submit_description(state, event["player"], event["text"])
            elif event["type"] == "votes":
                votes = {int(v): t for v, t in event["votes"].items()}
                state, tally = apply_votes(state, votes)
                if tally.eliminated != event["eliminated"]:
                    raise CorruptRecord("recorded elimination diverges from replay")
            elif event["type"] == "outcome":
                recorded_outcome = event
            elif event["type"] == "abort":
                raise CorruptRecord("record marks an aborted game")
    except ArenaError as exc:
        raise CorruptRecord(f"replay failed: {exc}") from exc

    if recorded_outcome is None:
        raise CorruptRecord("record carries no outcome event")
    if state.outcome is None:
        raise CorruptRecord("replayed game did not finish")
    if state.outcome.to_dict() != {
        k: recorded_outcome[k]
        for k in ("winner", "reason", "rounds_played", "eliminated_citizens", "n_players")
    }:
        raise CorruptRecord("recorded outcome diverges from replay")
    if recorded_outcome["spy"] != state.spy:
        raise CorruptRecord("recorded spy seat diverges from replay")
    return state.outcome


def record_from_events(events: list[dict]) -> GameRecord:
    if not events or events[0].get("type") != "game_start":
        raise CorruptRecord("event list does not start with game_start")
    head = events[0]
    outcome = None
    aborted = False
    for event in events:
        if event["type"] == "outcome":
            try:
                outcome = GameOutcome.from_dict(
                    {
                        k: event[k]
                        for k in (
                            "winner",
                            "reason",
                            "rounds_played",
                            "eliminated_citizens",
                            "n_players",
                        )
                    }
                )
            except (KeyError, ValueError, AssertionError) as exc:
                raise CorruptRecord(f"unreadable outcome event: {exc}") from exc
        elif event["type"] == "abort":
            aborted = True
    return GameRecord(
        spec_digest=head["spec_digest"],
        game_index=head["game_index"],
        seed=head["seed"],
        events=events,
        outcome=outcome,
        aborted=aborted,
    )


def load_record(path: str | Path) -> GameRecord:
    return record_from_events(read_jsonl(path))


@dataclass
class ContestReport:
    spec_digest: str
    n_games: int
    aborted: int
    excluded_fallback: int
    metrics: dict
    attribution: dict  # seat kind -> mean soundness/alignment/score
    per_game: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "spec_digest": self.spec_digest,
            "n_games": self.n_games,
            "aborted": self.aborted,
            "excluded_fallback": self.excluded_fallback,
            "metrics": self.metrics,
            "attribution": self.attribution,
            "per_game": self.per_game,
        }


def score_records(
    records: list[GameRecord],
    embedder,
    exclude_fallback: bool = False,
    verbose: bool = False,
) -> ContestReport:
    """Recompute every metric from stored records; no backends involved.

    ``verbose`` adds per-round soundness/alignment traces to every player row.
    """
    from .metrics import aggregate_game_metrics, attribution_report
    from .similarity import SimilarityIndex

    index = SimilarityIndex(embedder)
    usable = [r for r in records if not r.aborted and r.outcome is not None]
    aborted = len(records) - len(usable)
    excluded = 0
    if exclude_fallback:
        kept = [r for r in usable if not r.has_fallback()]
        excluded = len(usable) - len(kept)
        usable = kept
    if not usable:
        raise CorruptRecord("no usable game records to score")

    outcomes = [r.outcome for r in usable]
    game_metrics = aggregate_game_metrics(outcomes)

    sums = {
        "spy": {"soundness": 0.0, "alignment": 0.0, "score": 0.0, "n": 0},
        "citizen": {"soundness": 0.0, "alignment": 0.0, "score": 0.0, "n": 0},
    }
    per_game = []
    for r in usable:
        transcript = r.transcript()
        pair = r.config().word_pair
        spy_seat = r.spy_seat()
        row = {
            "game_index": r.game_index,
            "seed": r.seed,
            "citizen_word": pair.citizen_word,
            "spy_word": pair.spy_word,
            "winner": r.outcome.winner.value,
            "reason": r.outcome.reason.value,
            "rounds_played": r.outcome.rounds_played,
            "eliminated_citizens": r.outcome.eliminated_citizens,
            "fallback": r.has_fallback(),
            "players": {},
        }
        for player in transcript.players():
            report = attribution_report(player, transcript, pair, index)
            seat_kind = "spy" if player == spy_seat else "citizen"
            bucket = sums[seat_kind]
            bucket["soundness"] += report.soundness
            bucket["alignment"] += report.alignment
            bucket["score"] += report.score
            bucket["n"] += 1
            row["players"][str(player)] = {
                "seat": seat_kind,
                "soundness": report.soundness,
                "alignment": report.alignment,
                "score": report.score,
            }
            if verbose:
                row["players"][str(player)]["traces"] = [
                    {
                        "round": t.round,
                        "soundness": t.soundness,
                        "alignment": t.alignment,
                        "soundness_weight": t.soundness_weight,
                        "alignment_weight": t.alignment_weight,
                    }
                    for t in report.traces
                ]
        per_game.append(row)

    attribution = {}
    for seat_kind, bucket in sums.items():
        n = bucket["n"] or 1
        attribution[seat_kind] = {
            "soundness": bucket["soundness"] / n,
            "alignment": bucket["alignment"] / n,
            "score": bucket["score"] / n,
            "n_agents": bucket["n"],
        }

    return ContestReport(
        spec_digest=records[0].spec_digest if records else "",
        n_games=len(usable),
        aborted=aborted,
        excluded_fallback=excluded,
        metrics=game_metrics.to_dict(),
        attribution=attribution,
        per_game=per_game,
    )


def run_contest(
    spec: ContestSpec,
    runtime,
    out_dir: str | Path | None = None,
    workers: int = 1,
    exclude_fallback: bool = False,
    verbose: bool = False,
) -> tuple[ContestReport, list[GameRecord]]:
    """Play n_games x |word_pairs| seeded games (both seatings in round_robin
    mode), persist them, and aggregate the report."""
    block = spec.n_games * len(spec.word_pairs)
    blocks = [spec]
    if spec.mode == "round_robin":
        blocks.append(
            ContestSpec(
                spy_agent=spec.citizen_agent,
                citizen_agent=spec.spy_agent,
                word_pairs=spec.word_pairs,
                mode=spec.mode,
                n_games=spec.n_games,
                n_players=spec.n_players,
                tie_limit=spec.tie_limit,
                max_parse_retries=spec.max_parse_retries,
                base_seed=spec.base_seed,
            )
        )

    jobs = [
        (block_spec, block_no * block + i)
        for block_no, block_spec in enumerate(blocks)
        for i in range(block)
    ]

    def play(job):
        block_spec, index = job
        return run_game(block_spec, index, runtime)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(play, jobs))
    else:
        records = [play(job) for job in jobs]

    report = score_records(
        records, runtime.embedder(), exclude_fallback, verbose=verbose
    )
    report.spec_digest = spec.digest()

    if out_dir is not None:
        out = Path(out_dir)
        (out / "games").mkdir(parents=True, exist_ok=True)
        files = []
        for r in records:
            name = f"games/game_{r.game_index:04d}.jsonl"
            write_jsonl(out / name, r.events)
            files.append(name)
        manifest = {
            "spec": spec.to_dict(),
            "spec_digest": spec.digest(),
            "n_records": len(records),
            "aborted": report.aborted,
            "embedder": runtime.embedder().model_id,
            "files": files,
        }
        (out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )
    return report, records
