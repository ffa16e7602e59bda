"""The agent pipelines.

Three reasoning pipelines share one acting contract: given a player's view of
the game and the current phase, produce a legal description or vote. The
plain pipeline deduces directly from the transcript; the attributive one
first hypothesizes everyone's hidden role and conditions its move on that;
the neuro-symbolic one additionally consumes prover verdicts and a running
guess of the opposing word. A scripted agent bypasses chat entirely for
tests and replays.

Parsing failures re-prompt the backend up to the configured retry budget and
then fall back to a guaranteed-legal action, flagged on the action record.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .backends import ChatBackendRef, ConversationBackend
from .errors import BackendUnavailable, IncompleteRecord, OutOfRange, Unparseable
from .game import Phase, TranscriptView
from .neurosym import (
    GuessWord,
    LogicalRecord,
    record_reasoning_lines,
    record_validity_lines,
)
from .parsing import (
    parse_description,
    parse_self_hypothesis,
    parse_suspected_spies,
    parse_vote,
    reasoning_section,
)
from .prompts import build_context, load_template, render_prompt, template_for

_RETRY_NOTE = {
    Phase.DESCRIBING: (
        "Your previous reply could not be used. Reply again with a single "
        "one-sentence description after a line reading exactly "
        '"Description:".'
    ),
    Phase.VOTING: (
        "Your previous reply could not be used. You must vote for one alive "
        "player other than yourself, in the form "
        '"Vote:" followed by "Player <number>".'
    ),
}


class AgentKind(Enum):
    NAIVE = "naive"
    ATTRIBUTIVE = "attributive"
    NEUROSYMBOLIC = "neurosym"
    SCRIPTED = "scripted"


class Hypothesis(Enum):
    SPY = "spy"
    CITIZEN = "citizen"


@dataclass(frozen=True)
class IdentityAttribution:
    """Stage-one output: the agent's role hypotheses, never shared."""

    self_hypothesis: Hypothesis
    others: dict[int, Hypothesis]
    rationale: str

    def to_dict(self) -> dict:
        return {
            "self": self.self_hypothesis.value,
            "others": {str(p): h.value for p, h in sorted(self.others.items())},
            "rationale": self.rationale,
        }


@dataclass(frozen=True)
class AgentAction:
    kind: str  # "described" | "voted"
    text: str | None = None
    target: int | None = None
    raw_reply: str = ""
    parse_attempts: int = 0
    fallback_used: bool = False


@dataclass(frozen=True)
class AgentSpec:
    kind: AgentKind
    # endpoint pins this agent kind to its own model; None uses the runtime default
    endpoint: ChatBackendRef | None = None
    script: dict | Callable | None = None

    def __post_init__(self) -> None:
        if (self.kind is AgentKind.SCRIPTED) != (self.script is not None):
            raise ValueError("a script is required iff the agent is scripted")

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind.value}
        if self.endpoint is not None:
            data["endpoint"] = {
                "base_url": self.endpoint.base_url,
                "model": self.endpoint.model,
                "auth_env": self.endpoint.auth_env,
            }
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "AgentSpec":
        endpoint = None
        if data.get("endpoint"):
            endpoint = ChatBackendRef(**data["endpoint"])
        return cls(kind=AgentKind(data["kind"]), endpoint=endpoint)


def _first_sentence(text: str) -> str:
    for i, ch in enumerate(text):
        if ch in ".!?":
            return text[: i + 1]
    return text


def default_attribution(view: TranscriptView) -> IdentityAttribution:
    return IdentityAttribution(
        self_hypothesis=Hypothesis.CITIZEN,
        others={p: Hypothesis.CITIZEN for p in view.others_alive()},
        rationale="",
    )


def attribution_from_reply(raw: str, view: TranscriptView) -> IdentityAttribution:
    rationale = reasoning_section(raw)
    others = {p: Hypothesis.CITIZEN for p in view.others_alive()}
    for suspect in parse_suspected_spies(rationale):
        if suspect in others:
            others[suspect] = Hypothesis.SPY
    return IdentityAttribution(
        self_hypothesis=Hypothesis(parse_self_hypothesis(rationale)),
        others=others,
        rationale=rationale,
    )


class ChatAgent:
    """Shared machinery: one private multi-round conversation per agent."""

    kind: AgentKind = AgentKind.NAIVE

    def __init__(self, player: int, backend, own_reference: str = ""):
        self.player = player
        self.backend = backend
        # the agent's own word's definition; the describe fallback uses it
        self.own_reference = own_reference
        self.history: list[dict] = [
            {"role": "system", "content": load_template("system").strip()}
        ]

    @property
    def conversation(self) -> ConversationBackend:
        return ConversationBackend(self.backend, self.history)

    def _ask(self, prompt: str) -> str:
        return self.conversation.complete([{"role": "user", "content": prompt}])

    def _template(self, phase: Phase) -> str:
        return template_for(self.kind.value, phase)

    def _act(
        self, view: TranscriptView, phase: Phase, extras: dict | None = None
    ) -> tuple[IdentityAttribution, AgentAction]:
        """Prompt, parse, re-prompt on failure, fall back when exhausted."""
        prompt = render_prompt(self._template(phase), build_context(view, extras))
        attempts = 0
        attribution = default_attribution(view)
        raw = ""
        while attempts <= view.max_parse_retries:
            try:
                raw = self._ask(prompt)
            except BackendUnavailable:
                raise
            attempts += 1
            if self.kind is not AgentKind.NAIVE:
                attribution = attribution_from_reply(raw, view)
            try:
                action = self._parse_action(raw, view, phase)
            except (Unparseable, OutOfRange):
                prompt = _RETRY_NOTE[phase]
                continue
            return attribution, AgentAction(
                kind=action.kind,
                text=action.text,
                target=action.target,
                raw_reply=raw,
                parse_attempts=attempts,
                fallback_used=False,
            )
        return attribution, self._fallback(view, phase, raw, attempts)

    def _parse_action(
        self, raw: str, view: TranscriptView, phase: Phase
    ) -> AgentAction:
        if phase is Phase.DESCRIBING:
            if self.kind is not AgentKind.NAIVE and not reasoning_section(raw):
                raise Unparseable("structured reply lacks its reasoning section")
            return AgentAction(kind="described", text=parse_description(raw))
        target = parse_vote(raw, valid_targets=view.others_alive())
        return AgentAction(kind="voted", target=target)

    def _fallback(
        self, view: TranscriptView, phase: Phase, raw: str, attempts: int
    ) -> AgentAction:
        if phase is Phase.VOTING:
            return AgentAction(
                kind="voted",
                target=min(view.others_alive()),
                raw_reply=raw,
                parse_attempts=attempts,
                fallback_used=True,
            )
        text = _first_sentence(self.own_reference) or "I can only restate my clue."
        return AgentAction(
            kind="described",
            text=text,
            raw_reply=raw,
            parse_attempts=attempts,
            fallback_used=True,
        )


class NaiveAgent(ChatAgent):
    """Deduction-only pipeline; no role hypotheses."""

    kind = AgentKind.NAIVE

    def act(self, view: TranscriptView, phase: Phase) -> AgentAction:
        _, action = self._act(view, phase)
        return action


class AttributiveAgent(ChatAgent):
    """Hypothesizes each player's hidden role, then acts on that reading.

    Both stages ride in one structured reply: the reasoning section carries
    the role hypotheses, the trailing marker carries the move.
    """

    kind = AgentKind.ATTRIBUTIVE

    def act(
        self, view: TranscriptView, phase: Phase
    ) -> tuple[IdentityAttribution, AgentAction]:
        return self._act(view, phase)


class NeuroSymbolicAgent(ChatAgent):
    """Attributive pipeline augmented with prover verdicts and a word guess."""

    kind = AgentKind.NEUROSYMBOLIC

    def __init__(self, player: int, backend, own_reference: str = ""):
        super().__init__(player, backend, own_reference)
        self.guess: GuessWord | None = None
        self.last_attribution: IdentityAttribution | None = None

    def act(
        self,
        view: TranscriptView,
        phase: Phase,
        record: LogicalRecord,
        guess: GuessWord,
    ) -> tuple[IdentityAttribution, AgentAction]:
        if not record.covers(view):
            raise IncompleteRecord(
                f"record misses verdicts for player {self.player}'s view"
            )
        extras = {
            "guessed_word": guess.word,
            "isabelle_reasoning": record_reasoning_lines(record),
            "logical_validity": record_validity_lines(record),
        }
        attribution, action = self._act(view, phase, extras)
        self.last_attribution = attribution
        return attribution, action


class ScriptedAgent:
    """Deterministic action table (or policy callable) for tests and replays.

    A dict script maps (round, phase value) to a description string or a vote
    target; a callable script receives (view, phase) and returns the same.
    """

    kind = AgentKind.SCRIPTED

    def __init__(self, player: int, script: dict | Callable):
        self.player = player
        self.script = script
        self.history: list[dict] = []

    def act(self, view: TranscriptView, phase: Phase) -> AgentAction:
        if callable(self.script):
            move = self.script(view, phase)
        else:
            move = self.script[(view.round, phase.value)]
        if phase is Phase.DESCRIBING:
            return AgentAction(kind="described", text=str(move), raw_reply="scripted")
        return AgentAction(kind="voted", target=int(move), raw_reply="scripted")
