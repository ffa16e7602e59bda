"""Verification pipeline: knowledge bases, formal theories, prover verdicts,
and the opponent-word guess refinement driven by prover feedback.

The flow for one checked player is: collect their descriptions as facts,
ask the backend for bridging rules, formalize every sentence into an axiom,
assemble a theory whose theorem names the hypothesis word, repair syntax up
to five times, then settle the verdict by early-stop majority voting.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ArenaError, BackendUnavailable, Unparseable
from .game import TranscriptView
from .parsing import parse_guess_word
from .prompts import build_context, render_prompt, split_sections
from .prover import (
    ProverVerdict,
    VerdictKind,
    theory_digest,
    verdict_from,
    word_predicate,
)

MAX_REPAIR_ITERATIONS = 5
MAJORITY_THRESHOLD = 2
GUESS_FALLBACK = "unknown"


@dataclass(frozen=True)
class KnowledgeBase:
    subject: int  # player whose statements are checked
    facts: tuple[str, ...]
    rules: tuple[str, ...]
    hypothesis_word: str


@dataclass(frozen=True)
class Theory:
    axioms: tuple[str, ...]
    theorem: str
    target_word: str
    text: str
    source_kb: KnowledgeBase


@dataclass(frozen=True)
class RecordEntry:
    player: int
    round: int
    verdict: ProverVerdict | None
    theory_digest: str | None
    facts: tuple[str, ...]
    rules: tuple[str, ...]
    error: str | None = None


@dataclass(frozen=True)
class LogicalRecord:
    entries: tuple[RecordEntry, ...] = ()

    def entry_for(self, player: int) -> RecordEntry | None:
        for entry in self.entries:
            if entry.player == player:
                return entry
        return None

    def covers(self, view: TranscriptView) -> bool:
        """Every alive non-self player that has spoken must have an entry."""
        for player in view.others_alive():
            if view.descriptions_of(player) and self.entry_for(player) is None:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "entries": [
                {
                    "player": e.player,
                    "round": e.round,
                    "verdict": e.verdict.kind.value if e.verdict else None,
                    "theory_digest": e.theory_digest,
                    "error": e.error,
                }
                for e in self.entries
            ]
        }


@dataclass(frozen=True)
class GuessWord:
    word: str
    round_set: int
    history: tuple[tuple[int, str, str], ...] = ()  # (round, word, reason)
    flagged: bool = False

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "round_set": self.round_set,
            "history": [list(h) for h in self.history],
            "flagged": self.flagged,
        }


def build_knowledge_base(
    descriptions: list[str], hypothesis_word: str, backend, subject: int = 0
) -> KnowledgeBase:
    """Facts are the sentences verbatim; rules come from one backend call."""
    if not descriptions:
        raise ValueError("need at least one description to build a knowledge base")
    prompt = render_prompt(
        "neurosym_rules",
        {"facts": "\n".join(descriptions), "goal": hypothesis_word},
    )
    reply = backend.complete(split_sections(prompt))
    rules = tuple(line.strip() for line in reply.splitlines() if line.strip())
    return KnowledgeBase(
        subject=subject,
        facts=tuple(descriptions),
        rules=rules,
        hypothesis_word=hypothesis_word,
    )


def _formalize_sentence(sentence: str, backend) -> str:
    prompt = render_prompt("formalize", {"sentence": sentence})
    return backend.complete(split_sections(prompt)).strip()


def assemble_theory_text(
    labelled_axioms: list[tuple[str, str, str]], target_word: str
) -> str:
    """Render the prover source: one commented axiomatization per sentence,
    then a theorem asserting the target word's predicate is inhabited."""
    lines = [
        "theory Verification",
        "  imports Main",
        "begin",
        "",
        "typedecl entity",
        "typedecl event",
        "",
    ]
    for label, sentence, formula in labelled_axioms:
        lines += [
            f"(* {label}: {sentence} *)",
            "axiomatization where",
            f'  {label.lower().replace(" ", "_")}: "{formula}"',
            "",
        ]
    lines += [
        "theorem hypothesis:",
        f'  shows "EX x. {word_predicate(target_word)} x"',
        "  sledgehammer",
        "  oops",
        "",
        "end",
    ]
    return "\n".join(lines)


def autoformalize(kb: KnowledgeBase, target_word: str, backend) -> Theory:
    labelled: list[tuple[str, str, str]] = []
    axioms: list[str] = []
    for i, fact in enumerate(kb.facts, start=1):
        formula = _formalize_sentence(fact, backend)
        labelled.append((f"Fact {i}", fact, formula))
        axioms.append(formula)
    for i, rule in enumerate(kb.rules, start=1):
        formula = _formalize_sentence(rule, backend)
        labelled.append((f"Rule {i}", rule, formula))
        axioms.append(formula)
    theorem = f"EX x. {word_predicate(target_word)} x"
    return Theory(
        axioms=tuple(axioms),
        theorem=theorem,
        target_word=target_word,
        text=assemble_theory_text(labelled, target_word),
        source_kb=kb,
    )


def refine_syntax(
    theory: Theory, prover, backend
) -> tuple[Theory, bool, list[str]]:
    """Bounded repair loop: check, and while syntax errors surface, feed them
    with the theory back to the backend for a rewrite. At most five repairs.

    Returns (last theory, clean flag, last error messages).
    """
    iterations = 0
    has_syntax_error = True
    current = theory
    last_messages: list[str] = []
    while has_syntax_error and iterations < MAX_REPAIR_ITERATIONS:
        status, messages = prover.check(current.text)
        if status == VerdictKind.SYNTAX_ERROR.value:
            last_messages = messages
            prompt = render_prompt(
                "repair", {"errors": "\n".join(messages), "theory": current.text}
            )
            repaired = backend.complete(split_sections(prompt))
            current = replace(current, text=repaired)
            iterations += 1
        else:
            has_syntax_error = False
    return current, not has_syntax_error, last_messages


def early_stop_majority(theory_text: str, prover) -> ProverVerdict:
    """Re-run the flaky check until any status lands twice (at most 4 runs)."""
    counts: dict[str, int] = {}
    while True:
        status, messages = prover.check(theory_text)
        counts[status] = counts.get(status, 0) + 1
        if counts[status] >= MAJORITY_THRESHOLD:
            return verdict_from(status, messages)


@dataclass(frozen=True)
class VerificationResult:
    verdict: ProverVerdict
    kb: KnowledgeBase
    theory: Theory


def run_verification(
    subject: int,
    descriptions: list[str],
    hypothesis_word: str,
    backend,
    prover,
    dump_dir: str | Path | None = None,
) -> VerificationResult:
    kb = build_knowledge_base(descriptions, hypothesis_word, backend, subject=subject)
    theory = autoformalize(kb, hypothesis_word, backend)
    theory, clean, errors = refine_syntax(theory, prover, backend)
    if dump_dir is not None:
        path = Path(dump_dir)
        path.mkdir(parents=True, exist_ok=True)
        name = f"player{subject}_{theory_digest(theory.text)[:12]}.thy"
        (path / name).write_text(theory.text, encoding="utf-8")
    if not clean:
        verdict = verdict_from(
            VerdictKind.SYNTAX_ERROR.value, errors or ["unrepaired syntax errors"]
        )
    else:
        verdict = early_stop_majority(theory.text, prover)
    return VerificationResult(verdict=verdict, kb=kb, theory=theory)


def verify_description(
    description_owner: int,
    descriptions: list[str],
    own_word: str,
    backend,
    prover,
) -> ProverVerdict:
    return run_verification(
        description_owner, descriptions, own_word, backend, prover
    ).verdict


def build_logical_record(
    view: TranscriptView, own_word: str, backend, prover,
    dump_dir: str | Path | None = None,
) -> LogicalRecord:
    """One verdict per alive non-self player over their full clue history.

    Players who have not spoken yet get no entry; per-player failures are
    recorded as error entries instead of aborting the whole record.
    """
    entries: list[RecordEntry] = []
    for player in view.others_alive():
        spoken = [text for _, text in view.descriptions_of(player)]
        if not spoken:
            continue
        try:
            result = run_verification(
                player, spoken, own_word, backend, prover, dump_dir=dump_dir
            )
            entries.append(
                RecordEntry(
                    player=player,
                    round=view.round,
                    verdict=result.verdict,
                    theory_digest=theory_digest(result.theory.text),
                    facts=result.kb.facts,
                    rules=result.kb.rules,
                )
            )
        except ArenaError as exc:
            entries.append(
                RecordEntry(
                    player=player,
                    round=view.round,
                    verdict=None,
                    theory_digest=None,
                    facts=tuple(spoken),
                    rules=(),
                    error=str(exc),
                )
            )
    return LogicalRecord(entries=tuple(entries))


_VALIDITY_TEXT = {
    VerdictKind.VALID: "logically valid",
    VerdictKind.INVALID: "logically invalid",
    VerdictKind.SYNTAX_ERROR: "not checkable (syntax error)",
}


def record_validity_lines(record: LogicalRecord) -> str:
    if not record.entries:
        return "None"
    lines = []
    for entry in record.entries:
        if entry.verdict is None:
            lines.append(f"Player {entry.player}: verification failed ({entry.error})")
        else:
            lines.append(
                f"Player {entry.player}: {_VALIDITY_TEXT[entry.verdict.kind]}"
            )
    return "\n".join(lines)


def record_reasoning_lines(record: LogicalRecord) -> str:
    if not record.entries:
        return "None"
    blocks = []
    for entry in record.entries:
        lines = [f"Player {entry.player} facts:"]
        lines += [f"- {fact}" for fact in entry.facts]
        if entry.rules:
            lines.append(f"Player {entry.player} rules:")
            lines += [f"- {rule}" for rule in entry.rules]
        blocks.append("\n".join(lines))
    return "\n".join(blocks)


def initial_guess(view: TranscriptView, own_word: str, backend) -> GuessWord:
    """First hypothesis about the opposing word; re-prompts once if the model
    echoes the agent's own word, then falls back to a flagged sentinel."""
    prompt = render_prompt("neurosym_guess", build_context(view))
    for attempt in range(2):
        try:
            reply = backend.complete(split_sections(prompt))
            candidate = parse_guess_word(reply)
        except (BackendUnavailable, Unparseable):
            candidate = ""
        if candidate and candidate.casefold() != own_word.casefold():
            return GuessWord(
                word=candidate,
                round_set=view.round,
                history=((view.round, candidate, "initial"),),
            )
        prompt = (
            "Your guess must be different from your own word card and must not "
            "be empty. Please guess again.\nopponent's word:"
        )
    return GuessWord(
        word=GUESS_FALLBACK,
        round_set=view.round,
        history=((view.round, GUESS_FALLBACK, "fallback: no usable guess"),),
        flagged=True,
    )


def update_guess(
    guess: GuessWord,
    self_hypothesis: str,
    verdict: ProverVerdict,
    backend,
    context: dict,
    own_word: str,
    round_no: int,
) -> GuessWord:
    """Post-elimination refinement.

    A verified guess is always kept. Otherwise one backend call with the
    update prompt decides: the reply either repeats the word (keep) or names
    a new one; a reply equal to the agent's own word is rejected.
    """
    if verdict.is_valid:
        return replace(
            guess,
            round_set=round_no,
            history=guess.history + ((round_no, guess.word, "kept: guess verified"),),
        )
    branch = f"{self_hypothesis}/{verdict.kind.value}"
    try:
        prompt = render_prompt("neurosym_update", context)
        reply = backend.complete(split_sections(prompt))
        candidate = parse_guess_word(reply)
    except (BackendUnavailable, Unparseable) as exc:
        return replace(
            guess,
            round_set=round_no,
            history=guess.history
            + ((round_no, guess.word, f"kept: update failed ({exc})"),),
            flagged=True,
        )
    if candidate.casefold() == own_word.casefold():
        return replace(
            guess,
            round_set=round_no,
            history=guess.history
            + ((round_no, guess.word, f"kept: model proposed own word [{branch}]"),),
            flagged=True,
        )
    reason = (
        f"kept by model [{branch}]"
        if candidate == guess.word
        else f"updated by model [{branch}]"
    )
    return GuessWord(
        word=candidate,
        round_set=round_no,
        history=guess.history + ((round_no, candidate, reason),),
        flagged=guess.flagged,
    )
