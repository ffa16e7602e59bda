"""Prompt template loading, rendering, and view-to-placeholder assembly.

Templates live as plain text files next to this module. Placeholders use
single-brace ``{name}`` tokens; rendering substitutes every placeholder and
refuses to emit text with unresolved tokens. A ``SYSTEM:``/``USER:`` prefix
pair inside a template splits it into a two-message conversation.
"""
from __future__ import annotations

import re
from functools import lru_cache
from pathlib import Path

from .errors import MissingPlaceholder
from .game import Phase, TranscriptView, VoteTally

_TEMPLATE_DIR = Path(__file__).parent / "templates"
_PLACEHOLDER = re.compile(r"\{([a-z_]+)\}")

TEMPLATE_IDS = (
    "system",
    "naive_describe",
    "naive_vote",
    "attributive_describe",
    "attributive_vote",
    "neurosym_describe",
    "neurosym_vote",
    "neurosym_rules",
    "neurosym_guess",
    "neurosym_update",
    "formalize",
    "repair",
)


@lru_cache(maxsize=None)
def load_template(template_id: str) -> str:
    path = _TEMPLATE_DIR / f"{template_id}.txt"
    if not path.exists():
        raise MissingPlaceholder(f"unknown template {template_id!r}")
    return path.read_text(encoding="utf-8")


def render_prompt(template_id: str, context: dict) -> str:
    """Substitute every placeholder; raise if any token stays unresolved."""
    template = load_template(template_id)
    missing: set[str] = set()

    def sub(match: re.Match) -> str:
        name = match.group(1)
        if name in context:
            return str(context[name])
        missing.add(name)
        return match.group(0)

    rendered = _PLACEHOLDER.sub(sub, template)
    if missing:
        raise MissingPlaceholder(
            f"template {template_id!r} is missing placeholders: {sorted(missing)}"
        )
    return rendered


def split_sections(rendered: str) -> list[dict]:
    """Turn an optionally SYSTEM:/USER:-prefixed template into chat messages."""
    if rendered.startswith("SYSTEM:"):
        body = rendered[len("SYSTEM:"):]
        head, sep, tail = body.partition("\nUSER:")
        if sep:
            return [
                {"role": "system", "content": head.strip()},
                {"role": "user", "content": tail.strip()},
            ]
        return [{"role": "system", "content": head.strip()}]
    if rendered.startswith("USER:"):
        return [{"role": "user", "content": rendered[len("USER:"):].strip()}]
    return [{"role": "user", "content": rendered}]


def _player_list(ids: tuple[int, ...]) -> str:
    if not ids:
        return "None"
    return ", ".join(f"Player {p}" for p in ids)


def describe_history(view: TranscriptView, players: tuple[int, ...]) -> str:
    lines = [
        f"Player {p} (round {r}): {t}"
        for r, p, t in view.descriptions
        if p in players
    ]
    return "\n".join(lines) if lines else "None"


def _votes_description(tally: VoteTally | None) -> str:
    if tally is None:
        return "None"
    parts = [f"Player {v} voted for Player {t}" for v, t in tally.votes]
    if tally.eliminated is None:
        parts.append("the vote was tied, no one was eliminated")
    else:
        parts.append(f"Player {tally.eliminated} was eliminated")
    return "; ".join(parts) + "."


def _tie_sentence(streak: int) -> str:
    if streak <= 0:
        return ""
    return f"The vote has been tied for {streak} consecutive round(s)."


def _last_eliminated_sentence(view: TranscriptView) -> str:
    for tally in reversed(view.vote_history):
        if tally.eliminated is not None:
            return f"The last eliminated player is Player {tally.eliminated}."
    return ""


def build_context(view: TranscriptView, extras: dict | None = None) -> dict:
    """Standard placeholder values derivable from one player's view.

    Pipeline-specific values (guessed word, prover output, ...) arrive via
    ``extras`` and shadow the standard ones on key collision.
    """
    last_tally = view.vote_history[-1] if view.vote_history else None
    context = {
        "round_number": view.round,
        "player_number": view.viewer,
        "alive_players": _player_list(view.alive),
        "other_alive_players": _player_list(view.others_alive()),
        "eliminated_players": _player_list(view.eliminated),
        "votes_description": _votes_description(last_tally),
        "consecutive_tie_count": _tie_sentence(view.tie_streak),
        "last_eliminated_player": _last_eliminated_sentence(view),
        "word": view.own_word,
        "alive_descriptions": describe_history(view, view.alive),
        "other_alive_descriptions": describe_history(view, view.others_alive()),
        "eliminated_descriptions": describe_history(view, view.eliminated),
        "self_description": describe_history(view, (view.viewer,)),
    }
    if extras:
        context.update(extras)
    return context


def template_for(kind: str, phase: Phase) -> str:
    suffix = "describe" if phase is Phase.DESCRIBING else "vote"
    return f"{kind}_{suffix}"
