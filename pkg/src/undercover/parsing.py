"""Extractors that pull structured actions out of free-text chat replies."""
from __future__ import annotations

import re

from .errors import OutOfRange, Unparseable

_DESCRIPTION_MARKER = re.compile(r"description\s*:", re.IGNORECASE)
_VOTE_MARKER = re.compile(r"vote", re.IGNORECASE)
_PLAYER_REF = re.compile(r"player\s*(\d+)", re.IGNORECASE)
_REASONING_MARKER = re.compile(
    r"(?:reasoning\s+process|intention\s+selection)\s*:", re.IGNORECASE
)
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")
_GUESS_MARKER = re.compile(r"opponent'?s\s+word\s*:", re.IGNORECASE)

# self-role claims, most specific first; negations must win over bare matches
_SELF_NOT_SPY = re.compile(
    r"\bI\s+(?:am|was)\s+(?:likely\s+|probably\s+|most\s+likely\s+)?not\s+(?:the\s+|a\s+)?spy\b|"
    r"\bI\s+am\s+(?:likely\s+|probably\s+)?(?:a\s+|the\s+)?citizen\b|"
    r"\bnot\s+the\s+spy\b",
    re.IGNORECASE,
)
_SELF_SPY = re.compile(
    r"\bI\s+(?:am|was)\s+(?:likely\s+|probably\s+|most\s+likely\s+)?(?:the\s+|a\s+)?spy\b|"
    r"\bI\s+(?:think|believe|suspect)\s+I\s*(?:'m|\s+am)\s+(?:likely\s+)?(?:the\s+|a\s+)?spy\b",
    re.IGNORECASE,
)
_OTHER_SPY = re.compile(
    r"player\s*(\d+)\s+(?:is|seems|appears|was|must\s+be)"
    r"[^.\n]{0,40}?\bspy\b",
    re.IGNORECASE,
)


def _after_last(pattern: re.Pattern, text: str) -> str | None:
    last = None
    for match in pattern.finditer(text):
        last = match
    if last is None:
        return None
    return text[last.end():]


def parse_description(raw: str) -> str:
    """First non-empty line after the final "Description:" marker.

    Without a marker, a reply is accepted whole only when it reads as a single
    sentence (at most one terminal punctuation mark).
    """
    tail = _after_last(_DESCRIPTION_MARKER, raw)
    if tail is not None:
        for line in tail.splitlines():
            if line.strip():
                return line.strip()
        raise Unparseable("nothing follows the description marker")
    text = raw.strip()
    if not text:
        raise Unparseable("empty reply")
    if len(_SENTENCE_END.findall(text)) <= 1 and "\n" not in text:
        return text
    raise Unparseable("multi-sentence reply without a description marker")


def parse_vote(raw: str, valid_targets: tuple[int, ...] | None = None) -> int:
    """Integer after the last "Player" token that follows a vote marker.

    Falls back to scanning the whole reply when no vote marker exists, and to
    a bare integer when no "Player N" reference exists at all.
    """
    region = _after_last(_VOTE_MARKER, raw)
    if region is None:
        region = raw
    refs = _PLAYER_REF.findall(region) or _PLAYER_REF.findall(raw)
    if refs:
        target = int(refs[-1])
    else:
        stripped = region.strip().rstrip(".")
        if stripped.isdigit():
            target = int(stripped)
        else:
            raise Unparseable(f"no vote target in reply: {raw[:80]!r}")
    if valid_targets is not None and target not in valid_targets:
        raise OutOfRange(f"vote target {target} not among {sorted(valid_targets)}")
    return target


def reasoning_section(raw: str) -> str:
    """Text between the first reasoning header and the action marker."""
    match = _REASONING_MARKER.search(raw)
    if match is None:
        return ""
    tail = raw[match.end():]
    cut = len(tail)
    for marker in (_DESCRIPTION_MARKER, re.compile(r"vote\s*:", re.IGNORECASE)):
        m = marker.search(tail)
        if m:
            cut = min(cut, m.start())
    return tail[:cut].strip()


_CONDITIONAL_LEAD = re.compile(r"\b(?:if|whether|deduce\s+if|certain\s+if)\s*$", re.IGNORECASE)


def _asserted(pattern: re.Pattern, text: str) -> bool:
    # "if I am the spy" is a hypothetical, not a claim; skip guarded matches
    for match in pattern.finditer(text):
        lead = text[max(0, match.start() - 24):match.start()]
        if not _CONDITIONAL_LEAD.search(lead):
            return True
    return False


def parse_self_hypothesis(reasoning: str) -> str:
    """Classify the self-role claim in free-text reasoning.

    Negated claims win over bare ones, hypotheticals are ignored, and with no
    recognizable claim at all the default is citizen.
    """
    if _asserted(_SELF_NOT_SPY, reasoning):
        return "citizen"
    if _asserted(_SELF_SPY, reasoning):
        return "spy"
    return "citizen"


def parse_suspected_spies(reasoning: str) -> tuple[int, ...]:
    return tuple(sorted({int(m.group(1)) for m in _OTHER_SPY.finditer(reasoning)}))


def parse_guess_word(raw: str) -> str:
    """Guess replies either echo the "opponent's word:" label or are bare."""
    tail = _after_last(_GUESS_MARKER, raw)
    text = tail if tail is not None else raw
    for line in text.splitlines():
        candidate = line.strip().strip("[]").strip()
        if candidate:
            return candidate
    raise Unparseable("empty guess reply")
