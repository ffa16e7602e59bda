"""Hash-chained typed event records and their JSONL persistence.

Every event carries ``h``, the digest of the previous event's ``h`` plus the
event's own canonical payload, so any single-event mutation of a stored
transcript breaks verification.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import CorruptRecord
from .game import canonical_json

GENESIS = "0" * 64


def _chain_digest(prev: str, payload: dict) -> str:
    material = prev + canonical_json(payload)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def append_event(events: list[dict], type_: str, **payload) -> dict:
    event = {"type": type_, **payload}
    prev = events[-1]["h"] if events else GENESIS
    event["h"] = _chain_digest(prev, {k: v for k, v in event.items() if k != "h"})
    events.append(event)
    return event


def verify_chain(events: list[dict]) -> None:
    prev = GENESIS
    for i, event in enumerate(events):
        body = {k: v for k, v in event.items() if k != "h"}
        expected = _chain_digest(prev, body)
        if event.get("h") != expected:
            raise CorruptRecord(f"event {i} fails the hash chain")
        prev = event["h"]


def write_jsonl(path: str | Path, events: list[dict]) -> None:
    lines = [canonical_json(e) for e in events]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_jsonl(path: str | Path) -> list[dict]:
    events = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptRecord(f"line {i + 1} of {path} is not JSON: {exc}") from exc
    return events
