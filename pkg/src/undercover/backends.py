"""Chat-completion backends: one live HTTP client and three test doubles.

Every backend exposes ``complete(messages) -> str``. Decoding is pinned to
temperature 0 everywhere so a backend is a pure function of its input.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import BackendUnavailable


@dataclass(frozen=True)
class ChatBackendRef:
    """Endpoint descriptor for a live chat backend."""

    base_url: str
    model: str
    auth_env: str = "CHAT_API_KEY"
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if self.temperature != 0.0:
            raise ValueError("decoding temperature is fixed at 0")


class HttpChatBackend:
    """Minimal JSON chat-completions client."""

    def __init__(self, ref: ChatBackendRef, session=None, timeout: float = 120.0):
        if session is None:
            import requests

            session = requests.Session()
        self.ref = ref
        self.session = session
        self.timeout = timeout

    def complete(self, messages: list[dict]) -> str:
        headers = {}
        key = os.environ.get(self.ref.auth_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = self.session.post(
                f"{self.ref.base_url.rstrip('/')}/chat/completions",
                json={
                    "model": self.ref.model,
                    "messages": messages,
                    "temperature": 0,
                },
                headers=headers,
                timeout=self.timeout,
            )
        except Exception as exc:
            raise BackendUnavailable(f"chat backend unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise BackendUnavailable(
                f"chat backend returned {resp.status_code}: {resp.text[:200]}"
            )
        return resp.json()["choices"][0]["message"]["content"]


def prompt_digest(messages: list[dict]) -> str:
    """Fixture key: digest of the most recent user message only, so canned
    replies survive history growth."""
    last_user = ""
    for message in messages:
        if message["role"] == "user":
            last_user = message["content"]
    return hashlib.sha256(last_user.encode("utf-8")).hexdigest()


class ScriptedBackend:
    """File-backed map from request digest to canned reply."""

    def __init__(self, replies: dict[str, str] | None = None):
        self.replies = dict(replies or {})

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.replies, indent=2, sort_keys=True), encoding="utf-8"
        )

    def add(self, prompt: str, reply: str) -> None:
        self.replies[hashlib.sha256(prompt.encode("utf-8")).hexdigest()] = reply

    def complete(self, messages: list[dict]) -> str:
        key = prompt_digest(messages)
        if key not in self.replies:
            raise BackendUnavailable(f"no canned reply for digest {key[:12]}")
        return self.replies[key]


class ConversationBackend:
    """Proxy that threads calls through a growing per-agent chat history."""

    def __init__(self, backend, history: list[dict]):
        self.backend = backend
        self.history = history

    def complete(self, messages: list[dict]) -> str:
        reply = self.backend.complete(self.history + messages)
        self.history.extend(messages)
        self.history.append({"role": "assistant", "content": reply})
        return reply


class QueueBackend:
    """Replies popped in order; raises when the queue runs dry."""

    def __init__(self, replies: list[str]):
        self.replies = list(replies)
        self.consumed: list[str] = []

    def complete(self, messages: list[dict]) -> str:
        if not self.replies:
            raise BackendUnavailable("scripted reply queue exhausted")
        reply = self.replies.pop(0)
        self.consumed.append(reply)
        return reply


_PLAYER_NO = re.compile(r"You are player (\d+)\.")
_ALIVE_LIST = re.compile(r"Current Alive players are: (.+)")
_ROUND_NO = re.compile(r"Current is round (\d+)\.")
_WORD_CARD = re.compile(r"Your word card is (.+)\.")
_GUESSED = re.compile(r"guessed the opponent's word as: (.+)\.")
_THEORY_BLOCK = re.compile(r"Theory:\n(.*)\nCorrected theory:", re.DOTALL)
_SENTENCE_BLOCK = re.compile(r"Sentence:\n(.*)\nFormula:", re.DOTALL)
_GOAL_BLOCK = re.compile(r"Provided hypothesis word:\n(.+)\n\nAnswer:")


class SyntheticBackend:
    """Deterministic stand-in for a live model.

    Inspects the rendered prompt, recognizes which template produced it, and
    fabricates a legal reply seeded by (seed, prompt digest). Used by mock
    contests and the offline CLI mode; never emits any game word.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _digest(self, prompt: str) -> bytes:
        material = f"{self.seed}:{prompt}".encode("utf-8")
        return hashlib.sha256(material).digest()

    def complete(self, messages: list[dict]) -> str:
        prompt = ""
        for message in messages:
            if message["role"] == "user":
                prompt = message["content"]
        digest = self._digest(prompt)

        if "Provided hypothesis word:" in prompt:
            return self._rules_reply(prompt, digest)
        if "Formula:" in prompt and "Sentence:" in prompt:
            return self._formula_reply(prompt, digest)
        if "Corrected theory:" in prompt:
            return self._repair_reply(prompt)
        if "have a guess about the opponent's word" in prompt:
            return self._guess_reply(prompt, digest)
        if "Update your guessed word or keep it" in prompt:
            return self._update_reply(prompt, digest)
        if "write the player you want to vote" in prompt or "Vote:" in prompt:
            return self._vote_reply(prompt, digest)
        return self._describe_reply(prompt, digest)

    # --- per-template fabrication ---

    def _rules_reply(self, prompt: str, digest: bytes) -> str:
        goal_match = _GOAL_BLOCK.search(prompt)
        goal = goal_match.group(1).strip() if goal_match else "the hypothesis"
        tag = digest[:3].hex()
        return (
            f"If something shows the trait {tag}, it might be {goal}.\n"
            f"If the trait {tag} is absent, it is less likely to be {goal}."
        )

    def _formula_reply(self, prompt: str, digest: bytes) -> str:
        sent = _SENTENCE_BLOCK.search(prompt)
        token = hashlib.sha256(
            (sent.group(1).strip() if sent else prompt).encode("utf-8")
        ).hexdigest()[:6]
        return (
            f"ALL x e. Trait_{token} x & Event_{token} e & Agent e x "
            f"--> Holds_{token} x"
        )

    def _repair_reply(self, prompt: str) -> str:
        from .prover import SYNTAX_MARKER

        block = _THEORY_BLOCK.search(prompt)
        theory = block.group(1) if block else ""
        return "\n".join(
            line for line in theory.splitlines() if SYNTAX_MARKER not in line
        ).strip()

    def _guess_reply(self, prompt: str, digest: bytes) -> str:
        return f"signal-{digest[:4].hex()}"

    def _update_reply(self, prompt: str, digest: bytes) -> str:
        guessed = _GUESSED.search(prompt)
        current = guessed.group(1).strip() if guessed else "unknown"
        if digest[0] % 3 == 0:
            word = current  # keep
        else:
            word = f"signal-{digest[1:5].hex()}"
        return (
            "Reasoning Process:\n"
            "step 1: I compared the eliminated player's clues with the others.\n"
            "step 2: I weighed whether my own clues stand apart.\n"
            "step 3: I checked the prover feedback against my guess.\n"
            f"opponent's word: {word}"
        )

    def _vote_reply(self, prompt: str, digest: bytes) -> str:
        me_match = _PLAYER_NO.search(prompt)
        me = int(me_match.group(1)) if me_match else 0
        alive = self._alive_ids(prompt)
        candidates = [p for p in alive if p != me] or [max(1, me - 1)]
        target = candidates[digest[2] % len(candidates)]
        return (
            "Reasoning Process:\n"
            "step 1: I checked whose clues fail to point at my card.\n"
            f"step 2: Player {target} is likely the spy.\n"
            "Vote:\n"
            f"Player {target}"
        )

    def _describe_reply(self, prompt: str, digest: bytes) -> str:
        me_match = _PLAYER_NO.search(prompt)
        round_match = _ROUND_NO.search(prompt)
        me = int(me_match.group(1)) if me_match else 0
        round_no = int(round_match.group(1)) if round_match else 0
        tag = self._digest(f"{me}:{round_no}:{prompt}")[:4].hex()
        claim = (
            "I am likely the spy, so I will blend in."
            if digest[1] % 5 == 0
            else "I am not the spy."
        )
        return (
            "Reasoning Process:\n"
            "step 1: I compared the clues given so far with my own card.\n"
            f"step 2: {claim}\n"
            "Description:\n"
            f"Something recognized by the subtle trait {tag} this round."
        )

    @staticmethod
    def _alive_ids(prompt: str) -> list[int]:
        match = _ALIVE_LIST.search(prompt)
        if not match:
            return []
        return [int(n) for n in re.findall(r"\d+", match.group(1))]
