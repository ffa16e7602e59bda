"""One human-editable config file drives contests: agents, word pairs,
backend endpoints, seeds. Secrets stay in environment variables."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .agents import AgentKind, AgentSpec
from .backends import ChatBackendRef, HttpChatBackend, SyntheticBackend
from .errors import InvalidConfig
from .prover import HttpProverClient, MockProver
from .similarity import MockEmbedder, ServiceEmbedder
from .tournament import ContestSpec, MockRuntime, derive_seed
from .words import DEFAULT_WORD_PAIRS, WordPair


@dataclass(frozen=True)
class ServiceConfig:
    chat_mode: str = "mock"  # mock | live
    chat_base_url: str = ""
    chat_model: str = ""
    chat_auth_env: str = "CHAT_API_KEY"
    prover_mode: str = "mock"  # mock | service
    prover_url: str = ""
    embedding_mode: str = "mock"  # mock | service
    embedding_url: str = ""


class ConfiguredRuntime:
    """Service bundle assembled from the config file's backend section."""

    def __init__(self, services: ServiceConfig, base_seed: int = 0):
        self.services = services
        self.base_seed = base_seed
        self.name = (
            "mock"
            if (services.chat_mode, services.prover_mode, services.embedding_mode)
            == ("mock", "mock", "mock")
            else "live"
        )

    def chat_backend(self, game_seed: int, seat: int, agent_spec=None):
        if agent_spec is not None and agent_spec.endpoint is not None:
            return HttpChatBackend(agent_spec.endpoint)
        if self.services.chat_mode == "mock":
            return SyntheticBackend(seed=derive_seed(game_seed, seat))
        ref = ChatBackendRef(
            base_url=self.services.chat_base_url,
            model=self.services.chat_model,
            auth_env=self.services.chat_auth_env,
        )
        return HttpChatBackend(ref)

    def prover(self, pair: WordPair):
        if self.services.prover_mode == "mock":
            return MockProver(pair)
        return HttpProverClient(self.services.prover_url)

    def embedder(self):
        if self.services.embedding_mode == "mock":
            return MockEmbedder()
        return ServiceEmbedder(self.services.embedding_url)


def _stock_pair(name: str) -> WordPair:
    for pair in DEFAULT_WORD_PAIRS:
        if name in (pair.citizen_word, f"{pair.citizen_word}/{pair.spy_word}"):
            return pair
    raise InvalidConfig(f"no stock word pair named {name!r}")


def parse_word_pairs(raw: list) -> tuple[WordPair, ...]:
    pairs = []
    for entry in raw:
        if isinstance(entry, str):
            pairs.append(_stock_pair(entry))
        elif isinstance(entry, dict):
            try:
                pairs.append(WordPair.from_dict(entry))
            except KeyError as exc:
                raise InvalidConfig(f"word pair entry misses field {exc}") from exc
        else:
            raise InvalidConfig(f"unreadable word pair entry: {entry!r}")
    return tuple(pairs)


def _parse_agent(raw: dict | str) -> AgentSpec:
    if isinstance(raw, str):
        raw = {"kind": raw}
    try:
        kind = AgentKind(raw["kind"])
    except (KeyError, ValueError) as exc:
        raise InvalidConfig(f"bad agent spec {raw!r}: {exc}") from exc
    if kind is AgentKind.SCRIPTED:
        raise InvalidConfig("scripted agents are test-only and not configurable")
    endpoint = None
    if raw.get("base_url") or raw.get("model"):
        if not (raw.get("base_url") and raw.get("model")):
            raise InvalidConfig("an agent endpoint needs both base_url and model")
        endpoint = ChatBackendRef(
            base_url=raw["base_url"],
            model=raw["model"],
            auth_env=raw.get("auth_env", "CHAT_API_KEY"),
        )
    return AgentSpec(kind=kind, endpoint=endpoint)


def load_config(path: str | Path) -> tuple[ContestSpec, ServiceConfig]:
    path = Path(path)
    if not path.exists():
        raise InvalidConfig(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise InvalidConfig(f"config file {path} is not valid YAML: {exc}") from exc

    raw_pairs = data.get("word_pairs")
    word_pairs = (
        parse_word_pairs(raw_pairs) if raw_pairs else DEFAULT_WORD_PAIRS
    )  # default: rotate across the whole stock list
    try:
        spec = ContestSpec(
            spy_agent=_parse_agent(data.get("spy_agent", "naive")),
            citizen_agent=_parse_agent(data.get("citizen_agent", "naive")),
            word_pairs=word_pairs,
            mode=data.get("mode", "fixed_opponent"),
            n_games=int(data.get("n_games", 30)),
            n_players=int(data.get("n_players", 6)),
            tie_limit=int(data.get("tie_limit", 3)),
            max_parse_retries=int(data.get("max_parse_retries", 3)),
            base_seed=int(data.get("base_seed", 0)),
        )
    except (ValueError, TypeError) as exc:
        raise InvalidConfig(f"bad contest spec in {path}: {exc}") from exc

    backend = data.get("backend") or {}
    chat = backend.get("chat") or {}
    prover = backend.get("prover") or {}
    embedding = backend.get("embedding") or {}
    services = ServiceConfig(
        chat_mode=chat.get("mode", "mock"),
        chat_base_url=chat.get("base_url", ""),
        chat_model=chat.get("model", ""),
        chat_auth_env=chat.get("auth_env", "CHAT_API_KEY"),
        prover_mode=prover.get("mode", "mock"),
        prover_url=prover.get("url", ""),
        embedding_mode=embedding.get("mode", "mock"),
        embedding_url=embedding.get("url", ""),
    )
    if services.chat_mode not in ("mock", "live"):
        raise InvalidConfig(f"chat mode must be mock or live, got {services.chat_mode!r}")
    if services.chat_mode == "live" and not (
        services.chat_base_url and services.chat_model
    ):
        raise InvalidConfig("live chat mode needs base_url and model")
    if services.prover_mode == "service" and not services.prover_url:
        raise InvalidConfig("prover service mode needs a url")
    if services.embedding_mode == "service" and not services.embedding_url:
        raise InvalidConfig("embedding service mode needs a url")
    return spec, services


def build_runtime(
    services: ServiceConfig, base_seed: int, force_mock: bool = False
):
    if force_mock:
        return MockRuntime(base_seed)
    return ConfiguredRuntime(services, base_seed)
