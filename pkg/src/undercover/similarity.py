"""Sentence-embedding providers and the cosine similarity used by metrics.

Two providers ship here: a dependency-free hashed bag-of-words embedder for
offline runs and tests, and an HTTP client for an embedding service. Both
return unit-normalized vectors, memoized per text.
"""
from __future__ import annotations

import hashlib
import re
import threading

import numpy as np

from .errors import EmptyText, ProviderUnavailable
from .words import WordPair

SIM_FLOOR = 1e-6
PLAYABILITY_THRESHOLD = 0.7931  # advisory screening bar for word pairs

_TOKEN = re.compile(r"[a-z0-9]+")


class MockEmbedder:
    """Deterministic hashed bag-of-words embedder.

    Each token lands in a bucket chosen by a stable digest with a digest-chosen
    sign; the counts vector is L2-normalized. Pure function of the text bytes.
    """

    def __init__(self, dim: int = 256):
        self.dim = dim
        self.model_id = f"hashed-bow-{dim}"

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        vec = np.zeros(self.dim, dtype=np.float64)
        tokens = _TOKEN.findall(text.lower()) or [text]
        for token in tokens:
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            vec[0] = 1.0
            norm = 1.0
        return vec / norm


class ServiceEmbedder:
    """Client for the embedding endpoint: POST {texts} -> {vectors, dim, model_id}."""

    def __init__(self, url: str, session=None, timeout: float = 30.0):
        if session is None:
            import requests

            session = requests.Session()
        self.url = url.rstrip("/")
        self.session = session
        self.timeout = timeout
        self.dim: int | None = None
        self.model_id: str | None = None

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        try:
            resp = self.session.post(
                f"{self.url}/embed", json={"texts": texts}, timeout=self.timeout
            )
        except Exception as exc:
            raise ProviderUnavailable(f"embedding service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"embedding service returned {resp.status_code}: {resp.text[:200]}"
            )
        payload = resp.json()
        self.dim = payload["dim"]
        self.model_id = payload["model_id"]
        return [np.asarray(v, dtype=np.float64) for v in payload["vectors"]]


class SimilarityIndex:
    """Memoizing wrapper exposing the mapped similarity used by the metrics.

    Raw cosine lands in [-1, 1]; the mapped form (1+c)/2 floored at a small
    epsilon keeps ratios positive and finite. Raw cosine stays available for
    word screening, where published thresholds assume it.
    """

    def __init__(self, provider):
        self.provider = provider
        self._cache: dict[bytes, np.ndarray] = {}
        self._lock = threading.Lock()

    def vector(self, text: str) -> np.ndarray:
        key = text.encode("utf-8")
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        vec = np.asarray(self.provider.embed(text), dtype=np.float64)
        # normalize defensively: positive scaling of provider output is invisible
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec = vec / norm
        with self._lock:
            self._cache.setdefault(key, vec)
        return vec

    def raw_cosine(self, a: str, b: str) -> float:
        if a == b:
            return 1.0
        va, vb = self.vector(a), self.vector(b)
        return float(np.clip(np.dot(va, vb), -1.0, 1.0))

    def sim(self, a: str, b: str) -> float:
        if not a.strip() or not b.strip():
            raise EmptyText("similarity needs non-empty texts")
        if a == b:
            return 1.0
        mapped = (1.0 + self.raw_cosine(a, b)) / 2.0
        return max(mapped, SIM_FLOOR)


def word_pair_similarity(pair: WordPair, index: SimilarityIndex) -> float:
    """Raw cosine between the two words, comparable with screening thresholds."""
    return index.raw_cosine(pair.citizen_word, pair.spy_word)
