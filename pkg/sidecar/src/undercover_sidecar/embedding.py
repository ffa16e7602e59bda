"""Embedding engines: a sentence-transformer wrapper and a hashed fallback.

Engine selection happens once at startup via ``SIDECAR_EMBED_MODEL``:
a model name or path loads sentence-transformers, ``hash`` selects the
dependency-free encoder, and ``auto`` (default) tries the transformer and
falls back to the hash encoder when the model cannot be loaded.
"""
from __future__ import annotations

import hashlib
import logging
import os
import re

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
_TOKEN = re.compile(r"[a-z0-9]+")


class HashEncoder:
    """Deterministic bag-of-token-bigrams encoder, unit-normalized.

    Not a semantic model: it exists so the wire contract stays exercisable
    without model weights. Pure function of the input bytes.
    """

    def __init__(self, dim: int = 384):
        self.dim = dim
        self.model_id = f"sidecar-hash-{dim}"

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            tokens = _TOKEN.findall(text.lower()) or [text]
            grams = tokens + [f"{a}_{b}" for a, b in zip(tokens, tokens[1:])]
            for gram in grams:
                digest = hashlib.blake2b(
                    gram.encode("utf-8"), digest_size=6
                ).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dim
                out[row, bucket] += 1.0 if digest[4] % 2 == 0 else -1.0
            norm = np.linalg.norm(out[row])
            if norm == 0.0:
                out[row, 0] = 1.0
                norm = 1.0
            out[row] /= norm
        return out


class TransformerEncoder:
    """sentence-transformers wrapper; vectors are normalized at encode time."""

    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer

        self._model = SentenceTransformer(model_name)
        self.dim = self._model.get_sentence_embedding_dimension()
        self.model_id = model_name

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = self._model.encode(
            texts, normalize_embeddings=True, convert_to_numpy=True
        )
        return np.asarray(vectors, dtype=np.float64)


def build_encoder(spec: str | None = None):
    spec = spec or os.environ.get("SIDECAR_EMBED_MODEL", "auto")
    if spec == "hash":
        return HashEncoder()
    model_name = DEFAULT_MODEL if spec == "auto" else spec
    try:
        return TransformerEncoder(model_name)
    except Exception as exc:
        if spec != "auto":
            raise
        logger.warning(
            "could not load %s (%s); serving the hashed fallback encoder",
            model_name,
            exc,
        )
        return HashEncoder()
