"""HTTP surface: POST /embed, POST /prove, GET /health.

Embedding requests run concurrently; prover requests serialize through one
lock (session pool of size one). Responses always match the wire schema the
arena's clients consume.
"""
from __future__ import annotations

import os
import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .embedding import build_encoder
from .prover import build_prover


class EmbedRequest(BaseModel):
    texts: list[str]


class EmbedResponse(BaseModel):
    vectors: list[list[float]]
    dim: int
    model_id: str


class ProveRequest(BaseModel):
    theory: str
    timeout_s: float = Field(default=60.0, gt=0)


class ProveResponse(BaseModel):
    status: str
    messages: list[str]


def create_app(embed_spec: str | None = None, prover_spec: str | None = None) -> FastAPI:
    app = FastAPI(title="undercover-sidecar")
    state = {"encoder": None, "encoder_error": None}
    try:
        state["encoder"] = build_encoder(embed_spec)
    except Exception as exc:  # keep /prove alive even if the model is broken
        state["encoder_error"] = str(exc)
    prover = build_prover(prover_spec)
    prove_lock = threading.Lock()

    @app.get("/health")
    def health() -> dict:
        encoder = state["encoder"]
        return {
            "status": "ok" if encoder is not None else "degraded",
            "embed_model": encoder.model_id if encoder else None,
            "prover_mode": prover.mode,
        }

    @app.post("/embed", response_model=EmbedResponse)
    def embed(request: EmbedRequest) -> EmbedResponse:
        encoder = state["encoder"]
        if encoder is None:
            raise HTTPException(503, f"embedding model not ready: {state['encoder_error']}")
        if not request.texts or any(not t.strip() for t in request.texts):
            raise HTTPException(400, "texts must be non-empty strings")
        vectors = encoder.encode(request.texts)
        return EmbedResponse(
            vectors=[[float(x) for x in row] for row in vectors],
            dim=encoder.dim,
            model_id=encoder.model_id,
        )

    @app.post("/prove", response_model=ProveResponse)
    def prove(request: ProveRequest) -> ProveResponse:
        if not request.theory.strip():
            raise HTTPException(400, "theory must be non-empty")
        with prove_lock:
            if prover.mode == "isabelle":
                status, messages = prover.check(
                    request.theory, timeout_s=request.timeout_s
                )
            else:
                status, messages = prover.check(request.theory)
        return ProveResponse(status=status, messages=messages)

    return app


def serve() -> None:
    import uvicorn

    app = create_app()
    uvicorn.run(
        app,
        host=os.environ.get("SIDECAR_HOST", "127.0.0.1"),
        port=int(os.environ.get("SIDECAR_PORT", "8008")),
    )
