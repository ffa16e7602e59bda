"""Embedding and prover sidecar for the arena's wire protocols."""

from .app import create_app, serve
from .embedding import HashEncoder, build_encoder
from .prover import IsabelleProver, StructuralProver, build_prover

__version__ = "0.1.0"
