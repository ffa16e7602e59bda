from __future__ import annotations

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from undercover_sidecar.app import create_app

CONTRACTS = Path(__file__).resolve().parents[2] / "contracts"


@pytest.fixture(scope="session")
def client() -> TestClient:
    # hash encoder + structural prover: deterministic and dependency-free
    app = create_app(embed_spec="hash", prover_spec="structural")
    return TestClient(app)


def contract_path(name: str) -> Path:
    return CONTRACTS / name
