#!/usr/bin/env python3
"""Play a small offline contest and print the report summary.

Usage: python scripts/run_demo.py [out_dir]
"""
import sys
from pathlib import Path

from undercover.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "runs/demo"
config = Path(__file__).resolve().parents[1] / "configs" / "demo.yaml"
raise SystemExit(
    main(["play", "--config", str(config), "--out", out, "--force"])
)
