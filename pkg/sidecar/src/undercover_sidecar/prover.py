"""Prover engines behind /prove: an Isabelle batch bridge and a structural
fallback used when no Isabelle installation is present.

Both return (status, messages) with status in {valid, invalid, syntax_error};
messages carry error lines or failing steps for non-valid statuses. Timeouts
are reported as invalid-with-message rather than a fourth status.
"""
from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
from pathlib import Path

_GOAL = re.compile(r'shows\s+"(?:EX|∃|\\<exists>)\s*x\s*\.\s*(\w+)\s+x"')
_AXIOM_FORMULA = re.compile(r'^\s*\w+\s*:\s*"(.*)"\s*$')
_AXIOM_LABEL = re.compile(r"^\s*(\w+)\s*:")
_SYNTAX_PATTERNS = (
    "Outer syntax error",
    "Inner syntax error",
    "Malformed",
    "Bad input",
    "Failed to parse",
)
_HAMMER_HIT_PATTERNS = ("Try this:", "found a proof")


def isabelle_binary() -> str | None:
    home = os.environ.get("ISABELLE_HOME", "")
    if home:
        candidate = Path(home) / "bin" / "isabelle"
        if candidate.exists():
            return str(candidate)
    return shutil.which("isabelle")


class StructuralProver:
    """Deterministic desk checker used when Isabelle is unavailable.

    Syntax: the theory must keep the ``theory .. begin .. end`` skeleton,
    every axiomatization line must carry one well-quoted formula, and the
    theorem must state an existential goal. Provability: the goal predicate
    must occur in at least one axiom formula; otherwise no proof is found.
    """

    mode = "structural"

    def check(self, theory: str) -> tuple[str, list[str]]:
        problems = self._syntax_problems(theory)
        if problems:
            return "syntax_error", problems

        goal = _GOAL.search(theory)
        predicate = goal.group(1)
        formulas = [
            m.group(1)
            for line in theory.splitlines()
            if (m := _AXIOM_FORMULA.match(line))
        ]
        hits = [f for f in formulas if re.search(rf"\b{re.escape(predicate)}\b", f)]
        if hits:
            return "valid", []
        return "invalid", [
            f"no proof found: goal predicate {predicate} does not occur in any "
            f"of the {len(formulas)} axioms"
        ]

    def _syntax_problems(self, theory: str) -> list[str]:
        problems = []
        for keyword in ("theory", "begin", "end"):
            if not re.search(rf"\b{keyword}\b", theory):
                problems.append(f"missing {keyword!r} in theory skeleton")
        if _GOAL.search(theory) is None:
            problems.append('theorem lacks a \'shows "EX x. <Predicate> x"\' goal')
        pending_axiom = False
        for i, line in enumerate(theory.splitlines(), start=1):
            if line.strip().startswith("axiomatization"):
                pending_axiom = True
                continue
            if pending_axiom:
                pending_axiom = False
                if line.count('"') != 2 or not _AXIOM_FORMULA.match(line):
                    label = _AXIOM_LABEL.match(line)
                    name = label.group(1) if label else f"line {i}"
                    problems.append(f"malformed axiomatization {name} at line {i}")
        return problems


class IsabelleProver:
    """Batch-mode bridge: build the theory in a scratch session and classify
    the tool output. One sledgehammer pass decides valid vs invalid."""

    mode = "isabelle"

    def __init__(self, binary: str, default_timeout_s: float = 120.0):
        self.binary = binary
        self.default_timeout_s = default_timeout_s

    def check(self, theory: str, timeout_s: float | None = None) -> tuple[str, list[str]]:
        timeout = timeout_s or self.default_timeout_s
        with tempfile.TemporaryDirectory(prefix="sidecar_thy_") as scratch:
            root = Path(scratch)
            (root / "Verification.thy").write_text(theory, encoding="utf-8")
            (root / "ROOT").write_text(
                'session Scratch = HOL +\n  theories\n    Verification\n',
                encoding="utf-8",
            )
            try:
                proc = subprocess.run(
                    [self.binary, "build", "-d", scratch, "-b", "Scratch"],
                    capture_output=True,
                    text=True,
                    timeout=timeout,
                )
            except subprocess.TimeoutExpired:
                return "invalid", [f"prover timed out after {timeout:.0f}s"]
            except OSError as exc:
                return "invalid", [f"prover process failed to start: {exc}"]
        output = proc.stdout + "\n" + proc.stderr
        error_lines = [
            line.strip() for line in output.splitlines() if line.strip().startswith("***")
        ]
        if proc.returncode != 0:
            if any(p in output for p in _SYNTAX_PATTERNS):
                return "syntax_error", error_lines or ["syntax errors reported"]
            return "invalid", error_lines or ["build failed without a proof"]
        if any(p in output for p in _HAMMER_HIT_PATTERNS):
            return "valid", []
        return "invalid", ["no proof found by the hammer pass"]


def build_prover(spec: str | None = None):
    spec = spec or os.environ.get("SIDECAR_PROVER", "auto")
    if spec == "structural":
        return StructuralProver()
    binary = isabelle_binary()
    if spec == "isabelle":
        if binary is None:
            raise RuntimeError(
                "SIDECAR_PROVER=isabelle but no isabelle binary was found "
                "(set ISABELLE_HOME or put isabelle on PATH)"
            )
        return IsabelleProver(binary)
    return IsabelleProver(binary) if binary else StructuralProver()
