#!/usr/bin/env python3
"""Offline round-robin sweep: every pipeline pairing, both seatings.

Plays n games per pairing per seating with the synthetic backend and prints
spy win rate and mean attribution score per pairing. Useful as a smoke
benchmark of the whole stack; the numbers themselves only reflect the mock
services.

Usage: python scripts/run_round_robin.py [n_games] [base_seed]
"""
import itertools
import sys

from undercover.agents import AgentKind, AgentSpec
from undercover.tournament import ContestSpec, MockRuntime, run_contest
from undercover.words import DEFAULT_WORD_PAIRS

n_games = int(sys.argv[1]) if len(sys.argv) > 1 else 5
base_seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

kinds = [AgentKind.NAIVE, AgentKind.ATTRIBUTIVE, AgentKind.NEUROSYMBOLIC]
pairs = DEFAULT_WORD_PAIRS[:2]

print(f"{'spy kind':<14}{'citizen kind':<14}{'spy win':>8}{'elim':>8}"
      f"{'rounds':>8}{'spy score':>11}{'cit score':>11}")
for spy_kind, citizen_kind in itertools.product(kinds, repeat=2):
    if spy_kind is citizen_kind:
        continue
    spec = ContestSpec(
        spy_agent=AgentSpec(kind=spy_kind),
        citizen_agent=AgentSpec(kind=citizen_kind),
        word_pairs=pairs,
        mode="fixed_opponent",
        n_games=n_games,
        base_seed=base_seed,
    )
    report, _ = run_contest(spec, MockRuntime(spec.base_seed))
    m = report.metrics
    print(
        f"{spy_kind.value:<14}{citizen_kind.value:<14}"
        f"{m['spy_win_rate']:>8.3f}{m['citizen_elimination_rate']:>8.3f}"
        f"{m['avg_rounds']:>8.2f}"
        f"{report.attribution['spy']['score']:>11.4f}"
        f"{report.attribution['citizen']['score']:>11.4f}"
    )
