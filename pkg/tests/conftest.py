from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from causetlab.poset import FinitePoset, transitive_closure  # noqa: E402


@st.composite
def standard_posets(draw, min_n=0, max_n=7):
    """Random suborders of [n]: each pair i<j related with some probability, then closed."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for j in range(n) for i in range(j)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return transitive_closure(chosen, n)


def brute_rgo_probability(p, Q: FinitePoset):
    """Sum over all graphs on [k] whose transitive closure (edges pointing up) is Q."""
    from itertools import product

    k = Q.n
    pairs = [(i, j) for j in range(k) for i in range(j)]
    total = 0
    for mask in product((0, 1), repeat=len(pairs)):
        edges = [pr for pr, bit in zip(pairs, mask) if bit]
        if transitive_closure(edges, k).down == Q.down:
            s = sum(mask)
            total += p**s * (1 - p) ** (len(pairs) - s)
    return total


ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        # parametrized cases of one criterion share a line
        name = report.nodeid.split("::")[-1].split("[")[0]
        outcome, duration = ACCEPTANCE.get(name, ("passed", 0.0))
        if report.outcome != "passed":
            outcome = "failed"
        ACCEPTANCE[name] = (outcome, duration + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, duration) in sorted(ACCEPTANCE.items()):
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}  ({duration:.1f}s)")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
