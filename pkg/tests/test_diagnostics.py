from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from causetlab.growth import ChainWithMarks, IidAntichain, OmegaPrefix, RandomGraphOrder, ladder_kernel, polya_kernel, trajectory, two_chains_kernel
from causetlab.invariance import Atom, BasicEvent, stem_event, stem_omega
from causetlab.diagnostics import (
    ALL,
    doubling_checkpoints,
    essentiality_trace,
    event_target,
    persistence_profile,
    polya_limit_test,
    reference_v,
    structure_check,
    urn_counts,
)
from causetlab.poset import antichain

PHI = (5**0.5 - 1) / 2
MARKS = ChainWithMarks((1, Fraction(1, 2), Fraction(1, 4)))


def fibonacci(n):
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_ladder_trace_is_fibonacci_ratio():
    k = ladder_kernel()
    omega = stem_omega(k.gen, tuple(range(18)))
    trace = essentiality_trace(k, stem_event(k.gen, (0,)), 4, 18, omega=omega)
    assert [n for n, _ in trace.values] == list(range(4, 19))
    for n, v in trace.values:
        assert v == Fraction(fibonacci(n - 1), fibonacci(n))
    assert abs(float(trace.values[-1][1]) - PHI) < 1e-3
    assert abs(float(trace.target) - PHI) < 1e-15
    assert trace.final_error() < 1e-3


def test_antichain_trace_is_one_over_n():
    omega = trajectory(IidAntichain(), 40, 2)
    E = BasicEvent((Atom(omega.labels[0]),), antichain(1))
    trace = essentiality_trace(IidAntichain(), E, 1, 40, omega=omega, checkpoints=[1, 5, 10, 40])
    assert [v for _, v in trace.values] == [1, Fraction(1, 5), Fraction(1, 10), Fraction(1, 40)]
    assert trace.target == 0


def test_two_chains_trace_tends_to_half():
    k = two_chains_kernel(Fraction(1, 2))
    omega = trajectory(k, 60, 3)
    trace = essentiality_trace(k, stem_event(k.gen, (0,)), 10, 60, omega=omega, checkpoints=[10, 30, 60])
    assert trace.target == Fraction(1, 2)
    assert abs(float(trace.values[-1][1]) - 0.5) < 0.15


def test_trace_truncates_at_cap(monkeypatch):
    monkeypatch.setenv("CAUSETLAB_MAX_N", "6")
    # an antichain is one twin class, so use a sparse random order instead
    omega = trajectory(RandomGraphOrder(0.1), 40, 0)
    E = BasicEvent((Atom(omega.labels[0]),), antichain(1))
    trace = essentiality_trace(RandomGraphOrder(0.1), E, 4, 40, omega=omega)
    assert trace.truncated_at is not None
    assert trace.to_csv().startswith("n,value,target,abs_error\n")


def test_doubling_checkpoints():
    assert doubling_checkpoints(100) == [8, 16, 32, 64, 100]


def test_ladder_all_persistent():
    k = ladder_kernel()
    omega = trajectory(k, 128, 1)
    profile = persistence_profile(omega, 4)
    assert profile.persistent == set(omega.labels[:4])


def test_antichain_none_persistent():
    omega = trajectory(IidAntichain(), 256, 1)
    profile = persistence_profile(omega, 2)
    assert profile.persistent == set()
    # bottom-2 membership of one element among n is 2/n
    assert profile.curves[omega.labels[0]][-1] == Fraction(2, 256)


def test_chain_with_marks_spine_persistent():
    omega = trajectory(MARKS, 128, 4)
    spine = MARKS.spine_positions(omega.labels)
    profile = persistence_profile(omega, 3, candidates=8)
    marks = {omega.labels[i] for i in range(8) if i not in spine}
    assert {omega.labels[i] for i in spine if i < 8} <= profile.persistent
    assert not marks & profile.persistent
    assert "label,n,value,persistent" in profile.to_csv()


def test_reference_sets():
    assert reference_v(IidAntichain(), 3) == set()
    assert reference_v(ladder_kernel(), 3) == ALL
    assert MARKS.spine_label(0) in reference_v(MARKS, 3)


def test_structure_checks():
    r = structure_check(IidAntichain(), 3, 0.1, 2000, seed=0)
    assert r.violations == 0 and r.passed
    r = structure_check(MARKS, 3, 0.1, 2000, seed=0)
    assert r.passed
    assert r.to_dict()["verdict"] == "pass"
    r = structure_check(ladder_kernel(), 3, 0.1, 500, seed=0)
    assert r.violations == 0


def test_structure_check_catches_wrong_reference():
    # treating nothing as persistent on the ladder exposes comparable pairs
    r = structure_check(ladder_kernel(), 3, 0.1, 2000, seed=0, V=set())
    assert not r.passed


def test_urn_count_law_is_uniform():
    # after n urn draws the number of B picks is uniform on {0..n}
    counts = np.bincount(urn_counts(30000, 5, seed=1), minlength=6)
    assert chisquare(counts).pvalue > 1e-3


def test_urn_matches_polya_kernel():
    kernel = polya_kernel()
    law = Counter()
    for i in range(3000):
        omega = trajectory(kernel, 5, i)
        law[sum(1 for x in kernel.stem_of(omega.labels) if x % 2 == 0)] += 1
    assert chisquare([law[m] for m in range(6)]).pvalue > 1e-3


def test_polya_ks():
    ok = polya_limit_test(5000, 500, seed=0)
    assert ok.passed and ok.statistic < ok.critical_value
    bad = polya_limit_test(5000, 500, seed=0, q=0.3)
    assert not bad.passed and abs(bad.mean - 0.3) < 0.01
    degenerate = polya_limit_test(5000, 1, seed=0)
    assert not degenerate.passed
    with pytest.raises(ValueError):
        polya_limit_test(10, 0)


def test_event_target_for_antichain():
    E = BasicEvent((Atom(0.5),), antichain(1))
    assert event_target(IidAntichain(), E) == 0
    assert event_target(MARKS, E) is None


def test_polya_jobs_do_not_change_counts():
    assert np.array_equal(urn_counts(3500, 50, seed=3, jobs=1), urn_counts(3500, 50, seed=3, jobs=3))


def test_trace_csv_values():
    omega = OmegaPrefix((0.1, 0.2), (0, 0))
    E = BasicEvent((Atom(0.1),), antichain(1))
    trace = essentiality_trace(IidAntichain(), E, 1, 2, omega=omega)
    assert trace.to_csv().splitlines()[1:] == ["1,1.0,0.0,1.0", "2,0.5,0.0,0.5"]
