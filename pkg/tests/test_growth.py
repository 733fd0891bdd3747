from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causetlab.exact import PHI
from causetlab.growth import (
    ChainWithMarks,
    Csg,
    GrowthState,
    IidAntichain,
    LabelDistribution,
    MarkedPoset,
    OmegaPrefix,
    RandomGraphOrder,
    closure_of,
    csg_step_distribution,
    exact_stem_probability,
    kernel_from_config,
    ladder_kernel,
    lw_subtree_kernel,
    lw_subtree_step,
    lw_transition,
    polya_kernel,
    reachable_stems,
    rgo_order_probability,
    rgo_step_distribution,
    rooted_subtrees,
    suborders_with_probability,
    trajectory,
    two_chains_kernel,
)
from causetlab.models import two_chains
from causetlab.poset import PosetError, antichain, chain, transitive_closure
from causetlab.seeding import seed_stream

from conftest import brute_rgo_probability, standard_posets

KERNELS = {
    "ladder": ladder_kernel(),
    "two-chains": two_chains_kernel(Fraction(1, 3)),
    "polya": polya_kernel(),
    "lw": lw_subtree_kernel(2),
    "rgo": RandomGraphOrder(0.4),
    "csg": Csg((1, Fraction(1, 2), Fraction(1, 4))),
    "antichain": IidAntichain(),
    "marks": ChainWithMarks((1, Fraction(1, 2), Fraction(1, 4))),
}


def test_state_extend():
    s = GrowthState.empty().extend(0.3, 0).extend(0.7, 0).extend(0.1, 0b11)
    assert s.k == 3
    assert set(s.order.relations()) == {(0, 2), (1, 2)}


def test_state_rejects_bad_extension():
    s = GrowthState.empty().extend(0.3, 0).extend(0.7, 0b1)
    with pytest.raises(PosetError):
        s.extend(0.5, 0b10)  # not a down-set
    with pytest.raises(PosetError):
        s.extend(0.3, 0)  # repeated label


def test_omega_text_round_trip():
    omega = trajectory(RandomGraphOrder(0.5), 12, 4)
    text = omega.to_text(seed=4, kernel={"kind": "rgo", "p": 0.5})
    assert text.startswith("# causetlab trajectory\n# seed=4\n")
    assert OmegaPrefix.from_text(text) == omega


def test_closure_of():
    downs = (0, 0, 0b11)
    assert closure_of(downs, 0b100) == 0b111
    assert closure_of(downs, 0) == 0


def test_label_distribution_mass():
    law = LabelDistribution.mixture([(0, "1/2", "1/4"), ("1/2", 1, "3/4")])
    assert law.mass(0, "1/4") == Fraction(1, 8)
    assert law.mass(0, 1) == 1
    with pytest.raises(ValueError):
        LabelDistribution.mixture([(0, 1, "1/2")])
    rng = np.random.default_rng(0)
    x = np.array([law.sample(rng) for _ in range(20000)])
    assert abs((x < 0.5).mean() - 0.25) < 0.02


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_trajectories_are_valid_and_reproducible(name):
    kernel = KERNELS[name]
    n = 8 if name == "lw" else 15
    omega = trajectory(kernel, n, 11)
    assert omega.n == n
    assert len(set(omega.labels)) == n
    assert omega.order().is_standard
    assert trajectory(kernel, n, 11) == omega


@given(st.sampled_from(sorted(KERNELS)), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_state_invariants_along_trajectory(name, seed):
    kernel = KERNELS[name]
    rng = seed_stream(seed, 0)
    state = GrowthState.empty()
    for _ in range(7):
        nxt = kernel.step(state, rng)
        assert nxt.k == state.k + 1
        # the old state is the restriction of the new one
        assert nxt.order.down[: state.k] == state.order.down
        assert nxt.labels[: state.k] == state.labels
        state = nxt


def test_forced_move_has_probability_one():
    k = ladder_kernel()
    assert k.transition([0, 1, 2]) == [(3, PHI), (4, 1 - PHI)]
    k = kernel_from_config({"kind": "uniform", "model": "chains:1,4"})
    assert k.transition([0]) == [(1, 1)]


def test_ladder_phi_stems():
    k = ladder_kernel()
    assert exact_stem_probability(k, [0, 1]) == PHI**2 == 1 - PHI
    assert exact_stem_probability(k, [1, 0]) == 1 - PHI
    assert exact_stem_probability(k, [2]) == 0


@pytest.mark.parametrize("q", [Fraction(1, 3), Fraction(1, 2), Fraction(5, 7)])
def test_two_chains_stem_is_q_power(q):
    k = two_chains_kernel(q)
    for stem, p in reachable_stems(k, 5):
        m = sum(1 for x in stem if x % 2 == 0)
        assert p == q**m * (1 - q) ** (5 - m)


def test_polya_stem():
    assert exact_stem_probability(polya_kernel(), [0, 1]) == Fraction(1, 6)
    # E chi (1 - chi) for chi uniform on (0,1)
    assert Fraction(1, 2) - Fraction(1, 3) == Fraction(1, 6)


def test_polya_stems_are_beta_integrals():
    from math import factorial

    for stem, p in reachable_stems(polya_kernel(), 6):
        m = sum(1 for x in stem if x % 2 == 0)
        n = 6 - m
        assert p == Fraction(factorial(m) * factorial(n), factorial(m + n + 1))


def test_exact_stem_probability_needs_atomic_kernel():
    with pytest.raises(PosetError):
        exact_stem_probability(RandomGraphOrder(0.5), [0])


def test_exact_stem_probability_from_state():
    k = ladder_kernel()
    g = k.gen
    state = GrowthState.empty().extend(g.label(1), 0).extend(g.label(0), 0)
    assert exact_stem_probability(k, state) == 1 - PHI


def test_antichain_kernels():
    assert trajectory(IidAntichain(), 5, 1).downs == (0,) * 5
    assert trajectory(RandomGraphOrder(0), 5, 1).downs == (0,) * 5
    assert trajectory(Csg((1,)), 5, 1).downs == (0,) * 5


def test_rgo_order_probability_examples():
    p = Fraction(3, 10)
    assert rgo_order_probability(p, chain(2)) == p
    assert rgo_order_probability(p, antichain(2)) == 1 - p
    only12 = transitive_closure([(0, 1)], 3)
    assert rgo_order_probability(p, only12) == p * (1 - p) ** 2


@pytest.mark.parametrize("k", [2, 3, 4])
def test_rgo_order_probability_matches_graph_enumeration(k):
    p = Fraction(2, 7)
    total = 0
    for Q, prob in suborders_with_probability(p, k):
        assert prob == brute_rgo_probability(p, Q)
        total += prob
    assert total == 1


@given(standard_posets(max_n=4))
@settings(max_examples=30)
def test_rgo_step_law_is_a_distribution(P):
    dist = rgo_step_distribution(Fraction(1, 3), P)
    assert sum(dist.values()) == 1
    assert all(P.is_down_set(D) for D in dist)


@given(standard_posets(max_n=2), st.fractions(min_value=Fraction(1, 10), max_value=Fraction(9, 10), max_denominator=10))
def test_csg_with_geometric_weights_is_rgo(P, p):
    t = [(p / (1 - p)) ** n for n in range(3)]
    assert csg_step_distribution(t, P) == rgo_step_distribution(p, P)


def test_csg_single_cover():
    P = antichain(3)
    dist = csg_step_distribution([0, 1], P)
    assert dist == {0b001: Fraction(1, 3), 0b010: Fraction(1, 3), 0b100: Fraction(1, 3)}
    with pytest.raises(PosetError):
        csg_step_distribution([0], P)


def test_subtree_counts_are_catalan():
    assert [len(rooted_subtrees(2, n)) for n in range(1, 7)] == [1, 2, 5, 14, 42, 132]


def test_lw_first_steps():
    assert lw_transition(2, 0b1) == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    law = Counter()
    for S, p in reachable_stems(lw_subtree_kernel(2), 3):
        law[sum(1 << x for x in S)] += p
    assert len(law) == 5
    assert set(law.values()) == {Fraction(1, 5)}


@pytest.mark.parametrize("size", range(1, 8))
def test_lw_marginals_uniform(size):
    law = {1: Fraction(1)}
    for _ in range(size - 1):
        nxt = Counter()
        for S, p in law.items():
            for child, q in lw_transition(2, S).items():
                nxt[S | (1 << child)] += p * q
        law = nxt
    assert set(law) == set(rooted_subtrees(2, size))
    assert set(law.values()) == {Fraction(1, len(law))}


def test_lw_cap():
    big = rooted_subtrees(2, 8)[0]
    with pytest.raises(PosetError):
        lw_transition(2, big)
    rng = np.random.default_rng(0)
    assert bin(lw_subtree_step(2, 0b1, rng)).count("1") == 2


def test_chain_with_marks_structure():
    kernel = ChainWithMarks((1, Fraction(1, 2), Fraction(1, 4)))
    omega = trajectory(kernel, 40, 5)
    spine = kernel.spine_positions(omega.labels)
    assert spine[0] == 0 and len(spine) <= 3
    P = omega.order()
    for i in range(40):
        if i not in spine:
            # marks sit directly above an initial piece of the spine
            below = [j for j in range(40) if P.less(j, i)]
            assert below == spine[: len(below)]
            assert not any(P.less(i, j) for j in range(40))


def test_chain_with_marks_validation():
    with pytest.raises(ValueError):
        ChainWithMarks((Fraction(1, 2),))
    with pytest.raises(ValueError):
        ChainWithMarks((1, Fraction(1, 2), Fraction(1, 2)))


def test_marked_poset():
    base = transitive_closure([(0, 1)], 2, labels=[0.1, 0.2])
    kernel = MarkedPoset(base, ((0b1, Fraction(1, 2), LabelDistribution.uniform("1/2", 1)),))
    opts = kernel.options(())
    assert opts == [("base", 0, 1)]
    opts = kernel.options((0.1,))
    assert opts == [("mark", 0, Fraction(1, 2)), ("base", 1, Fraction(1, 2))]
    with pytest.raises(PosetError):
        trajectory(kernel, 40, 0)
    total = MarkedPoset(base, kernel.marks, renormalize=True)
    omega = trajectory(total, 40, 0)
    assert omega.labels[0] == 0.1
    assert all(omega.downs[i] == 1 for i in range(1, 40) if omega.labels[i] != 0.2)


def test_marked_poset_validation():
    base = transitive_closure([(0, 1)], 2, labels=[0.1, 0.2])
    with pytest.raises(ValueError):
        MarkedPoset(base, ((0b10, Fraction(1, 2), LabelDistribution()),))
    with pytest.raises(ValueError):
        MarkedPoset(base, ((0, Fraction(3, 4), LabelDistribution()), (0, Fraction(1, 2), LabelDistribution())))


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_config_round_trip(name):
    kernel = KERNELS[name]
    again = kernel_from_config(kernel.config())
    assert trajectory(again, 6, 3) == trajectory(kernel, 6, 3)


def test_rgo_empirical_law_at_three():
    kernel = RandomGraphOrder(0.5)
    rng = seed_stream(99, 0)
    counts = Counter(trajectory(kernel, 3, rng).downs for _ in range(20000))
    for Q, p in suborders_with_probability(0.5, 3):
        est = counts[Q.down] / 20000
        assert abs(est - p) < 4 * (p * (1 - p) / 20000) ** 0.5 + 1e-9


def test_exchangeable_antichain_permutations():
    # each relative order of three iid labels is equally likely
    rng = seed_stream(5, 0)
    counts = Counter()
    for _ in range(12000):
        labels = trajectory(IidAntichain(), 3, rng).labels
        counts[tuple(sorted(range(3), key=labels.__getitem__))] += 1
    assert set(counts) == set(permutations(range(3)))
    assert max(counts.values()) - min(counts.values()) < 300
