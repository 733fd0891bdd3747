"""Falsification harness for correlation and log-concavity inequalities on
finite posets, the low-down-set bound and the q(k, delta, eps) formula.

Every quantity is an exact rational built from linear-extension counts.
"""

from __future__ import annotations

import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log, log2, prod

import numpy as np

from .growth import RandomGraphOrder, as_fraction, trajectory
from .linext import SubsetCounter, bottom_subset_probability, count_extensions, position_distribution, \
    prefix_membership_probability, superset_in_prefix_probability
from .poset import FinitePoset, PosetError, all_posets, covering_pairs, enumerate_down_sets, minimal_elements
from .seeding import chunks, parallel_map, seed_stream

SUITES = ("fishburn", "correlation", "stanley", "lowdownset", "qformula")
LOWER_BOUND_SUITES = ("stanley", "lowdownset", "qformula")  # inequality reads lhs >= rhs


def describe(P: FinitePoset) -> str:
    rels = ",".join(f"{i + 1}<{j + 1}" for i, j in sorted(covering_pairs(P)))
    return f"n={P.n}:{rels or '-'}"


@dataclass
class BoundReport:
    suite: str
    instances: int = 0
    violations: list[tuple[str, Fraction, Fraction]] = field(default_factory=list)
    margins: list[tuple[str, Fraction, Fraction]] = field(default_factory=list)
    hypothesis_failures: int = 0
    disagreements: int = 0
    keep_margins: bool = True

    def record(self, instance: str, lhs, rhs, holds: bool):
        self.instances += 1
        if not holds:
            self.violations.append((instance, lhs, rhs))
        if self.keep_margins:
            self.margins.append((instance, lhs, rhs))

    def merge(self, other: BoundReport) -> BoundReport:
        self.instances += other.instances
        self.violations += other.violations
        self.margins += other.margins
        self.hypothesis_failures += other.hypothesis_failures
        self.disagreements += other.disagreements
        return self

    @property
    def passed(self) -> bool:
        return not self.violations and not self.disagreements

    def gap(self, lhs, rhs) -> float:
        return float(lhs - rhs) if self.suite in LOWER_BOUND_SUITES else float(rhs - lhs)

    def margin_stats(self) -> dict:
        gaps = [self.gap(l, r) for _, l, r in self.margins]
        if not gaps:
            return {}
        return {"min": min(gaps), "mean": sum(gaps) / len(gaps), "max": max(gaps)}

    def to_dict(self) -> dict:
        return {"suite": self.suite, "instances": self.instances, "violations": len(self.violations),
                "violation_examples": [{"instance": i, "lhs": str(l), "rhs": str(r)}
                                       for i, l, r in self.violations[:20]],
                "hypothesis_failures": self.hypothesis_failures, "route_disagreements": self.disagreements,
                "margin": self.margin_stats(), "verdict": "pass" if self.passed else "fail"}

    def margins_csv(self) -> str:
        out = io.StringIO()
        out.write("suite,instance,lhs,rhs,margin\n")
        for inst, l, r in self.margins:
            out.write(f"{self.suite},{inst},{l},{r},{self.gap(l, r)!r}\n")
        return out.getvalue()


# ---------------------------------------------------------------------------
# single instances


def up_sets(P: FinitePoset) -> list[int]:
    return sorted(P.full & ~D for D in enumerate_down_sets(P))


def verify_fishburn(P: FinitePoset, U: int, V: int, counter: SubsetCounter | None = None,
                    report: BoundReport | None = None) -> BoundReport:
    """e(U) e(V) <= e(U | V) e(U & V) for up-sets U, V."""
    if not (P.is_up_set(U) and P.is_up_set(V)):
        raise PosetError("U and V must be up-sets")
    e = counter or SubsetCounter(P)
    report = report if report is not None else BoundReport("fishburn")
    lhs, rhs = e(U) * e(V), e(U | V) * e(U & V)
    report.record(f"{describe(P)} U={U:#x} V={V:#x}", Fraction(lhs), Fraction(rhs), lhs <= rhs)
    return report


def verify_bottom_correlation(P: FinitePoset, x: int, D: int, counter: SubsetCounter | None = None,
                              report: BoundReport | None = None) -> BoundReport:
    """nu^P(E(x)) <= nu^{P minus D}(E(x)), checked directly and through Fishburn."""
    if x not in minimal_elements(P):
        raise PosetError("x must be minimal")
    if not P.is_down_set(D) or D >> x & 1:
        raise PosetError("D must be a down-set not containing x")
    report = report if report is not None else BoundReport("correlation")
    # direct route: counts of the restricted posets
    rest = P.remove(D)
    x_rest = x - bin(D & ((1 << x) - 1)).count("1")  # index of x after removing D
    lhs = Fraction(count_extensions(P.remove(1 << x)), count_extensions(P))
    rhs = Fraction(count_extensions(rest.remove(1 << x_rest)), count_extensions(rest))
    # Fishburn route: U = Z minus {x}, V = Z minus D
    e = counter or SubsetCounter(P)
    U, V = P.full & ~(1 << x), P.full & ~D
    if lhs != Fraction(e(U), e(U | V)) or rhs != Fraction(e(U & V), e(V)):
        report.disagreements += 1
    report.record(f"{describe(P)} x={x + 1} D={D:#x}", lhs, rhs, lhs <= rhs)
    return report


def log_concave(seq: Sequence[Fraction]) -> bool:
    """r_i**2 >= r_{i-1} r_{i+1} everywhere and no zero between positive entries."""
    if any(seq[i] * seq[i] < seq[i - 1] * seq[i + 1] for i in range(1, len(seq) - 1)):
        return False
    support = [i for i, v in enumerate(seq) if v > 0]
    return not support or all(seq[i] > 0 for i in range(support[0], support[-1] + 1))


def verify_stanley(P: FinitePoset, report: BoundReport | None = None) -> BoundReport:
    """Position law of each element is log-concave with no internal zeros."""
    report = report if report is not None else BoundReport("stanley")
    if P.n == 0:
        return report
    r = position_distribution(P)
    for x in range(P.n):
        seq = [r[i][x] for i in range(P.n)]
        worst = min(((seq[i] * seq[i], seq[i - 1] * seq[i + 1]) for i in range(1, P.n - 1)),
                    key=lambda t: t[0] - t[1], default=(Fraction(1), Fraction(0)))
        report.record(f"{describe(P)} x={x + 1}", worst[0], worst[1], log_concave(seq))
    return report


def low_downset_rhs(delta, k: int) -> Fraction:
    delta = as_fraction(delta)
    return prod((1 - (j - 1) * delta for j in range(1, k + 1)), start=Fraction(1))


def verify_low_downset_bound(P: FinitePoset, family: Iterable[int], delta, k: int,
                             report: BoundReport | None = None) -> BoundReport:
    """nu^P(Sigma_k within Y u M) >= prod (1 - (j-1) delta), hypothesis checked first."""
    delta = as_fraction(delta)
    family = set(family)
    report = report if report is not None else BoundReport("lowdownset")
    if 0 not in family:
        raise PosetError("family must contain the empty set")
    for Z in family:
        if not P.is_down_set(Z) or bin(Z).count("1") > k:
            raise PosetError("family members must be down-sets of size at most k")
    if k * delta > 1:
        raise PosetError("need k * delta <= 1")
    for Z in family:
        if bin(Z).count("1") > k - 1:
            continue
        rest = P.remove(Z)
        kept = [e for e in range(P.n) if not Z >> e & 1]
        for x in minimal_elements(P, Z):
            if Z | (1 << x) in family:
                continue
            p = Fraction(count_extensions(rest.remove(1 << kept.index(x))), count_extensions(rest))
            if p > delta:
                report.hypothesis_failures += 1
                return report
    Y = 0
    for Z in family:
        Y |= Z
    M = sum(1 << x for x in minimal_elements(P, Y))
    lhs = bottom_subset_probability(P, k, Y | M)
    rhs = low_downset_rhs(delta, k)
    report.record(f"{describe(P)} k={k} delta={delta}", lhs, rhs, lhs >= rhs)
    return report


def q_formula(k: int, delta, eps) -> dict[str, float]:
    """10 k delta**-(k+1) log(5k / (eps delta**(k+1))), natural log and log base 2."""
    delta, eps = float(delta), float(eps)
    if not (eps > 0 and 0 < delta < 1 and k >= 1):
        raise ValueError("need eps > 0, 0 < delta < 1, k >= 1")
    scale = 10 * k * delta ** -(k + 1)
    arg = 5 * k / (eps * delta ** (k + 1))
    return {"ln": scale * log(arg), "log2": scale * log2(arg)}


@dataclass
class QCheck:
    q: int
    L: list[int]
    probability: Fraction
    bound: Fraction

    @property
    def passed(self) -> bool:
        return self.probability > self.bound


def verify_q_formula(P: FinitePoset, k: int, delta, eps, q: int | None = None) -> QCheck:
    """Probability that every element likely in the bottom k sits in the bottom q."""
    delta, eps = as_fraction(delta), as_fraction(eps)
    q = q if q is not None else ceil(q_formula(k, delta, eps)["ln"])
    eta = delta ** (k + 1)
    L = [x for x in range(P.n) if prefix_membership_probability(P, x, min(k, P.n)) >= eta]
    prob = superset_in_prefix_probability(P, sum(1 << x for x in L), q)
    return QCheck(q, L, prob, 1 - eps / 8)


# ---------------------------------------------------------------------------
# suites


def check_poset(P: FinitePoset, suites: Sequence[str], reports: dict[str, BoundReport],
                rng: np.random.Generator | None = None, pair_sample: int | None = None):
    """Run the per-poset suites; with ``rng`` and ``pair_sample`` the pairs are subsampled."""
    counter = SubsetCounter(P)
    if "fishburn" in suites:
        ups = up_sets(P)
        pairs = [(a, b) for i, a in enumerate(ups) for b in ups[i:]]
        if pair_sample is not None and len(pairs) > pair_sample:
            pick = rng.choice(len(pairs), size=pair_sample, replace=False)
            pairs = [pairs[int(i)] for i in sorted(pick)]
        for U, V in pairs:
            verify_fishburn(P, U, V, counter, reports["fishburn"])
    if "correlation" in suites:
        downs = list(enumerate_down_sets(P))
        cases = [(x, D) for x in minimal_elements(P) for D in downs if not D >> x & 1]
        if pair_sample is not None and len(cases) > pair_sample:
            pick = rng.choice(len(cases), size=pair_sample, replace=False)
            cases = [cases[int(i)] for i in sorted(pick)]
        for x, D in cases:
            verify_bottom_correlation(P, x, D, counter, reports["correlation"])
    if "stanley" in suites:
        verify_stanley(P, reports["stanley"])


def _fresh(suites, keep_margins=True):
    return {s: BoundReport(s, keep_margins=keep_margins) for s in suites}


def exhaustive_suite(max_n: int, suites: Sequence[str] = ("fishburn", "correlation", "stanley"),
                     keep_margins: bool = True) -> dict[str, BoundReport]:
    """Every poset on up to max_n elements, one per isomorphism class, all instances."""
    reports = _fresh(suites, keep_margins)
    for n in range(1, max_n + 1):
        for P in all_posets(n):
            check_poset(P, suites, reports)
    return reports


def random_poset(n: int, rng: np.random.Generator, p: float = 0.5) -> FinitePoset:
    """Random graph order on n elements, grown with the growth engine."""
    return trajectory(RandomGraphOrder(p), n, rng).order().with_labels(None)


def _random_chunk(task):
    seed, index, count, n, suites, pair_sample, keep_margins = task
    rng = seed_stream(seed, index)
    reports = _fresh(suites, keep_margins)
    for _ in range(count):
        check_poset(random_poset(n, rng), suites, reports, rng, pair_sample)
    return reports


def random_suite(count: int, n: int, seed: int = 0, suites: Sequence[str] = ("fishburn", "correlation", "stanley"),
                 pair_sample: int | None = 20, jobs: int = 1, keep_margins: bool = False) -> dict[str, BoundReport]:
    """``count`` random posets on n elements; chunk c draws from stream c."""
    tasks = [(seed, index, size, n, tuple(suites), pair_sample, keep_margins)
             for index, _, size in chunks(count, 250)]
    reports = _fresh(suites, keep_margins)
    for part in parallel_map(_random_chunk, tasks, jobs):
        for s in suites:
            reports[s].merge(part[s])
    return reports


def disjoint_chains_poset(m: int, t: int) -> FinitePoset:
    from .models import disjoint_chains

    return disjoint_chains(m, t).prefix(m * t).with_labels(None)


def lowdownset_suite(fixtures: Sequence[tuple[int, int, object, int]] | None = None) -> BoundReport:
    """Disjoint-chain fixtures (m chains of length t, delta, k) with family {empty}."""
    fixtures = fixtures or [(2, 8, Fraction(1, 2), 2), (2, 8, Fraction(1, 2), 1), (3, 5, Fraction(1, 3), 3),
                            (3, 5, Fraction(1, 3), 2), (4, 4, Fraction(1, 4), 4), (2, 3, Fraction(1, 2), 2)]
    report = BoundReport("lowdownset")
    for m, t, delta, k in fixtures:
        verify_low_downset_bound(disjoint_chains_poset(m, t), {0}, delta, k, report)
    return report


def qformula_suite(fixtures=None) -> tuple[BoundReport, list[dict]]:
    fixtures = fixtures or [(3, 5, 2, Fraction(1, 3), Fraction(1, 2), None), (3, 5, 2, Fraction(1, 3), Fraction(1, 2), 8),
                            (2, 6, 1, Fraction(1, 2), Fraction(1), None), (2, 6, 1, Fraction(1, 2), Fraction(1), 6)]
    report = BoundReport("qformula")
    rows = []
    for m, t, k, delta, eps, q in fixtures:
        P = disjoint_chains_poset(m, t)
        check = verify_q_formula(P, k, delta, eps, q)
        formula = q_formula(k, delta, eps)
        if q is None:
            # only the formula's own q carries a guarantee; smaller q rows are informational
            report.record(f"chains({m},{t}) k={k} delta={delta} eps={eps} q={check.q}",
                          check.probability, check.bound, check.passed)
        rows.append({"m": m, "t": t, "k": k, "delta": str(delta), "eps": str(eps), "q": check.q,
                     "q_ln": formula["ln"], "q_log2": formula["log2"], "L_size": len(check.L),
                     "probability": str(check.probability), "bound": str(check.bound)})
    return report, rows

