"""Order-invariance, order-Markov and DLR checks for causet processes.

Atomic fixed-poset kernels are checked exactly: single stems carry
positive probability and every quantity is a rational (or an element of
Q(phi)).  Other kernels are checked on interval-binned basic events by
Monte Carlo, with a Bonferroni-corrected standard-error threshold.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

from scipy.stats import norm

from .growth import FixedPosetKernel, GrowthKernel, OmegaPrefix, RandomGraphOrder, as_fraction, reachable_stems, trajectory
from .linext import initial_segment_distribution
from .poset import FinitePoset, PosetError, apply_permutation, cover_counts, mask_of, standard_suborders
from .seeding import chunks, parallel_map, seed_stream

STEM_CAP = 10**5
ALPHA = 1e-3
MIN_Z = 4.0


# ---------------------------------------------------------------------------
# events


@dataclass(frozen=True)
class Interval:
    """Half-open ``[lo, hi)``; closed at 1 so the unit interval is covered."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not 0 <= self.lo < self.hi <= 1:
            raise ValueError(f"empty or out-of-range interval [{self.lo}, {self.hi})")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x < self.hi or (self.hi == 1 and x == 1)

    def __str__(self):
        return f"[{self.lo},{self.hi}{']' if self.hi == 1 else ')'}"


@dataclass(frozen=True)
class Atom:
    value: float

    def __contains__(self, x: float) -> bool:
        return x == self.value

    def __str__(self):
        return f"{{{self.value!r}}}"


@dataclass(frozen=True)
class BasicEvent:
    """First k labels fall in ``bins`` and induce ``order`` on [k]."""

    bins: tuple
    order: FinitePoset

    def __post_init__(self):
        if len(self.bins) != self.order.n:
            raise ValueError("one bin per coordinate")
        if not self.order.is_standard:
            raise ValueError("event order must be a suborder of [k]")

    @property
    def k(self) -> int:
        return self.order.n

    def permuted(self, images: Sequence[int]) -> BasicEvent:
        """E(B_lam(1) .. B_lam(k), lam[<]) for a linear extension lam of the order."""
        Q = apply_permutation(self.order, images)
        if not Q.is_standard:
            raise PosetError("permutation is not a linear extension of the event order")
        return BasicEvent(tuple(self.bins[i] for i in images), Q)

    def contains(self, omega: OmegaPrefix) -> bool:
        k = self.k
        if omega.n < k:
            raise PosetError("trajectory shorter than event")
        mask = (1 << k) - 1
        return (all(x in b for x, b in zip(omega.labels, self.bins))
                and all(omega.downs[j] & mask == self.order.down[j] for j in range(k)))

    def __str__(self):
        rel = ",".join(f"{i + 1}<{j + 1}" for i, j in self.order.relations()) or "antichain"
        return "E(" + " ".join(str(b) for b in self.bins) + f"; {rel})"


def stem_order(gen, stem: Sequence[int]) -> FinitePoset:
    """Order induced on positions of a stem of a fixed causal set."""
    return FinitePoset(len(stem), tuple(
        mask_of(i for i in range(j) if gen.down(stem[j]) >> stem[i] & 1) for j in range(len(stem))))


def stem_event(gen, stem: Sequence[int]) -> BasicEvent:
    return BasicEvent(tuple(Atom(gen.label(x)) for x in stem), stem_order(gen, stem))


def linear_extensions_of(Q: FinitePoset) -> list[tuple[int, ...]]:
    return sorted(initial_segment_distribution(Q, Q.n)) if Q.n else [()]


def adjacent_transpositions(Q: FinitePoset) -> list[tuple[int, ...]]:
    """lam^(i) for each i with i, i+1 incomparable in Q."""
    out = []
    for i in range(Q.n - 1):
        if not Q.less(i, i + 1):
            images = list(range(Q.n))
            images[i], images[i + 1] = i + 1, i
            out.append(tuple(images))
    return out


def interval_partition(width) -> list[Interval]:
    width = as_fraction(width)
    count = 1 / width
    if count.denominator != 1:
        raise ValueError("width must divide 1")
    return [Interval(i * width, (i + 1) * width) for i in range(int(count))]


def event_battery(k: int, width=Fraction(1, 2)) -> list[BasicEvent]:
    """Every suborder of [k] crossed with every cell of an interval grid."""
    from itertools import product

    cells = interval_partition(width)
    return [BasicEvent(bins, Q) for Q in standard_suborders(k) for bins in product(cells, repeat=k)]


# ---------------------------------------------------------------------------
# reports


@dataclass
class Witness:
    event: str
    permutation: tuple
    lhs: object
    rhs: object
    discrepancy: object
    se: float | None = None

    def to_dict(self) -> dict:
        out = {"event": self.event, "permutation": [i + 1 for i in self.permutation]}
        for key in ("lhs", "rhs", "discrepancy"):
            value = getattr(self, key)
            out[key] = str(value)
            out[key + "_float"] = float(value)
        if self.se is not None:
            out["se"] = self.se
        return out


@dataclass
class InvarianceReport:
    check: str
    verdict: str
    witnesses: list[Witness] = field(default_factory=list)
    comparisons: int = 0
    samples: int | None = None
    threshold: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        out = {"check": self.check, "verdict": self.verdict, "comparisons": self.comparisons,
               "witnesses": [w.to_dict() for w in self.witnesses]}
        if self.samples is not None:
            out["samples"] = self.samples
            out["threshold_se"] = self.threshold
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"{self.check}: {self.verdict} ({self.comparisons} comparisons)"]
        if self.witnesses:
            lines.append(f"{'event':<40} {'perm':<12} {'lhs':>14} {'rhs':>14} {'diff':>12}")
            for w in self.witnesses[:20]:
                perm = "".join(str(i + 1) for i in w.permutation)
                lines.append(f"{w.event[:40]:<40} {perm:<12} {float(w.lhs):>14.6g} "
                             f"{float(w.rhs):>14.6g} {float(w.discrepancy):>12.4g}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _require_atomic(kernel):
    if not isinstance(kernel, FixedPosetKernel):
        raise PosetError("exact checks need an atomic fixed-poset kernel; use the binned check")


def _stem_tables(kernel, k_max):
    return {k: dict(reachable_stems(kernel, k, STEM_CAP)) for k in range(k_max + 1)}


# ---------------------------------------------------------------------------
# exact checks


def check_invariance_exact(kernel: FixedPosetKernel, k_max: int, mode: str = "transpositions",
                           max_witnesses: int = 10) -> InvarianceReport:
    """Compare mu(stem) with mu(reordered stem) for every reachable stem up to k_max.

    ``mode`` is ``all`` (every linear extension of the stem's order) or
    ``transpositions`` (adjacent incomparable swaps only).
    """
    _require_atomic(kernel)
    if mode not in ("all", "transpositions"):
        raise ValueError("mode is 'all' or 'transpositions'")
    tables = _stem_tables(kernel, k_max)
    report = InvarianceReport(f"invariance-exact[{mode}]", "pass")
    for k in range(2, k_max + 1):
        table = tables[k]
        for stem in sorted(table):
            Q = stem_order(kernel.gen, stem)
            perms = adjacent_transpositions(Q) if mode == "transpositions" else linear_extensions_of(Q)[1:]
            for images in perms:
                other = tuple(stem[i] for i in images)
                lhs, rhs = table[stem], table.get(other, Fraction(0))
                report.comparisons += 1
                if lhs != rhs:
                    report.verdict = "fail"
                    if len(report.witnesses) < max_witnesses:
                        names = " ".join(kernel.gen.name(x) for x in stem)
                        report.witnesses.append(Witness(f"E({names})", images, lhs, rhs, lhs - rhs))
    return report


def check_order_markov(kernel: FixedPosetKernel, k_max: int, max_witnesses: int = 10) -> InvarianceReport:
    """Ratio condition: mu(s x)/mu(s) = mu(lam s x)/mu(lam s) for reorderings lam of s."""
    _require_atomic(kernel)
    tables = _stem_tables(kernel, k_max + 1)
    report = InvarianceReport("order-markov", "pass")
    for k in range(1, k_max + 1):
        table, longer = tables[k], tables[k + 1]
        for stem in sorted(table):
            Q = stem_order(kernel.gen, stem)
            nexts = kernel.gen.frontier(mask_of(stem))
            for images in linear_extensions_of(Q)[1:]:
                other = tuple(stem[i] for i in images)
                if table.get(other, 0) == 0:
                    continue
                for x in nexts:
                    lhs = longer.get(stem + (x,), Fraction(0)) / table[stem]
                    rhs = longer.get(other + (x,), Fraction(0)) / table[other]
                    report.comparisons += 1
                    if lhs != rhs:
                        report.verdict = "fail"
                        if len(report.witnesses) < max_witnesses:
                            names = " ".join(kernel.gen.name(y) for y in stem + (x,))
                            report.witnesses.append(Witness(f"ratio E({names})", images, lhs, rhs, lhs - rhs))
    return report


def exact_event_probability(kernel: FixedPosetKernel, event: BasicEvent, table=None):
    """mu(E) summed over the reachable stems of length k."""
    _require_atomic(kernel)
    table = table if table is not None else dict(reachable_stems(kernel, event.k, STEM_CAP))
    total = Fraction(0)
    for stem, p in table.items():
        if _stem_in_event(kernel.gen, stem, event):
            total = p + total
    return total


def _stem_in_event(gen, stem, event: BasicEvent) -> bool:
    return (all(gen.label(x) in b for x, b in zip(stem, event.bins))
            and stem_order(gen, stem).down == event.order.down)


def stem_omega(gen, stem: Sequence[int]) -> OmegaPrefix:
    Q = stem_order(gen, stem)
    return OmegaPrefix(tuple(gen.label(x) for x in stem), Q.down)


def nu_k_of_event(omega: OmegaPrefix, k: int, event: BasicEvent) -> Fraction:
    """Share of linear extensions of Pi_k that, applied to omega, land in E."""
    m = event.k
    n = max(m, k)
    if omega.n < n:
        raise PosetError(f"trajectory of length {omega.n} too short for k={k}, event length {m}")
    Pk = omega.order(k)
    total = Fraction(0)
    for head, p in initial_segment_distribution(Pk, min(m, k)).items():
        elems = list(head) + list(range(len(head), m))
        if not all(omega.labels[e] in b for e, b in zip(elems, event.bins)):
            continue
        if all((omega.downs[elems[j]] >> elems[i] & 1) == (event.order.down[j] >> i & 1)
               for j in range(m) for i in range(j)):
            total += p
    return total


def check_dlr(kernel: GrowthKernel, event: BasicEvent, k: int, mode: str = "exact",
              samples: int = 10**5, seed: int = 0, jobs: int = 1, tables=None) -> InvarianceReport:
    """mu(E) against the mean of nu^k(E) under mu."""
    n = max(event.k, k)
    report = InvarianceReport(f"dlr[{mode}] k={k}", "pass", comparisons=1)
    if mode == "exact":
        _require_atomic(kernel)
        tables = tables if tables is not None else {}
        for length in {event.k, n}:
            if length not in tables:
                tables[length] = dict(reachable_stems(kernel, length, STEM_CAP))
        lhs = exact_event_probability(kernel, event, tables[event.k])
        rhs = Fraction(0)
        for stem, p in tables[n].items():
            nu = nu_k_of_event(stem_omega(kernel.gen, stem), k, event)
            if nu:
                rhs = p * nu + rhs
        if lhs != rhs:
            report.verdict = "fail"
            report.witnesses.append(Witness(str(event), tuple(range(event.k)), lhs, rhs, lhs - rhs))
        return report
    if mode != "mc":
        raise ValueError("mode is 'exact' or 'mc'")
    omegas = sample_prefixes(kernel, samples, n, seed, jobs)
    diffs = [float(nu_k_of_event(w, k, event)) - float(event.contains(w)) for w in omegas]
    mean_ind = sum(event.contains(w) for w in omegas) / samples
    mean_nu = mean_ind + sum(diffs) / samples
    var = sum((d - (mean_nu - mean_ind)) ** 2 for d in diffs) / max(samples - 1, 1)
    se = sqrt(var / samples)
    report.samples, report.threshold = samples, MIN_Z
    disc = mean_ind - mean_nu
    if se == 0 and disc != 0 or se > 0 and abs(disc) > MIN_Z * se:
        report.verdict = "fail"
    report.witnesses.append(Witness(str(event), tuple(range(event.k)), mean_ind, mean_nu, disc, se))
    report.notes.append("paired difference of indicator and nu^k, 4 standard errors")
    return report


def check_lambda_k_invariance(omega: OmegaPrefix, k: int, events: Sequence[BasicEvent]) -> InvarianceReport:
    """nu^k(E)(omega) = nu^k(lam^(i) E)(omega) for each admissible adjacent swap."""
    report = InvarianceReport(f"lambda-k k={k}", "pass")
    for event in events:
        if event.k != k:
            raise PosetError("events must live on exactly the first k coordinates")
        lhs = nu_k_of_event(omega, k, event)
        for images in adjacent_transpositions(event.order):
            rhs = nu_k_of_event(omega, k, event.permuted(images))
            report.comparisons += 1
            if lhs != rhs:
                report.verdict = "fail"
                report.witnesses.append(Witness(str(event), images, lhs, rhs, lhs - rhs))
    return report


# ---------------------------------------------------------------------------
# Monte Carlo


def _sample_chunk(task):
    kernel, n, seed, index, count = task
    rng = seed_stream(seed, index)
    return [trajectory(kernel, n, rng) for _ in range(count)]


def sample_prefixes(kernel: GrowthKernel, count: int, n: int, seed: int, jobs: int = 1) -> list[OmegaPrefix]:
    """``count`` trajectories of length n; chunk c uses stream ``seed_stream(seed, c)``."""
    tasks = [(kernel, n, seed, index, size) for index, _, size in chunks(count)]
    out = []
    for part in parallel_map(_sample_chunk, tasks, jobs):
        out.extend(part)
    return out


def count_events(omegas: Sequence[OmegaPrefix], events: Sequence[BasicEvent]) -> list[int]:
    """Occurrences of each event, looking events up by their induced order first."""
    groups = defaultdict(list)
    for i, e in enumerate(events):
        groups[(e.k, e.order.down)].append(i)
    ks = sorted({e.k for e in events})
    counts = [0] * len(events)
    for w in omegas:
        for k in ks:
            mask = (1 << k) - 1
            key = (k, tuple(d & mask for d in w.downs[:k]))
            for i in groups.get(key, ()):
                if all(x in b for x, b in zip(w.labels, events[i].bins)):
                    counts[i] += 1
    return counts


def bonferroni_z(comparisons: int, alpha: float = ALPHA) -> float:
    return max(MIN_Z, float(norm.isf(alpha / (2 * max(comparisons, 1)))))


def check_invariance_binned(kernel: GrowthKernel, events: Sequence[BasicEvent], samples: int = 10**5,
                            seed: int = 0, jobs: int = 1, max_witnesses: int = 10) -> InvarianceReport:
    """Monte Carlo comparison of mu(E) and mu(lam E) for every linear extension lam."""
    pairs = []
    family: dict[BasicEvent, int] = {}

    def index(e):
        return family.setdefault(e, len(family))

    for e in events:
        for images in linear_extensions_of(e.order)[1:]:
            other = e.permuted(images)
            if other != e:
                pairs.append((e, images, index(e), index(other)))
        index(e)
    rgo = isinstance(kernel, RandomGraphOrder)
    comparisons = len(pairs) + (len(events) if rgo else 0)
    z = bonferroni_z(comparisons)
    n = max(e.k for e in events)
    omegas = sample_prefixes(kernel, samples, n, seed, jobs)
    ordered = sorted(family, key=family.get)
    freq = [c / samples for c in count_events(omegas, ordered)]
    report = InvarianceReport("invariance-binned", "pass", comparisons=comparisons,
                              samples=samples, threshold=z)
    report.notes.append("statistical procedure: Bonferroni-corrected standard errors (artifact choice)")
    inconclusive = 0
    scored = []
    for e, images, i, j in pairs:
        p1, p2 = freq[i], freq[j]
        if p1 + p2 == 0:
            inconclusive += 1
            continue
        se = sqrt((p1 + p2 - (p1 - p2) ** 2) / samples)
        score = float("inf") if se == 0 else abs(p1 - p2) / se
        scored.append((score, Witness(str(e), images, p1, p2, p1 - p2, se)))
    if rgo:
        for e in events:
            target = rgo_event_probability(kernel, e)
            p = freq[family[e]]
            se = sqrt(float(target) * (1 - float(target)) / samples)
            if se == 0:
                score = 0.0 if p == float(target) else float("inf")
            else:
                score = abs(p - float(target)) / se
            scored.append((score, Witness(str(e) + " vs analytic", tuple(range(e.k)), p, float(target),
                                          p - float(target), se)))
    scored.sort(key=lambda t: -t[0])
    failing = [w for s, w in scored if s > z]
    if failing:
        report.verdict = "fail"
        report.witnesses = failing[:max_witnesses]
    elif inconclusive == len(pairs) and not rgo and pairs:
        report.verdict = "inconclusive"
    if inconclusive:
        report.notes.append(f"{inconclusive} comparisons had no occurrences and were skipped")
    return report


def rgo_event_probability(kernel: RandomGraphOrder, event: BasicEvent):
    """|B_1| ... |B_k| p**c (1-p)**b with |B| the label-law mass of each bin."""
    if any(isinstance(b, Atom) for b in event.bins):
        return Fraction(0)
    mass = Fraction(1)
    for b in event.bins:
        mass *= kernel.rho.mass(b.lo, b.hi)
    c, b = cover_counts(event.order)
    p = as_fraction(kernel.p)
    return mass * p**c * (1 - p) ** b


def order_frequencies(omegas: Sequence[OmegaPrefix], k: int) -> Counter:
    """How often each induced order on the first k elements occurs."""
    mask = (1 << k) - 1
    return Counter(tuple(d & mask for d in w.downs[:k]) for w in omegas)


def stem_events(kernel: FixedPosetKernel, k: int) -> list[BasicEvent]:
    """Atom events for every reachable stem of length k."""
    return [stem_event(kernel.gen, stem) for stem, _ in sorted(reachable_stems(kernel, k, STEM_CAP))]
