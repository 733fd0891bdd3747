"""Empirical probes of extremality: nu^n convergence traces, persistent
elements, antichain-layer structure and the Polya urn limit law."""

from __future__ import annotations

import io
import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import numpy as np
from scipy.stats import kstest

from .growth import ChainWithMarks, FixedPosetKernel, GrowthKernel, IidAntichain, OmegaPrefix, RandomGraphOrder, trajectory
from .invariance import Atom, BasicEvent, exact_event_probability, nu_k_of_event, rgo_event_probability, sample_prefixes
from .linext import ExtensionLattice, prefix_membership_probability
from .poset import LatticeOverflow, bits
from .seeding import chunks, parallel_map, seed_stream

log = logging.getLogger(__name__)

KS_ALPHA = 1e-3


@dataclass
class ConvergenceTrace:
    event: str
    k: int
    values: list[tuple[int, Fraction]] = field(default_factory=list)
    target: object = None
    truncated_at: int | None = None

    def final_error(self) -> float | None:
        if self.target is None or not self.values:
            return None
        return abs(float(self.values[-1][1]) - float(self.target))

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("n,value,target,abs_error\n")
        for n, v in self.values:
            if self.target is None:
                out.write(f"{n},{float(v)!r},,\n")
            else:
                out.write(f"{n},{float(v)!r},{float(self.target)!r},{abs(float(v) - float(self.target))!r}\n")
        return out.getvalue()


def event_target(kernel: GrowthKernel, event: BasicEvent):
    """mu(E) when it is known in closed form or exactly, else None."""
    if isinstance(kernel, FixedPosetKernel):
        return exact_event_probability(kernel, event)
    if isinstance(kernel, RandomGraphOrder):
        return rgo_event_probability(kernel, event)
    if isinstance(kernel, IidAntichain):
        if any(isinstance(b, Atom) for b in event.bins) or any(event.order.down):
            return Fraction(0)
        mass = Fraction(1)
        for b in event.bins:
            mass *= kernel.rho.mass(b.lo, b.hi)
        return mass
    return None


def essentiality_trace(kernel: GrowthKernel, event: BasicEvent, k: int, n_max: int, seed=0,
                       checkpoints: Sequence[int] | None = None, omega: OmegaPrefix | None = None) -> ConvergenceTrace:
    """nu^n(E)(omega) along one trajectory, exactly, for n from k to n_max.

    Stops early (with a warning) once Pi_n outgrows the lattice cap.
    """
    if checkpoints is None:
        checkpoints = range(max(k, event.k), n_max + 1)
    omega = omega if omega is not None else trajectory(kernel, n_max, seed)
    trace = ConvergenceTrace(str(event), k, target=event_target(kernel, event))
    for n in checkpoints:
        try:
            trace.values.append((n, nu_k_of_event(omega, n, event)))
        except LatticeOverflow:
            log.warning("lattice cap reached at n=%d; trace truncated", n)
            trace.truncated_at = n
            break
    return trace


def doubling_checkpoints(n_max: int, start: int = 8) -> list[int]:
    points = []
    n = start
    while n < n_max:
        points.append(n)
        n *= 2
    points.append(n_max)
    return points


@dataclass
class PersistenceProfile:
    k: int
    threshold: float
    checkpoints: list[int]
    curves: dict[float, list[Fraction]]
    persistent: set[float]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("label,n,value,persistent\n")
        for z in sorted(self.curves):
            for n, v in zip(self.checkpoints, self.curves[z]):
                out.write(f"{z!r},{n},{float(v)!r},{int(z in self.persistent)}\n")
        return out.getvalue()


def persistence_profile(omega: OmegaPrefix, k: int, threshold: float = 0.05, candidates: int | None = None,
                        checkpoints: Sequence[int] | None = None) -> PersistenceProfile:
    """Curves n -> nu^n(G(z, k))(omega) for the first elements of omega.

    A candidate is classified persistent when every value over the later
    half of the checkpoints is at least ``threshold`` (a finite stand-in for
    a positive liminf).
    """
    checkpoints = list(checkpoints or doubling_checkpoints(omega.n))
    if len(checkpoints) < 3:
        raise ValueError("need at least three checkpoints")
    first = checkpoints[0]
    m = min(candidates or k, first)
    curves: dict[float, list[Fraction]] = {omega.labels[z]: [] for z in range(m)}
    used = []
    for n in checkpoints:
        try:
            L = ExtensionLattice(omega.order(n))
        except LatticeOverflow:
            log.warning("lattice cap reached at n=%d; profile truncated", n)
            break
        used.append(n)
        for z in range(m):
            curves[omega.labels[z]].append(prefix_membership_probability(L.P, z, min(k, n), L))
    tail = max(2, (len(used) + 1) // 2)
    persistent = {z for z, curve in curves.items() if curve and min(curve[-tail:]) >= threshold}
    return PersistenceProfile(k, threshold, used, curves, persistent)


# ---------------------------------------------------------------------------
# antichain layers


ALL = "all"  # reference set meaning "every label"


def reference_v(kernel: GrowthKernel, k: int):
    """Ground-truth persistent labels when the kernel makes them explicit."""
    if isinstance(kernel, ChainWithMarks):
        return kernel.spine(max(k, len(kernel.p)))
    if isinstance(kernel, IidAntichain):
        return set()
    if isinstance(kernel, FixedPosetKernel):
        return ALL
    raise ValueError("no built-in reference set for this kernel; pass V explicitly")


@dataclass
class StructureReport:
    k: int
    eps: float
    samples: int
    violations: int
    layers: dict[tuple, int]

    @property
    def frequency(self) -> float:
        return self.violations / self.samples

    @property
    def se(self) -> float:
        f = self.frequency
        return sqrt(f * (1 - f) / self.samples)

    @property
    def passed(self) -> bool:
        return self.frequency <= self.eps + 4 * self.se

    def to_dict(self) -> dict:
        return {"check": "structure", "k": self.k, "eps": self.eps, "samples": self.samples,
                "violations": self.violations, "frequency": self.frequency, "se": self.se,
                "layers": [{"down_set": list(key), "count": c} for key, c in sorted(self.layers.items())],
                "verdict": "pass" if self.passed else "fail"}


def structure_check(kernel: GrowthKernel, k: int, eps: float, samples: int, seed: int = 0, V=None,
                    jobs: int = 1) -> StructureReport:
    """Frequency with which the first k elements hold a comparable pair outside V.

    A sample passes exactly when every element outside V has its down-set
    inside V; such elements are tallied into layers Gamma_D by D's labels.
    """
    if V is None:
        V = reference_v(kernel, k)
    omegas = sample_prefixes(kernel, samples, k, seed, jobs)
    violations = 0
    layers: Counter = Counter()
    for w in omegas:
        inside = (lambda i: True) if V == ALL else (lambda i: w.labels[i] in V)
        outside = [i for i in range(k) if not inside(i)]
        out_mask = sum(1 << i for i in outside)
        if any(w.downs[j] & out_mask for j in outside):
            violations += 1
        for j in outside:
            layers[tuple(sorted(w.labels[i] for i in bits(w.downs[j])))] += 1
    return StructureReport(k, eps, samples, violations, dict(layers))


# ---------------------------------------------------------------------------
# Polya urn


@dataclass
class KSReport:
    statistic: float
    pvalue: float
    n_traj: int
    traj_len: int
    alpha: float = KS_ALPHA
    mean: float = 0.0

    @property
    def critical_value(self) -> float:
        return 1.95 / sqrt(self.n_traj)

    @property
    def passed(self) -> bool:
        return self.pvalue > self.alpha

    def to_dict(self) -> dict:
        return {"check": "polya-limit", "statistic": self.statistic, "pvalue": self.pvalue,
                "critical_value": self.critical_value, "alpha": self.alpha, "n_traj": self.n_traj,
                "traj_len": self.traj_len, "mean": self.mean,
                "verdict": "pass" if self.passed else "fail"}


def _urn_chunk(task):
    seed, index, count, traj_len, q = task
    rng = seed_stream(seed, index)
    m = np.zeros(count, dtype=np.int64)
    for n in range(traj_len):
        p_b = (m + 1) / (n + 2) if q is None else q
        m += rng.random(count) < p_b
    return m


def urn_counts(n_traj: int, traj_len: int, seed: int = 0, q: float | None = None, jobs: int = 1) -> np.ndarray:
    """Number of B-elements after traj_len steps; q=None is the urn, else two-chains-q."""
    tasks = [(seed, index, size, traj_len, q) for index, _, size in chunks(n_traj)]
    return np.concatenate(parallel_map(_urn_chunk, tasks, jobs))


def polya_limit_test(n_traj: int, traj_len: int, seed: int = 0, q: float | None = None,
                     jobs: int = 1) -> KSReport:
    """KS test of the B-fraction at traj_len against uniform(0, 1)."""
    if traj_len < 1:
        raise ValueError("traj_len must be positive")
    chi = urn_counts(n_traj, traj_len, seed, q, jobs) / traj_len
    result = kstest(chi, "uniform")
    return KSReport(float(result.statistic), float(result.pvalue), n_traj, traj_len, mean=float(chi.mean()))
