"""Causet processes: states, one-point-extension kernels and trajectories.

A state is a label string ``x_1..x_k`` together with a suborder of the
index set; a transition appends a label and the down-set of the new,
maximal element.  Fixed-poset kernels choose the next element among the
minimal elements of what is left of a fixed causal set; their single
states carry positive probability, so stem probabilities are exact.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .exact import PHI
from .models import CausalSetGenerator, dary_tree, hash_label, parse_model
from .poset import FinitePoset, PosetError, bits, cover_counts, mask_of
from .seeding import seed_stream

log = logging.getLogger(__name__)


def as_fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


# ---------------------------------------------------------------------------
# label distributions


@dataclass(frozen=True)
class LabelDistribution:
    """Piecewise-uniform law on [0, 1] with rational breakpoints (atomless)."""

    pieces: tuple[tuple[Fraction, Fraction, Fraction], ...] = ((Fraction(0), Fraction(1), Fraction(1)),)

    def __post_init__(self):
        total = Fraction(0)
        for lo, hi, w in self.pieces:
            if not 0 <= lo < hi <= 1 or w < 0:
                raise ValueError(f"bad piece ({lo}, {hi}, {w})")
            total += w
        if total != 1:
            raise ValueError("piece weights must sum to 1")

    @classmethod
    def uniform(cls, a=0, b=1) -> LabelDistribution:
        return cls(((as_fraction(a), as_fraction(b), Fraction(1)),))

    @classmethod
    def mixture(cls, pieces) -> LabelDistribution:
        return cls(tuple((as_fraction(lo), as_fraction(hi), as_fraction(w)) for lo, hi, w in pieces))

    @classmethod
    def from_config(cls, cfg) -> LabelDistribution:
        if cfg is None:
            return cls.uniform()
        if "uniform" in cfg:
            return cls.uniform(*cfg["uniform"])
        return cls.mixture(cfg["pieces"])

    def config(self) -> dict:
        return {"pieces": [[str(lo), str(hi), str(w)] for lo, hi, w in self.pieces]}

    def sample(self, rng: np.random.Generator) -> float:
        u = rng.random()
        if len(self.pieces) == 1:
            lo, hi, _ = self.pieces[0]
        else:
            acc = 0.0
            for lo, hi, w in self.pieces:
                acc += float(w)
                if u < acc:
                    break
            u = rng.random()
        return float(lo) + u * float(hi - lo)

    def mass(self, lo, hi) -> Fraction:
        """Probability of the interval with endpoints lo <= hi."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        total = Fraction(0)
        for a, b, w in self.pieces:
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                total += w * overlap / (b - a)
        return total


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class GrowthState:
    labels: tuple[float, ...]
    order: FinitePoset

    def __post_init__(self):
        if self.order.n != len(self.labels):
            raise PosetError("order size does not match labels")
        if len(set(self.labels)) != len(self.labels):
            raise PosetError("labels must be pairwise distinct")
        if not self.order.is_standard:
            raise PosetError("order must be a suborder of [k]")

    @classmethod
    def empty(cls) -> GrowthState:
        return cls((), FinitePoset(0, ()))

    @property
    def k(self) -> int:
        return len(self.labels)

    def extend(self, label: float, down: int) -> GrowthState:
        if not self.order.is_down_set(down) or down >> self.k:
            raise PosetError("new element's down-set must be a down-set of the state")
        order = FinitePoset(self.k + 1, self.order.down + (down,))
        return GrowthState(self.labels + (label,), order)


@dataclass(frozen=True)
class OmegaPrefix:
    """First n coordinates of an outcome: labels and the down-set of each index."""

    labels: tuple[float, ...]
    downs: tuple[int, ...]

    def __post_init__(self):
        for k, d in enumerate(self.downs):
            if d >> k:
                raise PosetError(f"element {k + 1} is not maximal when added")
            for i in bits(d):
                if self.downs[i] & ~d:
                    raise PosetError(f"down-set of element {k + 1} is not downward closed")

    @property
    def n(self) -> int:
        return len(self.labels)

    def order(self, k: int | None = None) -> FinitePoset:
        """The induced poset on the first k elements (Pi_k), labels attached."""
        k = self.n if k is None else k
        return FinitePoset(k, self.downs[:k], self.labels[:k])

    def state(self, k: int) -> GrowthState:
        return GrowthState(self.labels[:k], FinitePoset(k, self.downs[:k]))

    def truncate(self, k: int) -> OmegaPrefix:
        return OmegaPrefix(self.labels[:k], self.downs[:k])

    def to_text(self, seed=None, kernel: dict | None = None) -> str:
        import json

        lines = ["# causetlab trajectory"]
        if seed is not None:
            lines.append(f"# seed={seed}")
        if kernel is not None:
            lines.append("# kernel=" + json.dumps(kernel, sort_keys=True))
        lines.append("k x_k D(k)")
        for k, (x, d) in enumerate(zip(self.labels, self.downs), 1):
            below = ",".join(str(i + 1) for i in bits(d)) or "-"
            lines.append(f"{k} {x!r} {below}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> OmegaPrefix:
        labels, downs = [], []
        for line in text.splitlines():
            if not line or line.startswith("#") or line.startswith("k "):
                continue
            _, x, below = line.split()
            labels.append(float(x))
            downs.append(0 if below == "-" else mask_of(int(i) - 1 for i in below.split(",")))
        return cls(tuple(labels), tuple(downs))


def closure_of(downs: Sequence[int], chosen: int) -> int:
    """Down-set generated by the elements of ``chosen``."""
    acc = 0
    for j in bits(chosen):
        acc |= downs[j] | (1 << j)
    return acc


def choose(rng: np.random.Generator, weights: Sequence) -> int:
    u = rng.random()
    acc = 0.0
    for i, w in enumerate(weights):
        acc += float(w)
        if u < acc:
            return i
    return max(i for i, w in enumerate(weights) if w)


# ---------------------------------------------------------------------------
# kernels


class GrowthKernel:
    """A transition law from k-element states to (k+1)-element states."""

    atomic = False

    def draw(self, labels: Sequence[float], downs: Sequence[int], rng) -> tuple[float, int]:
        raise NotImplementedError

    def config(self) -> dict:
        raise NotImplementedError

    def step(self, state: GrowthState, rng: np.random.Generator) -> GrowthState:
        label, down = self.draw(state.labels, state.order.down, rng)
        return state.extend(label, down)


# selection rules for fixed-poset kernels; each returns exact weights


@dataclass(frozen=True)
class LadderRule:
    """With two candidates, take the lower-numbered one with ``weight``."""

    weight: object = PHI

    def probabilities(self, gen, stem, candidates):
        if len(candidates) == 1:
            return [Fraction(1)]
        if len(candidates) != 2:
            raise PosetError("ladder rule needs at most two candidates")
        return [self.weight, 1 - self.weight]

    def config(self):
        return {"weight": "phi" if self.weight == PHI else str(self.weight)}


@dataclass(frozen=True)
class TwoChainsRule:
    """Take the candidate from chain B (even index) with probability q."""

    q: Fraction = Fraction(1, 2)

    def probabilities(self, gen, stem, candidates):
        return [self.q if x % 2 == 0 else 1 - self.q for x in candidates]

    def config(self):
        return {"q": str(self.q)}


@dataclass(frozen=True)
class PolyaUrnRule:
    """After n picks, m of them from B, take B with probability (m+1)/(n+2)."""

    def probabilities(self, gen, stem, candidates):
        m = sum(1 for x in stem if x % 2 == 0)
        p_b = Fraction(m + 1, len(stem) + 2)
        return [p_b if x % 2 == 0 else 1 - p_b for x in candidates]

    def config(self):
        return {}


@dataclass(frozen=True)
class UniformRule:
    def probabilities(self, gen, stem, candidates):
        return [Fraction(1, len(candidates))] * len(candidates)

    def config(self):
        return {}


LW_MAX_SIZE = 8


@dataclass(frozen=True)
class LWRule:
    """Grow uniformly random rooted subtrees of the complete d-ary tree.

    Transitions from size-n to size-(n+1) subtrees come from an integral
    max-flow coupling of the two uniform laws, so the marginal after every
    step is exactly uniform and the law depends only on the current set.
    """

    d: int = 2

    def probabilities(self, gen, stem, candidates):
        table = lw_transition(self.d, mask_of(stem))
        return [table.get(x, Fraction(0)) for x in candidates]

    def config(self):
        return {"d": self.d}


@dataclass(frozen=True)
class FixedPosetKernel(GrowthKernel):
    gen: CausalSetGenerator
    rule: object
    name: str = "fixed"

    atomic = True

    def transition(self, stem: Sequence[int]) -> list[tuple[int, object]]:
        """Candidates for the next element with their exact probabilities."""
        candidates = self.gen.frontier(mask_of(stem))
        return list(zip(candidates, self.rule.probabilities(self.gen, tuple(stem), candidates)))

    def stem_of(self, labels: Sequence[float]) -> list[int]:
        return [self.gen.label_index(x) for x in labels]

    def next_element(self, stem: Sequence[int], rng) -> int:
        options = self.transition(stem)
        return options[choose(rng, [p for _, p in options])][0]

    def draw(self, labels, downs, rng):
        stem = self.stem_of(labels)
        x = self.next_element(stem, rng)
        position = {e: i for i, e in enumerate(stem)}
        down = mask_of(position[y] for y in bits(self.gen.down(x)))
        return self.gen.label(x), down

    def config(self):
        cfg = {"kind": self.name}
        cfg.update(self.rule.config())
        if self.name in ("fixed", "uniform"):
            cfg["model"] = _model_name(self.gen)
        return cfg


def _model_name(gen: CausalSetGenerator) -> str:
    if gen.kind == "two_chains":
        return "two-chains"
    if gen.kind == "disjoint_chains":
        return "chains:{},{}".format(*gen.params)
    if gen.kind == "dary_tree":
        return f"dary:{gen.params[0]}"
    return gen.kind


def ladder_kernel(weight=PHI) -> FixedPosetKernel:
    from .models import ladder

    return FixedPosetKernel(ladder(), LadderRule(weight), "ladder")


def two_chains_kernel(q) -> FixedPosetKernel:
    from .models import two_chains

    return FixedPosetKernel(two_chains(), TwoChainsRule(as_fraction(q)), "two-chains")


def polya_kernel() -> FixedPosetKernel:
    from .models import two_chains

    return FixedPosetKernel(two_chains(), PolyaUrnRule(), "polya")


def lw_subtree_kernel(d: int = 2) -> FixedPosetKernel:
    return FixedPosetKernel(dary_tree(d), LWRule(d), "lw-subtree")


@dataclass(frozen=True)
class RandomGraphOrder(GrowthKernel):
    """New element above the downward closure of a p-random subset."""

    p: float = 0.5
    rho: LabelDistribution = field(default_factory=LabelDistribution)

    def draw(self, labels, downs, rng):
        label = self.rho.sample(rng)
        k = len(labels)
        if k == 0 or self.p == 0:
            return label, 0
        hits = rng.random(k) < float(self.p)
        chosen = mask_of(int(j) for j in np.flatnonzero(hits))
        return label, closure_of(downs, chosen)

    def config(self):
        return {"kind": "rgo", "p": float(self.p)}


@dataclass(frozen=True)
class Csg(GrowthKernel):
    """Classical sequential growth: P(Sigma = S) proportional to t[|S|]."""

    t: tuple = (1,)
    rho: LabelDistribution = field(default_factory=LabelDistribution)

    def weight(self, size: int):
        return self.t[size] if size < len(self.t) else 0

    def draw(self, labels, downs, rng):
        k = len(labels)
        by_size = [comb(k, s) * float(self.weight(s)) for s in range(k + 1)]
        total = sum(by_size)
        if total <= 0:
            raise PosetError("csg weights vanish on every reachable set")
        s = choose(rng, [w / total for w in by_size])
        chosen = mask_of(int(j) for j in rng.choice(k, size=s, replace=False)) if s else 0
        return self.rho.sample(rng), closure_of(downs, chosen)

    def config(self):
        return {"kind": "csg", "t": [str(v) for v in self.t]}


@dataclass(frozen=True)
class IidAntichain(GrowthKernel):
    rho: LabelDistribution = field(default_factory=LabelDistribution)

    def draw(self, labels, downs, rng):
        return self.rho.sample(rng), 0

    def config(self):
        return {"kind": "iid-antichain", "rho": self.rho.config()}


@dataclass(frozen=True)
class ChainWithMarks(GrowthKernel):
    """Spine y_1 < y_2 < ... with an antichain of W_j-labelled elements above each y_j.

    ``p`` is the strictly decreasing sequence with p[0] = 1; the spine stops
    once ``p`` is exhausted.  ``w[j]`` is the label law above y_{j+1} (the
    last one is reused when ``w`` is shorter than the spine).
    """

    p: tuple = (1,)
    w: tuple = (LabelDistribution(),)
    salt: int = 1

    def __post_init__(self):
        if not self.p or as_fraction(self.p[0]) != 1:
            raise ValueError("p must start with 1")
        if any(not (a > b > 0) for a, b in zip(self.p, self.p[1:])):
            raise ValueError("p must be strictly decreasing and positive")

    def spine_label(self, r: int) -> float:
        return hash_label(r, self.salt)

    def spine_positions(self, labels) -> list[int]:
        positions = []
        for i, x in enumerate(labels):
            if x == self.spine_label(len(positions)):
                positions.append(i)
        return positions

    def p_at(self, r: int) -> float:
        return float(self.p[r]) if r < len(self.p) else 0.0

    def options(self, r: int) -> list[float]:
        """Weights: index 0 adds the next spine element, index j adds above y_j."""
        weights = [self.p_at(r)]
        weights += [self.p_at(j - 1) - self.p_at(j) for j in range(1, r + 1)]
        return weights

    def draw(self, labels, downs, rng):
        spine = self.spine_positions(labels)
        r = len(spine)
        i = choose(rng, self.options(r))
        if i == 0:
            return self.spine_label(r), mask_of(spine)
        law = self.w[min(i - 1, len(self.w) - 1)]
        return law.sample(rng), mask_of(spine[:i])

    def spine(self, count: int) -> set[float]:
        return {self.spine_label(r) for r in range(count)}

    def config(self):
        return {"kind": "chain-with-marks", "p": [str(v) for v in self.p],
                "w": [law.config() for law in self.w]}


@dataclass(frozen=True)
class MarkedPoset(GrowthKernel):
    """Finite labelled poset Q plus marked elements produced with parameters (q, rho).

    Each mark is ``(down_mask, q, rho)``: once every element of its down-set
    is present, each step emits a rho-labelled element above exactly that
    set with probability q.  The leftover probability picks uniformly among
    the minimal ungenerated elements of Q.  If nothing is left to pick and
    ``renormalize`` is false the law is not total and stepping fails.
    """

    base: FinitePoset
    marks: tuple = ()
    renormalize: bool = False

    def __post_init__(self):
        if self.base.labels is None:
            raise ValueError("base poset needs labels")
        total = sum(as_fraction(q) for _, q, _ in self.marks)
        if total > 1:
            raise ValueError("the q(z) must sum to at most 1")
        for down, _, _ in self.marks:
            if not self.base.is_down_set(down):
                raise ValueError("mark down-set is not a down-set of the base poset")

    def options(self, labels):
        index = {x: i for i, x in enumerate(self.base.labels)}
        present = mask_of(index[x] for x in labels if x in index)
        enabled = [(i, as_fraction(q)) for i, (down, q, _) in enumerate(self.marks) if down & ~present == 0]
        rest = self.base.full & ~present
        free = [x for x in bits(rest) if self.base.down[x] & rest == 0]
        leftover = 1 - sum(q for _, q in enabled)
        out = [("mark", i, q) for i, q in enabled]
        if free:
            out += [("base", x, leftover / len(free)) for x in free]
        elif leftover > 0:
            if not self.renormalize:
                raise PosetError("transition law is not total: no base element left")
            scale = 1 / (1 - leftover)
            out = [(kind, i, q * scale) for kind, i, q in out]
        return out

    def draw(self, labels, downs, rng):
        opts = self.options(labels)
        kind, i, _ = opts[choose(rng, [q for _, _, q in opts])]
        position = {x: j for j, x in enumerate(labels)}
        if kind == "base":
            below = self.base.down[i]
            return self.base.labels[i], mask_of(position[self.base.labels[y]] for y in bits(below))
        down, _, rho = self.marks[i]
        return rho.sample(rng), mask_of(position[self.base.labels[y]] for y in bits(down))

    def config(self):
        from .poset import format_poset

        return {"kind": "marked", "poset": format_poset(self.base),
                "marks": [{"down": [y + 1 for y in bits(d)], "q": str(q), "rho": rho.config()}
                          for d, q, rho in self.marks]}


# ---------------------------------------------------------------------------
# trajectories and exact quantities


def trajectory(kernel: GrowthKernel, n: int, seed=0) -> OmegaPrefix:
    """n one-point extensions from the empty state.

    ``seed`` is an int (stream 0 of that master seed) or a numpy Generator.
    """
    rng = seed if isinstance(seed, np.random.Generator) else seed_stream(seed, 0)
    labels: list[float] = []
    downs: list[int] = []
    seen: set[float] = set()
    for _ in range(n):
        label, down = kernel.draw(labels, downs, rng)
        redraws = 0
        while label in seen:
            redraws += 1
            if redraws > 100:
                raise PosetError("label collision persists; kernel has atoms")
            log.warning("label collision at step %d; redrawing", len(labels) + 1)
            label, down = kernel.draw(labels, downs, rng)
        seen.add(label)
        labels.append(label)
        downs.append(down)
    return OmegaPrefix(tuple(labels), tuple(downs))


def exact_stem_probability(kernel: GrowthKernel, stem) -> object:
    """Probability of a stem under an atomic kernel.

    ``stem`` is a sequence of element indices of the kernel's causal set, or
    a :class:`GrowthState` whose labels name them.  Returns a Fraction or a
    PhiNumber; 0 when the sequence is not an ordered stem.
    """
    if not getattr(kernel, "atomic", False):
        raise PosetError("kernel is not atomic; use binned estimation")
    if isinstance(stem, GrowthState):
        stem = kernel.stem_of(stem.labels)
    prob = Fraction(1)
    for k, x in enumerate(stem):
        options = dict(kernel.transition(stem[:k]))
        p = options.get(x)
        if not p:
            return Fraction(0)
        prob = p * prob
    return prob


def reachable_stems(kernel: FixedPosetKernel, length: int, cap: int = 10**5):
    """All stems of exactly ``length`` with positive probability, with that probability."""
    out = []

    def rec(stem, prob):
        if len(stem) == length:
            out.append((tuple(stem), prob))
            if len(out) > cap:
                raise PosetError(f"more than {cap} stems; use Monte Carlo mode")
            return
        for x, p in kernel.transition(stem):
            if p:
                stem.append(x)
                rec(stem, p * prob)
                stem.pop()

    rec([], Fraction(1))
    return out


def rgo_order_probability(p, Q: FinitePoset):
    """p**c (1-p)**b for the covering pairs c and incomparable pairs b of Q."""
    if not Q.is_standard:
        raise PosetError("Q must be a suborder of [k]")
    c, b = cover_counts(Q)
    if p == 0:
        return 1 if c == 0 else 0
    if p == 1:
        return 1 if b == 0 else 0
    return p**c * (1 - p) ** b


def csg_step_distribution(t: Sequence, order: FinitePoset) -> dict[int, Fraction]:
    """Law of the new element's down-set when P(Sigma = S) is proportional to t[|S|]."""
    k = order.n
    if k > 16:
        raise PosetError("csg step distribution enumerates 2**k subsets; k <= 16")
    t = [as_fraction(v) for v in t]
    weight = lambda s: t[s] if s < len(t) else Fraction(0)  # noqa: E731
    total = sum(comb(k, s) * weight(s) for s in range(k + 1))
    if total == 0:
        raise PosetError("csg weights vanish on every reachable set")
    out: dict[int, Fraction] = {}
    for chosen in range(1 << k):
        w = weight(bin(chosen).count("1"))
        if w:
            D = closure_of(order.down, chosen)
            out[D] = out.get(D, Fraction(0)) + w / total
    return out


def rgo_step_distribution(p, order: FinitePoset) -> dict[int, Fraction]:
    p = as_fraction(p)
    out: dict[int, Fraction] = {}
    for chosen in range(1 << order.n):
        s = bin(chosen).count("1")
        D = closure_of(order.down, chosen)
        out[D] = out.get(D, Fraction(0)) + p**s * (1 - p) ** (order.n - s)
    return out


# ---------------------------------------------------------------------------
# uniformly growing subtrees of the d-ary tree


@lru_cache(maxsize=None)
def rooted_subtrees(d: int, size: int) -> tuple[int, ...]:
    """Masks (BFS indices) of all subtrees of the d-ary tree containing the root."""
    if size < 1:
        return ()
    if size == 1:
        return (1,)
    out = set()
    for S in rooted_subtrees(d, size - 1):
        for child in _children_outside(d, S):
            out.add(S | (1 << child))
    return tuple(sorted(out))


def _children_outside(d: int, S: int) -> list[int]:
    return [d * v + c for v in bits(S) for c in range(1, d + 1) if not S >> (d * v + c) & 1]


@lru_cache(maxsize=None)
def _lw_table(d: int, size: int) -> dict[int, dict[int, Fraction]]:
    import networkx as nx

    if size >= LW_MAX_SIZE:
        raise PosetError(f"subtree growth limited to size {LW_MAX_SIZE}")
    small = rooted_subtrees(d, size)
    large = rooted_subtrees(d, size + 1)
    supply, demand = len(large), len(small)
    G = nx.DiGraph()
    for S in small:
        G.add_edge("s", ("a", S), capacity=supply)
        for child in _children_outside(d, S):
            G.add_edge(("a", S), ("b", S | (1 << child)))
    for T in large:
        G.add_edge(("b", T), "t", capacity=demand)
    value, flow = nx.maximum_flow(G, "s", "t")
    if value != supply * demand:
        raise PosetError("no coupling of uniform subtree laws found")
    table = {}
    for S in small:
        row = {}
        for child in _children_outside(d, S):
            f = flow[("a", S)][("b", S | (1 << child))]
            if f:
                row[child] = Fraction(f, supply)
        table[S] = row
    return table


def lw_transition(d: int, subtree: int) -> dict[int, Fraction]:
    """Law of the child added to ``subtree`` (a rooted subtree mask)."""
    size = bin(subtree).count("1")
    if size == 0:
        return {0: Fraction(1)}
    return _lw_table(d, size)[subtree]


def lw_subtree_step(d: int, subtree: int, rng: np.random.Generator) -> int:
    row = sorted(lw_transition(d, subtree).items())
    child = row[choose(rng, [p for _, p in row])][0]
    return subtree | (1 << child)


# ---------------------------------------------------------------------------
# configuration


def kernel_from_config(cfg: dict) -> GrowthKernel:
    kind = cfg["kind"]
    if kind == "ladder":
        weight = cfg.get("weight", "phi")
        return ladder_kernel(PHI if weight == "phi" else as_fraction(weight))
    if kind == "two-chains":
        return two_chains_kernel(cfg.get("q", "1/2"))
    if kind == "polya":
        return polya_kernel()
    if kind == "lw-subtree":
        return lw_subtree_kernel(int(cfg.get("d", 2)))
    if kind in ("fixed", "uniform"):
        return FixedPosetKernel(parse_model(cfg["model"]), UniformRule(), "uniform")
    if kind == "rgo":
        return RandomGraphOrder(cfg["p"], LabelDistribution.from_config(cfg.get("rho")))
    if kind == "csg":
        return Csg(tuple(as_fraction(v) for v in cfg["t"]), LabelDistribution.from_config(cfg.get("rho")))
    if kind == "iid-antichain":
        return IidAntichain(LabelDistribution.from_config(cfg.get("rho")))
    if kind == "chain-with-marks":
        w = tuple(LabelDistribution.from_config(c) for c in cfg.get("w", [None]))
        return ChainWithMarks(tuple(as_fraction(v) for v in cfg["p"]), w)
    if kind == "marked":
        from .poset import parse_poset

        base = parse_poset(cfg["poset"])
        marks = tuple((mask_of(i - 1 for i in m["down"]), as_fraction(m["q"]),
                       LabelDistribution.from_config(m.get("rho"))) for m in cfg.get("marks", []))
        return MarkedPoset(base, marks, bool(cfg.get("renormalize", False)))
    raise PosetError(f"unknown kernel kind {kind!r}")


def suborders_with_probability(p, k: int):
    """(Q, p**c (1-p)**b) over all suborders Q of [k]."""
    from .poset import standard_suborders

    return [(Q, rgo_order_probability(p, Q)) for Q in standard_suborders(k)]

