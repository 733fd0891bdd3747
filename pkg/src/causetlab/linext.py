"""Exact linear-extension counting, enumeration, sampling and position laws.

Counting runs over the lattice of down-sets.  Elements with identical
down-sets and up-sets ("twins") are interchangeable, so the lattice is
built on twin classes and a state is a vector of how many members of each
class have been placed.  Every compressed path stands for the same number
``prod(m_i!)`` of linear extensions, which keeps antichain-heavy posets
cheap.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from fractions import Fraction
from math import factorial, prod

import numpy as np

from .poset import FinitePoset, LatticeOverflow, PosetError, bits, max_n

DEFAULT_ENUMERATION_CAP = 10**6


class ExtensionLattice:
    """Down-set lattice of ``P`` on twin classes, with path counts both ways.

    ``marks`` are extra element masks; classes are split so that every
    class lies entirely inside or outside each mark.
    """

    def __init__(self, P: FinitePoset, marks: Sequence[int] = (), state_cap: int | None = None):
        self.P = P
        groups: dict[tuple, list[int]] = {}
        for x in range(P.n):
            signature = (P.down[x], P.up[x], tuple(m >> x & 1 for m in marks))
            groups.setdefault(signature, []).append(x)
        self.classes = [tuple(g) for g in groups.values()]
        self.sizes = [len(g) for g in self.classes]
        class_of = [0] * P.n
        for c, members in enumerate(self.classes):
            for x in members:
                class_of[x] = c
        self.class_of = class_of
        # classes that must be full before class c may start
        self.below = [tuple(sorted({class_of[y] for y in bits(P.down[g[0]])}))
                      for g in self.classes]
        cap = 2 ** (max_n() if state_cap is None else state_cap)
        self._build(cap)

    def _build(self, cap: int):
        k = len(self.classes)
        start = (0,) * k
        forward = {start: 1}
        levels = [[start]]
        total = 1
        for _ in range(self.P.n):
            nxt: dict[tuple, int] = {}
            for state in levels[-1]:
                w = forward[state]
                for c in self.addable(state):
                    s2 = state[:c] + (state[c] + 1,) + state[c + 1:]
                    nxt[s2] = nxt.get(s2, 0) + w
            total += len(nxt)
            if total > cap:
                raise LatticeOverflow(f"down-set lattice exceeds {cap} states")
            forward.update(nxt)
            levels.append(sorted(nxt))
        backward = {}
        for level in reversed(levels):
            for state in level:
                succ = [self.step(state, c) for c in self.addable(state)]
                backward[state] = sum(backward[s] for s in succ) if succ else 1
        self.levels = levels
        self.forward = forward
        self.backward = backward
        self.paths = backward[start]

    def addable(self, state: tuple[int, ...]) -> list[int]:
        return [c for c, (have, size) in enumerate(zip(state, self.sizes))
                if have < size and all(state[b] == self.sizes[b] for b in self.below[c])]

    @staticmethod
    def step(state: tuple[int, ...], c: int) -> tuple[int, ...]:
        return state[:c] + (state[c] + 1,) + state[c + 1:]

    @property
    def start(self) -> tuple[int, ...]:
        return (0,) * len(self.classes)

    @property
    def multiplicity(self) -> int:
        return prod(factorial(m) for m in self.sizes)

    def count(self) -> int:
        return self.paths * self.multiplicity

    def state_count(self) -> int:
        return len(self.forward)


def count_extensions(P: FinitePoset) -> int:
    if P.n == 0:
        return 1
    return ExtensionLattice(P).count()


class SubsetCounter:
    """``e(mask)``: linear extensions of the subposet induced on any subset.

    Memoised recursion peeling maximal elements; no twin compression.  Used
    where many subsets of one small poset are needed, and as a second route
    for cross-checks against :class:`ExtensionLattice`.
    """

    def __init__(self, P: FinitePoset):
        self.P = P
        self.memo = {0: 1}

    def __call__(self, mask: int) -> int:
        memo = self.memo
        if mask in memo:
            return memo[mask]
        up = self.P.up
        stack = [mask]
        while stack:
            m = stack[-1]
            if m in memo:
                stack.pop()
                continue
            pending = []
            total = 0
            for x in bits(m):
                if up[x] & m == 0:
                    sub = m & ~(1 << x)
                    if sub in memo:
                        total += memo[sub]
                    else:
                        pending.append(sub)
            if pending:
                stack.extend(pending)
            else:
                memo[m] = total
                stack.pop()
        return memo[mask]


def enumerate_extensions(P: FinitePoset, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple[int, ...]]:
    """Every linear extension once, in lexicographic order."""
    total = count_extensions(P)
    if total > cap:
        raise PosetError(f"e(P)={total} exceeds enumeration cap {cap}")
    prefix: list[int] = []
    full = P.full

    def rec(placed: int):
        if placed == full:
            yield tuple(prefix)
            return
        for x in bits(full & ~placed):
            if P.down[x] & ~placed == 0:
                prefix.append(x)
                yield from rec(placed | (1 << x))
                prefix.pop()

    yield from rec(0)


def randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in ``[0, n)`` for arbitrarily large ``n``."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n <= 2**62:
        return int(rng.integers(n))
    nbits = n.bit_length()
    words = (nbits + 31) // 32
    while True:
        value = 0
        for w in rng.integers(0, 2**32, size=words, dtype=np.uint64):
            value = (value << 32) | int(w)
        value >>= words * 32 - nbits
        if value < n:
            return value


def sample_uniform_extension(P: FinitePoset, rng: np.random.Generator,
                             lattice: ExtensionLattice | None = None) -> tuple[int, ...]:
    """Exactly uniform linear extension by count-weighted sequential choice."""
    L = lattice if lattice is not None else ExtensionLattice(P)
    state = L.start
    sequence = []
    for _ in range(P.n):
        options = [(c, L.step(state, c)) for c in L.addable(state)]
        r = randbelow(rng, L.backward[state])
        for c, s2 in options:
            r -= L.backward[s2]
            if r < 0:
                break
        sequence.append(c)
        state = s2
    # members of a class fill that class's slots in uniformly random order
    queues = {c: list(rng.permutation(members)) for c, members in enumerate(L.classes)}
    return tuple(int(queues[c].pop()) for c in sequence)


def stem_probability(P: FinitePoset, stem: Sequence[int]) -> Fraction:
    """Proportion of linear extensions beginning with ``stem``."""
    if len(set(stem)) != len(stem):
        raise PosetError("stem elements must be distinct")
    placed = 0
    for x in stem:
        if P.down[x] & ~placed:
            return Fraction(0)
        placed |= 1 << x
    return Fraction(count_extensions(P.remove(placed)), count_extensions(P))


def bottom_probability(P: FinitePoset, x: int) -> Fraction:
    return stem_probability(P, (x,))


def position_distribution(P: FinitePoset, lattice: ExtensionLattice | None = None) -> list[list[Fraction]]:
    """``r[i][x]``: probability that element x sits at position i (0-based)."""
    L = lattice if lattice is not None else ExtensionLattice(P)
    counts = [[0] * len(L.classes) for _ in range(P.n)]
    for i, level in enumerate(L.levels[:-1]):
        for state in level:
            w = L.forward[state]
            for c in L.addable(state):
                counts[i][c] += w * L.backward[L.step(state, c)]
    r = [[Fraction(0)] * P.n for _ in range(P.n)]
    for i in range(P.n):
        for c, members in enumerate(L.classes):
            value = Fraction(counts[i][c], L.paths * len(members))
            for x in members:
                r[i][x] = value
    return r


def prefix_membership_probability(P: FinitePoset, x: int, k: int,
                                  lattice: ExtensionLattice | None = None) -> Fraction:
    """Probability that x is among the bottom k elements of a uniform extension."""
    if not 0 <= k <= P.n:
        raise PosetError("k out of range")
    L = lattice if lattice is not None else ExtensionLattice(P)
    c = L.class_of[x]
    size = L.sizes[c]
    total = 0
    for state in L.levels[k]:
        total += L.forward[state] * L.backward[state] * state[c]
    return Fraction(total, L.paths * size)


def initial_segment_distribution(P: FinitePoset, m: int,
                                 lattice: ExtensionLattice | None = None) -> dict[tuple[int, ...], Fraction]:
    """Law of the first ``m`` elements of a uniformly random linear extension."""
    L = lattice if lattice is not None else ExtensionLattice(P)
    m = min(m, P.n)
    out: dict[tuple[int, ...], Fraction] = {}

    def rec(state, placed, stem, prob):
        if len(stem) == m:
            out[tuple(stem)] = prob
            return
        here = L.backward[state]
        for c in L.addable(state):
            s2 = L.step(state, c)
            remaining = [x for x in L.classes[c] if not placed >> x & 1]
            p_class = prob * Fraction(L.backward[s2], here) / len(remaining)
            for x in remaining:
                stem.append(x)
                rec(s2, placed | (1 << x), stem, p_class)
                stem.pop()

    rec(L.start, 0, [], Fraction(1))
    return out


def bottom_set_distribution(P: FinitePoset, k: int) -> dict[int, Fraction]:
    """Law of the set of the bottom k elements, for every down-set of size k."""
    counter = SubsetCounter(P)
    total = counter(P.full)
    out = {}
    level = {0}
    for _ in range(k):
        level = {D | (1 << x) for D in level for x in bits(P.full & ~D) if P.down[x] & ~D == 0}
    for D in sorted(level):
        out[D] = Fraction(counter(D) * counter(P.full & ~D), total)
    return out


def bottom_subset_probability(P: FinitePoset, k: int, allowed: int) -> Fraction:
    """Probability that the bottom k elements all lie in ``allowed``."""
    L = ExtensionLattice(P, marks=(allowed,))
    inside = [c for c, members in enumerate(L.classes) if allowed >> members[0] & 1]
    outside = [c for c in range(len(L.classes)) if c not in inside]
    total = 0
    for state in L.levels[min(k, P.n)]:
        if all(state[c] == 0 for c in outside):
            total += L.forward[state] * L.backward[state]
    return Fraction(total, L.paths)


def superset_in_prefix_probability(P: FinitePoset, required: int, q: int) -> Fraction:
    """Probability that every element of ``required`` is among the bottom q."""
    if q >= P.n:
        return Fraction(1)
    L = ExtensionLattice(P, marks=(required,))
    need = [c for c, members in enumerate(L.classes) if required >> members[0] & 1]
    total = 0
    for state in L.levels[q]:
        if all(state[c] == L.sizes[c] for c in need):
            total += L.forward[state] * L.backward[state]
    return Fraction(total, L.paths)
