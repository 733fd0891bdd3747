"""Finite strict partial orders on index sets, stored as bit rows.

Elements are ``0 .. n-1``.  ``down[i]`` is the bitmask of elements strictly
below ``i`` and ``up[i]`` the bitmask of elements strictly above it.  The
relation is always kept transitively closed.  The text format and the CLI
count elements from 1.
"""

from __future__ import annotations

import os
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations

DEFAULT_MAX_N = 22


def max_n() -> int:
    """Lattice cap; ``CAUSETLAB_MAX_N`` overrides the default of 22."""
    value = os.environ.get("CAUSETLAB_MAX_N")
    return int(value) if value else DEFAULT_MAX_N


class PosetError(ValueError):
    pass


class LatticeOverflow(PosetError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


@dataclass(frozen=True)
class FinitePoset:
    n: int
    down: tuple[int, ...]
    labels: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.down) != self.n:
            raise PosetError("down rows do not match n")
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise PosetError("labels do not match n")
            if len(set(self.labels)) != self.n:
                raise PosetError("labels must be pairwise distinct")

    @cached_property
    def up(self) -> tuple[int, ...]:
        rows = [0] * self.n
        for j, below in enumerate(self.down):
            for i in bits(below):
                rows[i] |= 1 << j
        return tuple(rows)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def less(self, i: int, j: int) -> bool:
        return bool(self.down[j] >> i & 1)

    def comparable(self, i: int, j: int) -> bool:
        return self.less(i, j) or self.less(j, i)

    def relations(self) -> list[tuple[int, int]]:
        return [(i, j) for j in range(self.n) for i in bits(self.down[j])]

    @property
    def is_standard(self) -> bool:
        """True when ``i < j`` in the order implies ``i < j`` as integers."""
        return all(self.down[j] >> j == 0 for j in range(self.n))

    def is_down_set(self, mask: int) -> bool:
        return all(self.down[i] & ~mask == 0 for i in bits(mask))

    def is_up_set(self, mask: int) -> bool:
        return all(self.up[i] & ~mask == 0 for i in bits(mask))

    def with_labels(self, labels: Sequence[float] | None) -> FinitePoset:
        return FinitePoset(self.n, self.down, None if labels is None else tuple(labels))

    def restrict(self, mask: int) -> FinitePoset:
        """Induced subposet on ``mask``, elements renumbered in increasing order."""
        keep = list(bits(mask))
        index = {e: k for k, e in enumerate(keep)}
        down = tuple(mask_of(index[i] for i in bits(self.down[e] & mask)) for e in keep)
        labels = None if self.labels is None else tuple(self.labels[e] for e in keep)
        return FinitePoset(len(keep), down, labels)

    def remove(self, mask: int) -> FinitePoset:
        return self.restrict(self.full & ~mask)

    def key(self) -> tuple[int, tuple[int, ...]]:
        return self.n, self.down

    def __str__(self) -> str:
        return format_poset(self)


def transitive_closure(pairs: Iterable[tuple[int, int]], n: int,
                       labels: Sequence[float] | None = None) -> FinitePoset:
    """Smallest strict order containing ``pairs`` (``(i, j)`` means i < j)."""
    direct = [0] * n
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise PosetError(f"pair ({i}, {j}) outside [0, {n})")
        if i == j:
            raise PosetError(f"pair ({i}, {i}) is reflexive")
        direct[j] |= 1 << i
    down = [0] * n
    state = [0] * n  # 0 new, 1 on stack, 2 done
    for root in range(n):
        if state[root]:
            continue
        stack = [(root, iter(list(bits(direct[root]))))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            child = next(it, None)
            if child is None:
                stack.pop()
                acc = 0
                for c in bits(direct[node]):
                    acc |= down[c] | (1 << c)
                down[node] = acc
                state[node] = 2
            elif state[child] == 1:
                raise PosetError(f"cycle through element {child}")
            elif state[child] == 0:
                state[child] = 1
                stack.append((child, iter(list(bits(direct[child])))))
    return FinitePoset(n, tuple(down), None if labels is None else tuple(labels))


def from_down_sets(down: Sequence[int], labels: Sequence[float] | None = None) -> FinitePoset:
    """Build a poset from rows that are already transitively closed."""
    P = FinitePoset(len(down), tuple(down), None if labels is None else tuple(labels))
    for j in range(P.n):
        for i in bits(P.down[j]):
            if P.down[j] | P.down[i] != P.down[j]:
                raise PosetError("rows are not transitively closed")
            if i == j:
                raise PosetError("relation is not irreflexive")
    return P


def chain(n: int) -> FinitePoset:
    return FinitePoset(n, tuple((1 << i) - 1 for i in range(n)))


def antichain(n: int) -> FinitePoset:
    return FinitePoset(n, (0,) * n)


def covering_pairs(P: FinitePoset) -> list[tuple[int, int]]:
    covers = []
    for j in range(P.n):
        below = P.down[j]
        # i is covered by j iff no element strictly between them
        between = 0
        for i in bits(below):
            between |= P.down[i]
        covers.extend((i, j) for i in bits(below & ~between))
    return covers


def cover_counts(P: FinitePoset) -> tuple[int, int]:
    """Return ``(c, b)``: covering pairs and unordered incomparable pairs."""
    c = len(covering_pairs(P))
    related = sum(bin(d).count("1") for d in P.down)
    b = P.n * (P.n - 1) // 2 - related
    return c, b


def minimal_elements(P: FinitePoset, removed: int = 0) -> list[int]:
    if not P.is_down_set(removed):
        raise PosetError("removed set is not a down-set")
    rest = P.full & ~removed
    return [x for x in bits(rest) if P.down[x] & rest == 0]


def maximal_elements(P: FinitePoset, mask: int | None = None) -> list[int]:
    if mask is None:
        mask = P.full
    return [x for x in bits(mask) if P.up[x] & mask == 0]


def apply_permutation(P: FinitePoset, images: Sequence[int]) -> FinitePoset:
    """Order with ``i < j`` iff ``images[i] < images[j]`` in P.

    ``images`` is a bijection of ``range(n)``; labels follow the permutation.
    """
    n = P.n
    if sorted(images) != list(range(n)):
        raise PosetError("images is not a permutation")
    inverse = [0] * n
    for i, v in enumerate(images):
        inverse[v] = i
    down = tuple(mask_of(inverse[a] for a in bits(P.down[images[i]])) for i in range(n))
    labels = None if P.labels is None else tuple(P.labels[v] for v in images)
    return FinitePoset(n, down, labels)


def is_linear_extension(P: FinitePoset, order: Sequence[int]) -> bool:
    if sorted(order) != list(range(P.n)):
        return False
    seen = 0
    for x in order:
        if P.down[x] & ~seen:
            return False
        seen |= 1 << x
    return True


def enumerate_down_sets(P: FinitePoset, cap: int | None = None) -> Iterator[int]:
    """Every down-set once, by size and then by mask value."""
    cap = max_n() if cap is None else cap
    if P.n > cap:
        raise LatticeOverflow(
            f"n={P.n} exceeds cap {cap}; the lattice may hold up to 2**{P.n} down-sets")
    level = [0]
    while level:
        yield from level
        nxt = set()
        for D in level:
            for x in bits(P.full & ~D):
                if P.down[x] & ~D == 0:
                    nxt.add(D | (1 << x))
        level = sorted(nxt)


def canonical_form(P: FinitePoset) -> tuple[int, tuple[int, ...]]:
    """Minimum relabelled row tuple over all linear extensions (n <= 9)."""
    if P.n > 9:
        raise PosetError("canonical form restricted to n <= 9")
    best = None
    for order in _linear_extensions(P):
        rank = [0] * P.n
        for pos, x in enumerate(order):
            rank[x] = pos
        rows = tuple(mask_of(rank[a] for a in bits(P.down[x])) for x in order)
        if best is None or rows < best:
            best = rows
    return P.n, best if best is not None else ()


def isomorphic(P: FinitePoset, Q: FinitePoset) -> bool:
    return canonical_form(P) == canonical_form(Q)


def _linear_extensions(P: FinitePoset) -> Iterator[tuple[int, ...]]:
    prefix: list[int] = []

    def rec(placed: int):
        if placed == P.full:
            yield tuple(prefix)
            return
        for x in bits(P.full & ~placed):
            if P.down[x] & ~placed == 0:
                prefix.append(x)
                yield from rec(placed | (1 << x))
                prefix.pop()

    yield from rec(0)


def standard_suborders(n: int) -> Iterator[FinitePoset]:
    """All suborders of [n]: posets on range(n) with the integer order as extension.

    Each arises exactly once by adding element k as a new maximal element
    above one down-set of the order on the first k elements.
    """
    if n == 0:
        yield FinitePoset(0, ())
        return
    for P in standard_suborders(n - 1):
        for D in enumerate_down_sets(P):
            yield FinitePoset(n, P.down + (D,))


def all_posets(n: int) -> list[FinitePoset]:
    """One representative per isomorphism class of n-element posets."""
    seen = {}
    for P in standard_suborders(n):
        seen.setdefault(canonical_form(P), P)
    return [seen[k] for k in sorted(seen)]


def brute_force_extensions(P: FinitePoset) -> list[tuple[int, ...]]:
    return [p for p in permutations(range(P.n)) if is_linear_extension(P, p)]


def parse_poset(text: str) -> FinitePoset:
    """Parse ``n=<int>`` then ``i<j`` lines and optional ``label i <x>`` lines."""
    n = None
    pairs = []
    labels = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("n="):
                n = int(line[2:])
            elif line.startswith("label"):
                _, i, value = line.split()
                labels[int(i) - 1] = float(value)
            else:
                i, j = line.split("<")
                pairs.append((int(i) - 1, int(j) - 1))
        except ValueError as exc:
            raise PosetError(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise PosetError("missing 'n=<int>' header")
    label_seq = None
    if labels:
        if sorted(labels) != list(range(n)):
            raise PosetError("labels must be given for every element or none")
        label_seq = [labels[i] for i in range(n)]
    return transitive_closure(pairs, n, label_seq)


def format_poset(P: FinitePoset) -> str:
    lines = [f"n={P.n}"]
    lines += [f"{i + 1}<{j + 1}" for i, j in sorted(covering_pairs(P))]
    if P.labels is not None:
        lines += [f"label {i + 1} {x!r}" for i, x in enumerate(P.labels)]
    return "\n".join(lines) + "\n"
