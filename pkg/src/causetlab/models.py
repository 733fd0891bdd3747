"""Fixed causal sets exposed as finite prefixes ``P_n``.

Each generator enumerates its elements along a natural extension, so the
down-set of element ``i`` only uses indices below ``i`` and ``prefix(n)`` is
always the induced order on the first ``n`` elements.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

from .poset import FinitePoset, PosetError, bits, mask_of, parse_poset

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash_label(index: int, salt: int = 0) -> float:
    """Deterministic label in [0, 1) for an element index."""
    return (splitmix64(splitmix64(salt) ^ index) >> 11) * 2.0**-53


@dataclass(frozen=True)
class CausalSetGenerator:
    """A fixed causal set, enumerated along one of its natural extensions.

    ``kind`` is one of ``ladder``, ``two_chains``, ``grid``,
    ``disjoint_chains`` (params ``(m, t)``), ``dary_tree`` (params ``(d,)``)
    or ``custom`` (a finite standard poset).
    """

    kind: str
    params: tuple = ()
    poset: FinitePoset | None = None
    salt: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PosetError(f"unknown causal set kind {self.kind!r}")
        if self.kind == "custom" and (self.poset is None or not self.poset.is_standard):
            raise PosetError("custom generator needs a poset whose integer order is an extension")

    @property
    def size(self) -> int | None:
        """Number of elements, or None for infinite kinds."""
        if self.kind == "disjoint_chains":
            m, t = self.params
            return m * t
        if self.kind == "custom":
            return self.poset.n
        return None

    def down(self, i: int) -> int:
        return _down(self, i)

    def label(self, i: int) -> float:
        if self.kind == "custom" and self.poset.labels is not None:
            return self.poset.labels[i]
        return hash_label(i, self.salt)

    def name(self, i: int) -> str:
        return _name(self, i)

    def prefix(self, n: int) -> FinitePoset:
        return _prefix(self, n)

    def horizon(self, stem_mask: int) -> int:
        """A prefix length holding every minimal element outside the stem."""
        top = stem_mask.bit_length() - 1
        kind = self.kind
        if kind in ("ladder", "two_chains"):
            n = top + 3
        elif kind == "grid":
            diag = _grid_coords(top)[2] if top >= 0 else 2
            n = diag * (diag + 1) // 2
        elif kind == "dary_tree":
            (d,) = self.params
            n = d * top + d + 1 if top >= 0 else 1
        else:
            n = self.size
        return n if self.size is None else min(n, self.size)

    def frontier(self, stem_mask: int) -> list[int]:
        """Minimal elements of the causal set minus the stem (a down-set)."""
        P = self.prefix(self.horizon(stem_mask))
        if stem_mask >> P.n:
            raise PosetError("stem outside prefix")
        if not P.is_down_set(stem_mask):
            raise PosetError("not a stem: set is not downward closed")
        rest = P.full & ~stem_mask
        return [x for x in bits(rest) if P.down[x] & rest == 0]

    def label_index(self, label: float, limit: int = 4096) -> int:
        table = _label_table(self, limit)
        if label not in table:
            raise PosetError(f"unknown label {label!r}")
        return table[label]


KINDS = ("ladder", "two_chains", "grid", "disjoint_chains", "dary_tree", "custom")


def ladder(salt: int = 0) -> CausalSetGenerator:
    return CausalSetGenerator("ladder", salt=salt)


def two_chains(salt: int = 0) -> CausalSetGenerator:
    return CausalSetGenerator("two_chains", salt=salt)


def grid(salt: int = 0) -> CausalSetGenerator:
    return CausalSetGenerator("grid", salt=salt)


def disjoint_chains(m: int, t: int, salt: int = 0) -> CausalSetGenerator:
    return CausalSetGenerator("disjoint_chains", (m, t), salt=salt)


def dary_tree(d: int, salt: int = 0) -> CausalSetGenerator:
    return CausalSetGenerator("dary_tree", (d,), salt=salt)


def custom(P: FinitePoset) -> CausalSetGenerator:
    return CausalSetGenerator("custom", (), P)


def parse_model(spec: str) -> CausalSetGenerator:
    """CLI names: ladder, two-chains, grid, chains:m,t, dary:d, file:<path>."""
    if spec == "ladder":
        return ladder()
    if spec == "two-chains":
        return two_chains()
    if spec == "grid":
        return grid()
    if spec.startswith("chains:"):
        m, t = (int(v) for v in spec[7:].split(","))
        return disjoint_chains(m, t)
    if spec.startswith("dary:"):
        return dary_tree(int(spec[5:]))
    if spec.startswith("file:"):
        with open(spec[5:]) as fh:
            return custom(parse_poset(fh.read()))
    raise PosetError(f"unknown model {spec!r}")


def _grid_coords(i: int) -> tuple[int, int, int]:
    # antidiagonal d = a + b holds d - 1 points, swept with a ascending
    d = 2
    while i >= d - 1:
        i -= d - 1
        d += 1
    a = 1 + i
    return a, d - a, d


def _grid_index(a: int, b: int) -> int:
    d = a + b
    return (d - 2) * (d - 1) // 2 + (a - 1)


def _down(gen: CausalSetGenerator, i: int) -> int:
    kind = gen.kind
    if kind == "ladder":
        return (1 << max(i - 1, 0)) - 1
    if kind == "two_chains":
        return mask_of(range(i % 2, i, 2))
    if kind == "grid":
        a, b, _ = _grid_coords(i)
        return mask_of(_grid_index(x, y) for x in range(1, a + 1) for y in range(1, b + 1)
                       if (x, y) != (a, b))
    if kind == "disjoint_chains":
        m, _ = gen.params
        return mask_of(range(i % m, i, m))
    if kind == "dary_tree":
        (d,) = gen.params
        mask = 0
        while i > 0:
            i = (i - 1) // d
            mask |= 1 << i
        return mask
    return gen.poset.down[i]


def _name(gen: CausalSetGenerator, i: int) -> str:
    kind = gen.kind
    if kind == "ladder":
        return f"a{i + 1}"
    if kind == "two_chains":
        return f"{'bc'[i % 2]}{i // 2 + 1}"
    if kind == "grid":
        a, b, _ = _grid_coords(i)
        return f"({a},{b})"
    if kind == "disjoint_chains":
        m, _ = gen.params
        return f"chain{i % m + 1}.{i // m + 1}"
    if kind == "dary_tree":
        (d,) = gen.params
        path = []
        while i > 0:
            path.append(str((i - 1) % d))
            i = (i - 1) // d
        return "root" + ("." + "".join(reversed(path)) if path else "")
    return str(i + 1)


@lru_cache(maxsize=256)
def _prefix(gen: CausalSetGenerator, n: int) -> FinitePoset:
    if n < 0:
        raise PosetError("n must be non-negative")
    if gen.size is not None and n > gen.size:
        raise PosetError(f"{gen.kind} has only {gen.size} elements")
    down = tuple(_down(gen, i) for i in range(n))
    return FinitePoset(n, down, tuple(gen.label(i) for i in range(n)))


@lru_cache(maxsize=64)
def _label_table(gen: CausalSetGenerator, limit: int) -> dict[float, int]:
    n = limit if gen.size is None else min(limit, gen.size)
    return {gen.label(i): i for i in range(n)}


def is_ordered_stem(gen: CausalSetGenerator, sequence: Sequence[int]) -> bool:
    """True iff every prefix of ``sequence`` is a down-set of the causal set."""
    if not sequence:
        return True
    if len(set(sequence)) != len(sequence):
        return False
    if min(sequence) < 0 or (gen.size is not None and max(sequence) >= gen.size):
        raise PosetError("unknown element in sequence")
    placed = 0
    for x in sequence:
        if gen.down(x) & ~placed:
            return False
        placed |= 1 << x
    return True
