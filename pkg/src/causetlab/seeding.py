"""Reproducible random streams and order-preserving parallel maps.

``seed_stream(master, index)`` feeds ``(master, index)`` through numpy's
``SeedSequence`` (a documented hash of the entropy and spawn key) into a
PCG64 generator.  Distinct indices give independent streams, and the
stream for a given pair never depends on how work is split across
processes.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor

import numpy as np

CHUNK = 1000


def seed_stream(master_seed: int, index: int) -> np.random.Generator:
    if master_seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(index,))))


def chunks(total: int, size: int = CHUNK) -> list[tuple[int, int, int]]:
    """``(chunk_index, start, count)`` covering ``range(total)``."""
    return [(i, start, min(size, total - start)) for i, start in enumerate(range(0, total, size))]


def parallel_map(func: Callable, tasks: Sequence | Iterable, jobs: int = 1) -> list:
    """``[func(t) for t in tasks]``, optionally across processes, order preserved."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(func, tasks))
