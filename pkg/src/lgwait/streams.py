"""Chunked, counter-derived random streams.

A Monte Carlo run of ``n`` samples is cut into fixed-size chunks.  Chunk ``i``
draws from its own generator seeded by ``SeedSequence(seed, spawn_key=(tag, i))``,
so the output depends only on ``(seed, n)`` and never on how many workers
processed the chunks or in what order they finished.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

CHUNK_SIZE = 1 << 16

T = TypeVar("T")


def chunk_sizes(n: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def chunk_rng(seed: int, tag: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(tag), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


def map_chunks(
    fn: Callable[[np.random.Generator, int], T],
    n: int,
    seed: int,
    tag: int = 0,
    workers: int = 1,
) -> list[T]:
    """Apply ``fn(rng, size)`` to every chunk; results come back in chunk order."""
    if n < 1:
        raise ValueError("need at least one sample")
    sizes = chunk_sizes(n)

    def job(i: int) -> T:
        return fn(chunk_rng(seed, tag, i), sizes[i])

    if workers <= 1 or len(sizes) == 1:
        return [job(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes))))
