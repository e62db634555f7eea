"""Chunked worker pool with order-preserving merge."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")

WORKERS_ENV = "DICKSON_WORKERS"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def chunk_ranges(lo: int, hi: int, max_size: int = 4096) -> list[tuple[int, int]]:
    """Split [lo, hi] into contiguous inclusive blocks.

    Block boundaries depend only on the range, never on the pool size, so
    the merged output is identical however many workers run.
    """
    if hi < lo:
        return []
    size = max(1, min(max_size, (hi - lo + 1 + 15) // 16))
    return [(a, min(a + size - 1, hi)) for a in range(lo, hi + 1, size)]


def ordered_map(fn: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> Iterator[R]:
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        yield from map(fn, tasks)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # Executor.map yields in submission order regardless of completion order.
        yield from pool.map(fn, tasks)
