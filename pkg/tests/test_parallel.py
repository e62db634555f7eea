import pytest

from dickson.parallel import WORKERS_ENV, chunk_ranges, default_workers, ordered_map


def _square(x):
    return x * x


@pytest.mark.parametrize("lo, hi", [(2, 2), (2, 100), (11, 100_000), (1, 70_000)])
def test_chunks_tile_the_range(lo, hi):
    chunks = chunk_ranges(lo, hi)
    assert chunks[0][0] == lo and chunks[-1][1] == hi
    assert all(b + 1 == c for (_, b), (c, _) in zip(chunks, chunks[1:]))
    assert all(b - a + 1 <= 4096 for a, b in chunks)


def test_ordered_map_keeps_order():
    tasks = list(range(50))
    assert list(ordered_map(_square, tasks, 1)) == list(ordered_map(_square, tasks, 3))


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert default_workers() == 3
