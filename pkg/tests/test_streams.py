import numpy as np
import pytest

from lgwait import streams


def test_chunk_sizes_cover_n():
    sizes = streams.chunk_sizes(3 * streams.CHUNK_SIZE + 5)
    assert sum(sizes) == 3 * streams.CHUNK_SIZE + 5
    assert sizes[-1] == 5


@pytest.mark.parametrize("workers", [1, 2, 5])
def test_results_independent_of_workers(workers):
    n = 4 * streams.CHUNK_SIZE + 17
    ref = streams.map_chunks(lambda rng, m: rng.random(m).sum(), n, seed=3)
    got = streams.map_chunks(lambda rng, m: rng.random(m).sum(), n, seed=3, workers=workers)
    assert got == ref


def test_tags_give_distinct_streams():
    a = streams.chunk_rng(1, 0, 0).random(4)
    b = streams.chunk_rng(1, 1, 0).random(4)
    c = streams.chunk_rng(1, 0, 1).random(4)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_rejects_empty():
    with pytest.raises(ValueError):
        streams.map_chunks(lambda rng, m: m, 0, seed=0)
