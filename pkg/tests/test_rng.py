import numpy as np

from hypersparse.rng import child_seed, set_seed, uniforms


def test_uniform_stream_is_counter_based():
    a = uniforms(5, 100)
    assert np.array_equal(a[:40], uniforms(5, 40))
    assert not np.array_equal(a, uniforms(6, 100))


def test_child_seeds_distinct_and_stable():
    seeds = {child_seed(1, i, j) for i in range(5) for j in range(5)}
    assert len(seeds) == 25
    assert child_seed(1, 2, 3) == child_seed(1, 2, 3)


def test_set_seed_ignores_order():
    assert set_seed(3, [4, 1, 2]) == set_seed(3, [1, 2, 4])
    assert set_seed(3, [1, 2]) != set_seed(3, [1, 2, 4])
