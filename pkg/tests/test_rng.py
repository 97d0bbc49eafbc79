import numpy as np
import pytest

from predasym.exceptions import InvalidParams
from predasym.rng import derive_seed, make_rng


def test_same_seed_same_stream():
    a = make_rng(123).normal(size=50)
    b = make_rng(123).normal(size=50)
    assert np.array_equal(a, b)


def test_different_seeds_differ():
    a = make_rng(1).normal(size=50)
    b = make_rng(2).normal(size=50)
    assert not np.array_equal(a, b)


def test_path_spawns_independent_streams():
    root = make_rng(7).normal(size=20)
    child = make_rng(7, 0).normal(size=20)
    other = make_rng(7, 1).normal(size=20)
    assert not np.array_equal(root, child)
    assert not np.array_equal(child, other)


def test_path_deterministic():
    a = make_rng(7, 3, 1).normal(size=20)
    b = make_rng(7, 3, 1).normal(size=20)
    assert np.array_equal(a, b)


def test_derive_seed_deterministic_and_distinct():
    s1 = derive_seed(42, 0, 0, 1)
    s2 = derive_seed(42, 0, 0, 1)
    s3 = derive_seed(42, 0, 0, 2)
    assert s1 == s2
    assert s1 != s3
    assert isinstance(s1, int) and s1 >= 0


def test_derive_seed_matches_spawned_stream():
    # streams built from a derived seed must still be reproducible
    a = make_rng(derive_seed(5, 9)).uniform(size=10)
    b = make_rng(derive_seed(5, 9)).uniform(size=10)
    assert np.array_equal(a, b)


def test_bool_seed_rejected():
    with pytest.raises(InvalidParams):
        make_rng(True)


def test_float_seed_rejected():
    with pytest.raises(InvalidParams):
        make_rng(1.5)
