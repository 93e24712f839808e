import pytest
import numpy as np

from flecs.utils.random import check_random_state, derive_generator
from flecs.utils.random import SKETCH_TAG, GRAD_COMPRESS_TAG


def test_check_random_state():
    rng = np.random.default_rng(1)
    assert check_random_state(rng) is rng
    assert isinstance(check_random_state(None), np.random.Generator)
    assert check_random_state(42).random() == np.random.default_rng(42).random()
    assert check_random_state(np.int64(7)).random() == np.random.default_rng(7).random()
    with pytest.raises(ValueError):
        check_random_state(0.5)
    with pytest.raises(ValueError):
        check_random_state(True)


def test_derive_generator():
    a = derive_generator(42, SKETCH_TAG, 3).random(5)
    assert np.array_equal(a, derive_generator(42, SKETCH_TAG, 3).random(5))
    assert not np.array_equal(a, derive_generator(42, SKETCH_TAG, 4).random(5))
    assert not np.array_equal(a, derive_generator(43, SKETCH_TAG, 3).random(5))
    assert not np.array_equal(a, derive_generator(42, GRAD_COMPRESS_TAG, 3).random(5))
    b = derive_generator(42, GRAD_COMPRESS_TAG, 3, 0).random(5)
    assert not np.array_equal(b, derive_generator(42, GRAD_COMPRESS_TAG, 3, 1).random(5))
    with pytest.raises(ValueError):
        derive_generator(-1, SKETCH_TAG)
    with pytest.raises(ValueError):
        derive_generator(42, SKETCH_TAG, -1)
