import pytest
import numpy as np
from scipy import sparse

from tests.utils import random_logistic_shard, random_spd_matrix, naive_logistic_value, naive_logistic_gradient
from tests.utils import relative_error

from flecs.errors import ConfigError, DataError, NumericError
from flecs.datasets import Dataset, PartitionSpec, SHUFFLED, partition
from flecs.objectives import FULL, MINIBATCH, BatchSpec, LogisticShard, QuadraticShard
from flecs.objectives import logistic_loss, global_value_and_grad
from flecs.oracles import finite_diff_gradient, finite_diff_hessian_sketch


@pytest.fixture
def logistic_shards(rng):
    return [random_logistic_shard(50, 20, rng) for _ in range(20)]


@pytest.fixture
def quadratic_shard(rng):
    return QuadraticShard(random_spd_matrix(8, rng), rng.standard_normal(8))


def test_logistic_loss_stable():
    z = np.array([-1e3, -1.0, 0.0, 1.0, 1e3])
    values = logistic_loss(z)
    assert np.all(np.isfinite(values))
    assert values[2] == pytest.approx(np.log(2.0))
    assert values[0] == pytest.approx(1e3)
    assert values[-1] == pytest.approx(0.0)


def test_logistic_value_at_zero(logistic_shards):
    for shard in logistic_shards:
        assert shard.value(np.zeros(shard.dim)) == pytest.approx(np.log(2.0))


def test_logistic_vs_naive(rng):
    features = rng.standard_normal((30, 10))
    labels = np.where(rng.random(30) < 0.5, -1.0, 1.0)
    shard = LogisticShard(features, labels, reg_mu=0.1)
    sparse_shard = LogisticShard(sparse.csr_matrix(features), labels, reg_mu=0.1)
    w = rng.standard_normal(10)
    expected_value = naive_logistic_value(features, labels, 0.1, w)
    expected_grad = naive_logistic_gradient(features, labels, 0.1, w)
    assert shard.value(w) == pytest.approx(expected_value, rel=1e-12)
    assert np.allclose(shard.gradient(w), expected_grad, rtol=1e-12, atol=1e-14)
    assert sparse_shard.value(w) == pytest.approx(expected_value, rel=1e-12)
    assert np.allclose(sparse_shard.gradient(w), expected_grad, rtol=1e-12, atol=1e-14)


def test_logistic_gradient_at_zero(rng):
    shard = random_logistic_shard(40, 6, rng, reg_mu=0.0)
    expected = -shard.features.T @ shard.labels / (2.0 * shard.n_samples)
    assert np.allclose(shard.gradient(np.zeros(6)), expected)
    assert np.allclose(finite_diff_gradient(shard, np.zeros(6), 1e-6), expected, atol=1e-6)


def test_logistic_gradient_finite_diff(logistic_shards, rng):
    for shard in logistic_shards:
        w = 0.1 * rng.standard_normal(shard.dim)
        assert relative_error(finite_diff_gradient(shard, w, 1e-6), shard.gradient(w)) <= 1e-6


def test_logistic_hessian_sketch_finite_diff(logistic_shards, rng):
    for shard in logistic_shards:
        w = 0.1 * rng.standard_normal(shard.dim)
        s = rng.standard_normal((shard.dim, 3))
        assert relative_error(finite_diff_hessian_sketch(shard, w, s, 1e-5), shard.hessian_sketch(w, s)) <= 1e-5


def test_logistic_sparse_hessian_sketch(rng):
    shard = random_logistic_shard(60, 15, rng, density=0.3)
    dense = LogisticShard(shard.features.toarray(), shard.labels, reg_mu=shard.reg_mu)
    w, s = rng.standard_normal(15), rng.standard_normal((15, 2))
    assert np.allclose(shard.hessian_sketch(w, s), dense.hessian_sketch(w, s))


def test_logistic_minibatch(rng):
    shard = random_logistic_shard(50, 5, rng)
    w = rng.standard_normal(5)
    batch = BatchSpec(MINIBATCH, 10)
    g1 = shard.gradient(w, batch, np.random.default_rng(1))
    g2 = shard.gradient(w, batch, np.random.default_rng(1))
    assert np.array_equal(g1, g2)
    # A minibatch covering all the samples gives the exact gradient
    assert np.allclose(shard.gradient(w, BatchSpec(MINIBATCH, 50), 0), shard.gradient(w))
    with pytest.raises(ConfigError):
        shard.gradient(w, BatchSpec(MINIBATCH, 51), 0)
    with pytest.raises(ConfigError):
        BatchSpec(MINIBATCH, 0)


def test_logistic_minibatch_unbiased(rng):
    shard = random_logistic_shard(20, 4, rng)
    w = rng.standard_normal(4)
    batch = BatchSpec(MINIBATCH, 5)
    samples = np.array([shard.gradient(w, batch, rng) for _ in range(20_000)])
    std_error = np.std(samples, axis=0) / np.sqrt(len(samples))
    assert np.all(np.abs(np.mean(samples, axis=0) - shard.gradient(w)) <= 4.0 * std_error)


def test_logistic_errors(rng):
    with pytest.raises(DataError):
        LogisticShard(rng.standard_normal((3, 2)), np.array([1.0, -1.0]))
    with pytest.raises(DataError):
        LogisticShard(rng.standard_normal((2, 2)), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        LogisticShard(rng.standard_normal((2, 2)), np.array([1.0, -1.0]), reg_mu=-1.0)


def test_quadratic(quadratic_shard, rng):
    w = rng.standard_normal(8)
    h, b = quadratic_shard.h, quadratic_shard.b
    assert quadratic_shard.value(w) == pytest.approx(0.5 * w @ h @ w + b @ w)
    assert np.allclose(quadratic_shard.gradient(w), h @ w + b)
    s = rng.standard_normal((8, 3))
    assert np.allclose(quadratic_shard.hessian_sketch(w, s), h @ s)
    assert np.allclose(finite_diff_gradient(quadratic_shard, w, 1e-4), h @ w + b, atol=1e-6)
    assert np.allclose(quadratic_shard.gradient(quadratic_shard.minimizer()), 0.0, atol=1e-10)
    with pytest.raises(NumericError):
        QuadraticShard(np.array([[1.0, 2.0], [0.0, 1.0]]), np.zeros(2))


def test_global_value_and_grad(rng):
    shards = [random_logistic_shard(10, 4, rng) for _ in range(3)]
    w = rng.standard_normal(4)
    value, grad = global_value_and_grad(shards, w)
    assert value == pytest.approx(np.mean([s.value(w) for s in shards]))
    assert np.allclose(grad, np.mean([s.gradient(w, FULL) for s in shards], axis=0))
    with pytest.raises(ValueError):
        global_value_and_grad([], w)


def test_global_value_and_grad_split(rng):
    features, labels = rng.standard_normal((100, 6)), np.where(rng.random(100) < 0.5, -1.0, 1.0)
    ds = Dataset(sparse.csr_matrix(features), labels, 6)
    shards = partition(ds, PartitionSpec(4, SHUFFLED, seed=3), reg_mu=1e-2)
    assert [s.n_samples for s in shards] == [25, 25, 25, 25]
    unsplit = LogisticShard(features, labels, reg_mu=1e-2)
    w = rng.standard_normal(6)
    value, grad = global_value_and_grad(shards, w)
    assert value == pytest.approx(unsplit.value(w), rel=1e-12)
    assert np.allclose(grad, unsplit.gradient(w), rtol=1e-12, atol=1e-14)


def test_global_value_and_grad_uneven(rng):
    # Uneven shards are weighted equally, i.e. F is the plain mean of the local functions
    shards = [random_logistic_shard(7, 3, rng), random_logistic_shard(13, 3, rng)]
    w = rng.standard_normal(3)
    value, _ = global_value_and_grad(shards, w)
    assert value == pytest.approx(0.5 * (shards[0].value(w) + shards[1].value(w)), rel=1e-12)


def test_hessian_sketch_linear(logistic_shards, rng):
    for shard in logistic_shards:
        w = rng.standard_normal(shard.dim)
        s1, s2 = rng.standard_normal((shard.dim, 3)), rng.standard_normal((shard.dim, 3))
        expected = shard.hessian_sketch(w, s1) + shard.hessian_sketch(w, s2)
        assert np.allclose(shard.hessian_sketch(w, s1 + s2), expected, rtol=1e-12, atol=1e-12)


def test_logistic_minibatch_hessian_sketch_unbiased(rng):
    shard = random_logistic_shard(20, 4, rng)
    w, s = rng.standard_normal(4), rng.standard_normal((4, 2))
    batch = BatchSpec(MINIBATCH, 5)
    samples = np.array([shard.hessian_sketch(w, s, batch, rng) for _ in range(10_000)])
    std_error = np.std(samples, axis=0) / np.sqrt(len(samples))
    assert np.all(np.abs(np.mean(samples, axis=0) - shard.hessian_sketch(w, s)) <= 4.0 * std_error)
