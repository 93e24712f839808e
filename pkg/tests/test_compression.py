import pytest
import numpy as np

from flecs.errors import ConfigError, NumericError
from flecs.compression import IDENTITY, RANDOM_DITHERING, CompressorSpec
from flecs.compression import dithering_levels, dither, dither_samples
from flecs.compression import compress_vector, compress_matrix, estimate_omega_q
from flecs.oracles import statistical_unbiasedness


@pytest.fixture
def dithering_spec():
    return CompressorSpec(RANDOM_DITHERING, levels=64, norm_order=np.inf)


@pytest.fixture
def identity_spec():
    return CompressorSpec(IDENTITY)


def test_compressor_spec():
    with pytest.raises(ConfigError):
        CompressorSpec('top-k')
    with pytest.raises(ConfigError):
        CompressorSpec(RANDOM_DITHERING, levels=0)
    with pytest.raises(ConfigError):
        CompressorSpec(RANDOM_DITHERING, norm_order=1.0)
    # The identity compressor ignores levels and norm order
    assert CompressorSpec(IDENTITY, levels=3).vector_bits(10) == 320
    assert CompressorSpec(RANDOM_DITHERING, levels=64).level_bits == 7
    assert CompressorSpec(RANDOM_DITHERING, levels=128).level_bits == 8
    assert CompressorSpec(RANDOM_DITHERING, levels=64).vector_bits(123) == 32 + 123 * 8


def test_compress_zero(dithering_spec):
    c = compress_vector(np.zeros(5), dithering_spec, 0)
    assert np.array_equal(c.value, np.zeros(5))
    assert c.bits == dithering_spec.vector_bits(5)
    big_c = compress_matrix(np.zeros((5, 3)), dithering_spec, 0)
    assert np.array_equal(big_c.value, np.zeros((5, 3)))


def test_compress_exact_levels():
    spec = CompressorSpec(RANDOM_DITHERING, levels=1)
    for seed in range(10):
        assert np.array_equal(compress_vector(np.array([1.0, -1.0]), spec, seed).value, [1.0, -1.0])


def test_compress_enumerated_outcomes():
    spec = CompressorSpec(RANDOM_DITHERING, levels=1)
    x = np.array([1.0, 0.5])
    levels_low, _ = dithering_levels(x, spec, np.array([0.9, 0.9]))
    levels_high, _ = dithering_levels(x, spec, np.array([0.1, 0.1]))
    assert levels_low.tolist() == [1, 0]
    assert levels_high.tolist() == [1, 1]
    # Both outcomes of the second coordinate have probability 1/2
    levels, norm = dithering_levels(x, spec, np.linspace(0.0, 1.0, num=1000, endpoint=False)[:, np.newaxis])
    assert np.mean(norm * levels[:, 1] / spec.levels) == pytest.approx(0.5)


def test_compress_identity(identity_spec, rng):
    x = rng.standard_normal(10)
    c = compress_vector(x, identity_spec)
    assert np.array_equal(c.value, x)
    assert c.bits == 320
    a = rng.standard_normal((10, 3))
    big_c = compress_matrix(a, identity_spec)
    assert np.array_equal(big_c.value, a)
    assert big_c.bits == 32 * 30


def test_compress_matrix_single_column(dithering_spec, rng):
    x = rng.standard_normal(20)
    c = compress_vector(x, dithering_spec, np.random.default_rng(7))
    big_c = compress_matrix(x[:, np.newaxis], dithering_spec, np.random.default_rng(7))
    assert np.array_equal(big_c.value[:, 0], c.value)
    assert big_c.bits == c.bits


def test_compress_non_finite(dithering_spec):
    with pytest.raises(NumericError):
        compress_vector(np.array([1.0, np.inf]), dithering_spec, 0)


def test_compress_reproducible(dithering_spec, rng):
    x = rng.standard_normal(50)
    assert np.array_equal(dither(x, dithering_spec, 3).value, dither(x, dithering_spec, 3).value)


def test_dither_two_norm_escapes(rng):
    spec = CompressorSpec(RANDOM_DITHERING, levels=2, norm_order=2.0)
    x = rng.standard_normal(30)
    for seed in range(20):
        c = dither(x, spec, seed)
        levels = np.round(np.abs(c.value) * spec.levels / c.norm).astype(np.int64)
        n_escapes = int(np.sum(levels > spec.levels))
        assert c.bits == spec.vector_bits(30) + n_escapes * spec.float_bits


def test_dither_unbiased(dithering_spec, rng):
    vectors = rng.standard_normal((10, 100))
    for x in vectors:
        report = statistical_unbiasedness(
            lambda rs, n: dither_samples(x, dithering_spec, n, rs), x, 100_000, rng, batched=True
        )
        assert report.passed


def test_dither_two_norm_unbiased(rng):
    spec = CompressorSpec(RANDOM_DITHERING, levels=4, norm_order=2.0)
    x = rng.standard_normal(30)
    report = statistical_unbiasedness(lambda rs, n: dither_samples(x, spec, n, rs), x, 50_000, rng, batched=True)
    assert report.passed


def test_dither_second_moment_stable(dithering_spec, rng):
    x = rng.standard_normal(100)
    ratios = [np.mean(np.sum(dither_samples(x, dithering_spec, 100_000, rng) ** 2, axis=1)) / np.dot(x, x)
              for _ in range(2)]
    assert abs(ratios[0] - ratios[1]) / ratios[0] <= 0.05


def test_estimate_omega_q(dithering_spec):
    assert estimate_omega_q(CompressorSpec(IDENTITY), 10) == 0.0
    spec = CompressorSpec(RANDOM_DITHERING, levels=1)
    estimate = estimate_omega_q(spec, 2, trials=100_000, vectors=np.array([[1.0, 0.5]]), random_state=42)
    assert estimate == pytest.approx(0.2, abs=0.01)
    coarse = estimate_omega_q(dithering_spec, 50, random_state=42)
    fine = estimate_omega_q(CompressorSpec(RANDOM_DITHERING, levels=4096), 50, random_state=42)
    assert 0.0 <= fine < coarse
    assert fine < 1e-3
    with pytest.raises(ValueError):
        estimate_omega_q(dithering_spec, 10, trials=100)
