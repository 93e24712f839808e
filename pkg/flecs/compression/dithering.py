# MIT License: Copyright (c) 2022 flecs-kit developers

import logging
from typing import Tuple, Optional

import numpy as np

from flecs.compression.base import CompressorSpec, CompressedVector
from flecs.utils.random import RandomState, check_random_state

logger = logging.getLogger(__name__)


def dithering_levels(
    x: np.ndarray,
    spec: CompressorSpec,
    uniforms: np.ndarray
) -> Tuple[np.ndarray, float]:
    """
    Compute the random dithering level indices of a vector, given some uniform random numbers.

    Each coordinate is scaled to u_i = s |x_i| / ||x||_p and stochastically rounded to either floor(u_i)
    or floor(u_i) + 1, the latter with probability u_i - floor(u_i).

    :param x: The vector.
    :param spec: The random dithering compressor specification.
    :param uniforms: Uniform random numbers in [0, 1), having shape (..., dim).
    :return: A pair consisting of the level indices (with the same shape of uniforms) and the norm.
    """
    s = spec.levels
    norm = float(np.linalg.norm(x, ord=spec.norm_order))
    if norm == 0.0:
        return np.zeros(uniforms.shape, dtype=np.int64), 0.0
    u = s * (np.abs(x) / norm)
    if spec.norm_order == np.inf:
        u = np.minimum(u, s)
    else:
        u = np.minimum(u, np.ceil(s * np.max(np.abs(x)) / norm))
    lower = np.floor(u)
    levels = lower + (uniforms < (u - lower))
    return levels.astype(np.int64), norm


def dither(x: np.ndarray, spec: CompressorSpec, random_state: Optional[RandomState] = None) -> CompressedVector:
    """
    Compress a vector with the unbiased random dithering compressor.

    :param x: The vector.
    :param spec: The random dithering compressor specification.
    :param random_state: The random state. It can be either None, a seed integer or a Numpy Generator.
    :return: The compressed vector. Level indices exceeding s can only occur because of rounding
             with the 2-norm, and they are escape-coded as full floating point values.
    """
    dim = len(x)
    bits = spec.vector_bits(dim)
    if not np.any(x):
        return CompressedVector(np.zeros(dim), bits, 0.0)
    random_state = check_random_state(random_state)
    levels, norm = dithering_levels(x, spec, random_state.random(dim))
    n_escapes = int(np.sum(levels > spec.levels))
    if n_escapes > 0:
        logger.debug("Escape-coding %d out-of-range dithering levels", n_escapes)
    value = np.sign(x) * norm * levels / spec.levels
    return CompressedVector(value, bits + n_escapes * spec.float_bits, norm)


def dither_samples(
    x: np.ndarray,
    spec: CompressorSpec,
    n_draws: int,
    random_state: Optional[RandomState] = None
) -> np.ndarray:
    """
    Draw many independent random dithering compressions of the same vector at once.

    :param x: The vector.
    :param spec: The random dithering compressor specification.
    :param n_draws: The number of draws.
    :param random_state: The random state. It can be either None, a seed integer or a Numpy Generator.
    :return: The dequantized draws, as a (n_draws, dim) array.
    """
    random_state = check_random_state(random_state)
    levels, norm = dithering_levels(x, spec, random_state.random((n_draws, len(x))))
    return np.sign(x) * norm * levels / spec.levels
