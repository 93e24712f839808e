# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Optional

import numpy as np

from flecs.compression.base import CompressorSpec, CompressedVector, CompressedMatrix
from flecs.compression.dithering import dither, dither_samples
from flecs.utils.data import check_vector, check_matrix
from flecs.utils.random import RandomState, check_random_state


def compress_vector(
    x: np.ndarray,
    spec: CompressorSpec,
    random_state: Optional[RandomState] = None
) -> CompressedVector:
    """
    Compress a vector with an unbiased compression operator Q, i.e. E[Q(x)] = x.

    :param x: The vector.
    :param spec: The compressor specification.
    :param random_state: The random state. It can be either None, a seed integer or a Numpy Generator.
    :return: The compressed vector, with its exact payload size.
    :raises NumericError: If the vector contains non-finite values.
    """
    x = check_vector(x, name='vector to compress')
    if spec.is_identity:
        return CompressedVector(x.copy(), spec.vector_bits(len(x)), float(np.linalg.norm(x)))
    return dither(x, spec, random_state)


def compress_matrix(
    a: np.ndarray,
    spec: CompressorSpec,
    random_state: Optional[RandomState] = None
) -> CompressedMatrix:
    """
    Compress a matrix column-wise with an unbiased compression operator, using independent randomness per column.

    :param a: The matrix.
    :param spec: The compressor specification.
    :param random_state: The random state. It can be either None, a seed integer or a Numpy Generator.
    :return: The compressed matrix, whose payload size is the sum of the columns payload sizes.
    :raises NumericError: If the matrix contains non-finite values.
    """
    a = check_matrix(a, name='matrix to compress')
    random_state = check_random_state(random_state)
    value = np.empty_like(a)
    bits = 0
    for j in range(a.shape[1]):
        column = compress_vector(a[:, j], spec, random_state)
        value[:, j] = column.value
        bits += column.bits
    return CompressedMatrix(value, bits)


def estimate_omega_q(
    spec: CompressorSpec,
    dim: int,
    trials: int = 10 ** 4,
    n_vectors: int = 8,
    vectors: Optional[np.ndarray] = None,
    chunk_size: int = 1024,
    random_state: Optional[RandomState] = None
) -> float:
    """
    Empirically estimate the variance parameter omega of an unbiased compressor, i.e. the smallest value such that
    E||Q(x)||^2 <= (omega + 1) ||x||^2. The estimate is the largest empirical second moment ratio minus one,
    over a set of vectors. It is meant for diagnostics and step size suggestions only.

    :param spec: The compressor specification.
    :param dim: The dimension of the vectors.
    :param trials: The number of compressor draws per vector.
    :param n_vectors: The number of random unit vectors to sample, if vectors is None.
    :param vectors: Optional (k, dim) array of vectors to use instead of random unit vectors.
    :param chunk_size: The number of draws to hold in memory at once.
    :param random_state: The random state. It can be either None, a seed integer or a Numpy Generator.
    :return: The estimated variance parameter.
    :raises ValueError: If a parameter is out of domain.
    """
    if trials < 10 ** 4:
        raise ValueError("The number of trials must be at least 10^4")
    if spec.is_identity:
        return 0.0
    random_state = check_random_state(random_state)
    if vectors is None:
        vectors = random_state.standard_normal((n_vectors, dim))
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if vectors.shape[1] != dim:
        raise ValueError("The vectors must have dimension {}".format(dim))

    estimate = 0.0
    for x in vectors:
        sq_norm = float(np.dot(x, x))
        if sq_norm == 0.0:
            continue
        total = 0.0
        for start in range(0, trials, chunk_size):
            n_draws = min(chunk_size, trials - start)
            samples = dither_samples(x, spec, n_draws, random_state)
            total += float(np.sum(samples ** 2))
        estimate = max(estimate, total / (trials * sq_norm) - 1.0)
    return estimate
