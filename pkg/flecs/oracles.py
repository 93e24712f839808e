# MIT License: Copyright (c) 2022 flecs-kit developers

"""
Brute-force verification oracles. They only rely on plain Numpy routines and on the objects under test,
so that they can be used to cross-check the optimized implementations.
"""

from typing import Callable, NamedTuple, Optional

import numpy as np

#: The largest dimension accepted by the dense reference direction.
MAX_REFERENCE_DIM = 200

#: The minimum number of draws of a statistical check.
MIN_DRAWS = 10_000


class UnbiasednessReport(NamedTuple):
    """
    The report of a statistical unbiasedness check.

    :param mean: The sample mean.
    :param std_error: The standard error of the sample mean, per coordinate.
    :param z_scores: The per-coordinate z-scores of the sample mean with respect to the target.
    :param max_abs_z: The largest absolute z-score.
    :param passed: Whether the largest absolute z-score is not greater than the threshold.
    """
    mean: np.ndarray
    std_error: np.ndarray
    z_scores: np.ndarray
    max_abs_z: float
    passed: bool


def finite_diff_gradient(shard, w: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """
    Approximate the gradient of a local function by central finite differences of its value.

    :param shard: The local function.
    :param w: The parameters.
    :param step: The finite differences step.
    :return: The approximated gradient.
    :raises ValueError: If the step is not positive.
    """
    if step <= 0.0:
        raise ValueError("The finite differences step must be positive")
    w = np.array(w, dtype=np.float64)
    grad = np.empty_like(w)
    for j in range(len(w)):
        e = np.zeros_like(w)
        e[j] = step
        grad[j] = (shard.value(w + e) - shard.value(w - e)) / (2.0 * step)
    return grad


def finite_diff_hessian_sketch(shard, w: np.ndarray, s: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """
    Approximate the Hessian-sketch product of a local function by central finite differences of its gradient
    along each column of the sketch.

    :param shard: The local function.
    :param w: The parameters.
    :param s: The (d, m) sketch matrix.
    :param step: The finite differences step.
    :return: The approximated (d, m) Hessian-sketch product.
    :raises ValueError: If the step is not positive.
    """
    if step <= 0.0:
        raise ValueError("The finite differences step must be positive")
    w = np.array(w, dtype=np.float64)
    s = np.array(s, dtype=np.float64)
    columns = [
        (shard.gradient(w + step * s[:, j]) - shard.gradient(w - step * s[:, j])) / (2.0 * step)
        for j in range(s.shape[1])
    ]
    return np.stack(columns, axis=1)


def statistical_unbiasedness(
    sampler: Callable,
    target: np.ndarray,
    draws: int = 100_000,
    random_state: Optional[np.random.Generator] = None,
    threshold: float = 4.0,
    batched: bool = False,
    chunk_size: int = 10_000
) -> UnbiasednessReport:
    """
    Check that a randomized vector function is an unbiased estimator of a target, by computing
    the per-coordinate z-scores of the sample mean.

    :param sampler: The randomized function. It is called as sampler(random_state) and returns a vector,
                    or as sampler(random_state, n) returning a (n, d) array of draws if batched is True.
    :param target: The target vector.
    :param draws: The number of draws. It must be at least 10^4.
    :param random_state: The Numpy Generator passed to the sampler. If None a new one is created.
    :param threshold: The largest admissible absolute z-score.
    :param batched: Whether the sampler returns several draws at once.
    :param chunk_size: The number of draws requested at once to a batched sampler.
    :return: The unbiasedness report.
    :raises ValueError: If the number of draws is less than 10^4.
    """
    if draws < MIN_DRAWS:
        raise ValueError("The number of draws must be at least {}".format(MIN_DRAWS))
    if random_state is None:
        random_state = np.random.default_rng()
    target = np.asarray(target, dtype=np.float64)

    # Accumulate first and second moments of the deviations from the target
    total = np.zeros_like(target)
    total_sq = np.zeros_like(target)
    done = 0
    while done < draws:
        if batched:
            n = min(chunk_size, draws - done)
            samples = np.asarray(sampler(random_state, n), dtype=np.float64) - target
        else:
            n = 1
            samples = np.asarray(sampler(random_state), dtype=np.float64)[np.newaxis] - target
        total += np.sum(samples, axis=0)
        total_sq += np.sum(samples ** 2, axis=0)
        done += n

    deviation = total / draws
    variance = np.maximum(total_sq / draws - deviation ** 2, 0.0) * draws / (draws - 1)
    std_error = np.sqrt(variance / draws)
    with np.errstate(divide='ignore', invalid='ignore'):
        z_scores = np.where(std_error > 0.0, deviation / std_error, 0.0)
    # Zero variance coordinates are either exact or infinitely far from the target
    exact = np.isclose(deviation, 0.0, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(target), initial=0.0)))
    z_scores[(std_error == 0.0) & ~exact] = np.inf
    max_abs_z = float(np.max(np.abs(z_scores), initial=0.0))
    return UnbiasednessReport(target + deviation, std_error, z_scores, max_abs_z, max_abs_z <= threshold)


def dense_reference_direction(
    y_tilde: np.ndarray,
    m: np.ndarray,
    g_tilde: np.ndarray,
    omega_trunc: float,
    Omega_trunc: float,
    rho: Optional[float] = None,
    b: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Compute a search direction by building every (d, d) matrix explicitly.

    If b is given, the direction is -V diag(1 / clip(|lambda|, omega, Omega)) V^T g, where V diag(lambda) V^T
    is the spectral decomposition of b. Otherwise, with B = Y M^+ Y^T and P the orthogonal projector
    onto the range of Y, the direction is -(P f(B) P + rho (I - P)) g, where f(B) is the truncated inverse of B.

    :param y_tilde: The (d, m) aggregated Hessian sketch.
    :param m: The (m, m) aggregated curvature matrix.
    :param g_tilde: The aggregated gradient estimate.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :param rho: The step scale on the orthogonal complement of the range of Y. Required if b is None.
    :param b: The (d, d) Hessian approximation of the truncated direction. If None the FedSONIA direction is computed.
    :return: The search direction.
    :raises ValueError: If the dimension exceeds 200, or if rho is missing.
    """
    g_tilde = np.asarray(g_tilde, dtype=np.float64)
    d = len(g_tilde)
    if d > MAX_REFERENCE_DIM:
        raise ValueError("The dense reference direction is limited to {} parameters".format(MAX_REFERENCE_DIM))

    def truncated_inverse(a: np.ndarray) -> np.ndarray:
        lambdas, v = np.linalg.eigh(0.5 * (a + a.T))
        return v @ np.diag(1.0 / np.minimum(np.maximum(np.abs(lambdas), omega_trunc), Omega_trunc)) @ v.T

    if b is not None:
        return -truncated_inverse(np.asarray(b, dtype=np.float64)) @ g_tilde
    if rho is None:
        raise ValueError("The step scale rho is required by the FedSONIA direction")

    y_tilde = np.asarray(y_tilde, dtype=np.float64)
    big_b = y_tilde @ np.linalg.pinv(np.asarray(m, dtype=np.float64)) @ y_tilde.T
    proj = y_tilde @ np.linalg.pinv(y_tilde)
    inverse = proj @ truncated_inverse(big_b) @ proj + rho * (np.eye(d) - proj)
    return -inverse @ g_tilde
