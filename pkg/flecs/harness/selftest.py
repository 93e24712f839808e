# MIT License: Copyright (c) 2022 flecs-kit developers

import logging
from typing import List, NamedTuple, Optional

import numpy as np

from flecs.compression.base import CompressorSpec, RANDOM_DITHERING
from flecs.compression.dithering import dither_samples
from flecs.linalg import symmetrize
from flecs.objectives.base import Shard
from flecs.optim.direction import direction_truncated, direction_fedsonia
from flecs.oracles import statistical_unbiasedness, finite_diff_gradient, finite_diff_hessian_sketch
from flecs.utils.random import check_random_state, RandomState

logger = logging.getLogger(__name__)


class CheckResult(NamedTuple):
    """
    The result of a self-check.

    :param name: The name of the check.
    :param passed: Whether the check passed.
    :param detail: A human readable summary of the measured quantity.
    """
    name: str
    passed: bool
    detail: str


def _relative_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def check_compressor(
    spec: Optional[CompressorSpec] = None,
    dim: int = 100,
    n_vectors: int = 10,
    draws: int = 100_000,
    random_state: Optional[RandomState] = None
) -> List[CheckResult]:
    """
    Check the unbiasedness of a compressor on some fixed random vectors, and the stability of its
    empirical second moment ratio E||Q(x)||^2 / ||x||^2 across two independent batches of draws.

    :param spec: The compressor specification. If None it defaults to random dithering with s = 64 and inf-norm.
    :param dim: The dimension of the vectors.
    :param n_vectors: The number of vectors.
    :param draws: The number of draws per vector.
    :param random_state: The random state.
    :return: The results of the checks, one for unbiasedness and one for the second moment per vector.
    """
    if spec is None:
        spec = CompressorSpec(RANDOM_DITHERING, levels=64)
    random_state = check_random_state(random_state)
    results = []
    for i in range(n_vectors):
        x = random_state.standard_normal(dim)
        report = statistical_unbiasedness(
            lambda rs, n: dither_samples(x, spec, n, rs), x, draws, random_state, batched=True
        )
        results.append(CheckResult(
            'compressor-unbiasedness[{}]'.format(i), report.passed, 'max |z| = {:.3f}'.format(report.max_abs_z)
        ))
        sq_norm = np.dot(x, x)
        ratios = [
            np.mean(np.sum(dither_samples(x, spec, draws, random_state) ** 2, axis=1)) / sq_norm for _ in range(2)
        ]
        change = abs(ratios[0] - ratios[1]) / ratios[0]
        results.append(CheckResult(
            'compressor-second-moment[{}]'.format(i), change <= 0.05,
            'ratios = {:.5f}, {:.5f}'.format(ratios[0], ratios[1])
        ))
    return results


def check_error_feedback(
    gammas: tuple = (0.25, 1.0),
    spec: Optional[CompressorSpec] = None,
    dim: int = 20,
    draws: int = 100_000,
    random_state: Optional[RandomState] = None
) -> List[CheckResult]:
    """
    Check that the error feedback update h' = h + gamma Q(g - h) satisfies E[h'] = (1 - gamma) h + gamma g.

    :param gammas: The error feedback step sizes.
    :param spec: The compressor specification. If None it defaults to random dithering with s = 64 and inf-norm.
    :param dim: The dimension.
    :param draws: The number of draws per step size.
    :param random_state: The random state.
    :return: The results of the checks, one per step size.
    """
    if spec is None:
        spec = CompressorSpec(RANDOM_DITHERING, levels=64)
    random_state = check_random_state(random_state)
    results = []
    for gamma in gammas:
        h, g = random_state.standard_normal(dim), random_state.standard_normal(dim)
        report = statistical_unbiasedness(
            lambda rs, n: h + gamma * dither_samples(g - h, spec, n, rs),
            (1.0 - gamma) * h + gamma * g, draws, random_state, batched=True
        )
        results.append(CheckResult(
            'error-feedback[gamma={}]'.format(gamma), report.passed, 'max |z| = {:.3f}'.format(report.max_abs_z)
        ))
    return results


def check_operator_bounds(
    n_states: int = 100,
    dim: int = 10,
    omega_trunc: float = 1e-2,
    Omega_trunc: float = 1e2,
    random_state: Optional[RandomState] = None
) -> List[CheckResult]:
    """
    Check that the search direction maps g -> -p have Rayleigh quotients in [1 / Omega, 1 / omega] along
    the standard basis vectors, and that they yield descent directions, on random states.

    :param n_states: The number of random states.
    :param dim: The dimension.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :param random_state: The random state.
    :return: The results of the checks, one per direction rule.
    """
    random_state = check_random_state(random_state)
    low, high = 1.0 / Omega_trunc, 1.0 / omega_trunc
    rho = np.sqrt(low * high)
    worst = {'truncated': 0.0, 'fedsonia': 0.0}
    passed = {'truncated': True, 'fedsonia': True}
    basis = np.eye(dim)
    for _ in range(n_states):
        m = int(random_state.integers(1, dim + 1))
        a = random_state.standard_normal((dim, dim))
        b = symmetrize(a) * 10.0 ** random_state.uniform(-3.0, 3.0)
        s = random_state.standard_normal((dim, m))
        y = b @ s
        mm = s.T @ y
        g = random_state.standard_normal(dim)
        maps = {
            'truncated': lambda v: direction_truncated(b, v, omega_trunc, Omega_trunc),
            'fedsonia': lambda v: direction_fedsonia(y, mm, v, omega_trunc, Omega_trunc, rho)
        }
        for name, direction in maps.items():
            quotients = np.array([-np.dot(e, direction(e)) for e in basis])
            inside = np.all(quotients >= low * (1.0 - 1e-9)) and np.all(quotients <= high * (1.0 + 1e-9))
            descent = np.dot(direction(g), g) < 0.0
            passed[name] = passed[name] and bool(inside and descent)
            worst[name] = max(worst[name], float(np.max(quotients)))
    return [
        CheckResult('operator-bounds[{}]'.format(name), passed[name], 'max quotient = {:.3e}'.format(worst[name]))
        for name in ['truncated', 'fedsonia']
    ]


def check_gradients(
    shards: List[Shard],
    w: Optional[np.ndarray] = None,
    memory: int = 2,
    grad_tol: float = 1e-6,
    hess_tol: float = 1e-5,
    random_state: Optional[RandomState] = None
) -> List[CheckResult]:
    """
    Check the analytic gradients and Hessian-sketch products of local functions against central
    finite differences.

    :param shards: The local functions.
    :param w: The parameters. If None they are drawn at random with small magnitude.
    :param memory: The number of columns of the random sketch.
    :param grad_tol: The largest admissible relative error of the gradients.
    :param hess_tol: The largest admissible relative error of the Hessian-sketch products.
    :param random_state: The random state.
    :return: The results of the checks, two per local function.
    """
    random_state = check_random_state(random_state)
    results = []
    for i, shard in enumerate(shards):
        x = 0.1 * random_state.standard_normal(shard.dim) if w is None else w
        s = random_state.standard_normal((shard.dim, min(memory, shard.dim)))
        grad_error = _relative_error(shard.gradient(x), finite_diff_gradient(shard, x, 1e-6))
        hess_error = _relative_error(shard.hessian_sketch(x, s), finite_diff_hessian_sketch(shard, x, s, 1e-5))
        results.append(CheckResult(
            'gradient[{}]'.format(i), grad_error <= grad_tol, 'rel. err = {:.3e}'.format(grad_error)
        ))
        results.append(CheckResult(
            'hessian-sketch[{}]'.format(i), hess_error <= hess_tol, 'rel. err = {:.3e}'.format(hess_error)
        ))
    return results


def run_selftest(draws: int = 100_000, random_state: Optional[RandomState] = None) -> List[CheckResult]:
    """
    Run the statistical self-check suites: compressor contract, error feedback moment and operator bounds.

    :param draws: The number of draws of the statistical checks.
    :param random_state: The random state.
    :return: The results of all the checks.
    """
    random_state = check_random_state(random_state)
    results = []
    results.extend(check_compressor(draws=draws, random_state=random_state))
    results.extend(check_error_feedback(draws=draws, random_state=random_state))
    results.extend(check_operator_bounds(random_state=random_state))
    n_failed = sum(not r.passed for r in results)
    logger.info("Self-test completed: %d checks, %d failed", len(results), n_failed)
    return results
