# MIT License: Copyright (c) 2022 flecs-kit developers

import logging
from typing import Tuple

import numpy as np

from flecs.errors import ConfigError
from flecs.linalg import sym_eig, pinv, symmetrize
from flecs.utils.data import check_matrix

logger = logging.getLogger(__name__)

#: L-SR1 middle matrix M - S^T B S, i.e. the curvature pairs matrix S^T (Y - B S).
LSR1_SECANT = 'secant'
#: L-SR1 middle matrix M - S^T Y, as printed in the original algorithm listing.
LSR1_PRINTED = 'printed'

#: The Hessian approximation update rules.
LSR1 = 'lsr1'
DIRECT = 'direct'


def lsr1_correction(
    b: np.ndarray,
    y_tilde: np.ndarray,
    m: np.ndarray,
    s: np.ndarray,
    omega_trunc: float,
    middle: str = LSR1_SECANT
) -> Tuple[np.ndarray, int]:
    """
    Compute the truncated L-SR1 correction R U [L^-1]_omega U^T R^T, where R = Y - B S and U L U^T is the
    spectral decomposition of the middle matrix. Eigenvalues l having |l| < omega are skipped, i.e. the
    corresponding entries of [L^-1]_omega are set to zero.

    :param b: The (d, d) Hessian approximation.
    :param y_tilde: The (d, m) reconstructed Hessian sketch.
    :param m: The (m, m) matrix S^T Y.
    :param s: The (d, m) sketch.
    :param omega_trunc: The truncation constant.
    :param middle: The middle matrix variant. It can be either 'secant' or 'printed'.
    :return: The (d, d) correction and the number of skipped eigenvalues.
    :raises ConfigError: If a parameter is out of domain.
    """
    if omega_trunc <= 0.0:
        raise ConfigError("The truncation constant must be positive")
    b = check_matrix(b, square=True, name='Hessian approximation')
    s = check_matrix(s, shape=(b.shape[0], None), name='sketch matrix')
    y_tilde = check_matrix(y_tilde, shape=s.shape, name='Hessian sketch')
    m = check_matrix(m, shape=(s.shape[1], s.shape[1]), name='curvature matrix')

    bs = b @ s
    residual = y_tilde - bs
    if middle == LSR1_SECANT:
        middle_matrix = m - s.T @ bs
    elif middle == LSR1_PRINTED:
        middle_matrix = m - s.T @ y_tilde
    else:
        raise ConfigError("Unknown L-SR1 middle matrix variant called {}".format(middle))

    eig = sym_eig(middle_matrix)
    keep = np.abs(eig.eigenvalues) >= omega_trunc
    inv_l = np.zeros_like(eig.eigenvalues)
    inv_l[keep] = 1.0 / eig.eigenvalues[keep]
    ru = residual @ eig.eigenvectors
    return (ru * inv_l) @ ru.T, int(np.sum(~keep))


def lsr1_update(
    b: np.ndarray,
    y_tilde: np.ndarray,
    m: np.ndarray,
    s: np.ndarray,
    omega_trunc: float,
    middle: str = LSR1_SECANT
) -> np.ndarray:
    """
    Truncated L-SR1 update of a Hessian approximation.

    :param b: The (d, d) Hessian approximation B_k^i.
    :param y_tilde: The (d, m) reconstructed Hessian sketch.
    :param m: The (m, m) matrix S^T Y.
    :param s: The (d, m) sketch.
    :param omega_trunc: The truncation constant.
    :param middle: The middle matrix variant. It can be either 'secant' or 'printed'.
    :return: The updated (symmetric) Hessian approximation B_{k+1}^i.
    """
    correction, n_skipped = lsr1_correction(b, y_tilde, m, s, omega_trunc, middle)
    if n_skipped > 0:
        logger.debug("Truncated L-SR1 update skipped %d eigenvalues out of %d", n_skipped, s.shape[1])
    return symmetrize(b + correction)


def direct_update(b: np.ndarray, y_tilde: np.ndarray, m: np.ndarray, beta: float) -> np.ndarray:
    """
    Direct update of a Hessian approximation, i.e. B_{k+1} = (1 - beta) B_k + beta Y M^+ Y^T.

    :param b: The (d, d) Hessian approximation B_k^i.
    :param y_tilde: The (d, m) reconstructed Hessian sketch.
    :param m: The (m, m) matrix S^T Y.
    :param beta: The learning rate, in (0, 1].
    :return: The updated (symmetric) Hessian approximation B_{k+1}^i.
    :raises ConfigError: If the learning rate is out of domain.
    """
    if beta <= 0.0 or beta > 1.0:
        raise ConfigError("The learning rate of the direct update must be in (0, 1]")
    b = check_matrix(b, square=True, name='Hessian approximation')
    y_tilde = check_matrix(y_tilde, shape=(b.shape[0], None), name='Hessian sketch')
    m = check_matrix(m, shape=(y_tilde.shape[1], y_tilde.shape[1]), name='curvature matrix')
    b_tilde = symmetrize(y_tilde @ pinv(m) @ y_tilde.T)
    return symmetrize((1.0 - beta) * b + beta * b_tilde)
