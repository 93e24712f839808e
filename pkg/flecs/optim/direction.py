# MIT License: Copyright (c) 2022 flecs-kit developers

import numpy as np

from flecs.errors import ConfigError
from flecs.linalg import sym_eig, qr_range, pinv, symmetrize
from flecs.linalg import check_truncation_band, truncate_spectrum, truncated_inverse_apply
from flecs.utils.data import check_vector, check_matrix, check_symmetric

#: The search direction rules.
TRUNCATED = 'truncated'
FEDSONIA = 'fedsonia'


def direction_truncated(
    b_avg: np.ndarray,
    g_tilde: np.ndarray,
    omega_trunc: float,
    Omega_trunc: float
) -> np.ndarray:
    """
    Compute the truncated inverse Hessian approximation search direction p = -(|B|_omega^Omega)^-1 g.

    :param b_avg: The (d, d) averaged Hessian approximation.
    :param g_tilde: The aggregated gradient estimate.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :return: The search direction, a descent direction whenever the gradient estimate is not zero.
    """
    b_avg = check_symmetric(check_matrix(b_avg, square=True, name='Hessian approximation'),
                            name='Hessian approximation')
    return -truncated_inverse_apply(b_avg, g_tilde, omega_trunc, Omega_trunc)


def direction_fedsonia(
    y_tilde: np.ndarray,
    m: np.ndarray,
    g_tilde: np.ndarray,
    omega_trunc: float,
    Omega_trunc: float,
    rho: float
) -> np.ndarray:
    """
    Compute the FedSONIA search direction. The gradient estimate is split as g = g_par + g_perp by orthogonal
    projection onto the range of Y. Then, the truncated inverse of Y M^+ Y^T is applied on the range of Y,
    while the scalar rho is applied on its orthogonal complement, i.e.
    p = -(|Y M^+ Y^T|_omega^Omega)^-1 g_par - rho g_perp.

    :param y_tilde: The (d, m) aggregated Hessian sketch.
    :param m: The (m, m) aggregated curvature matrix.
    :param g_tilde: The aggregated gradient estimate.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :param rho: The positive step scale on the orthogonal complement of the range of Y.
    :return: The search direction.
    :raises ConfigError: If a parameter is out of domain.
    """
    check_truncation_band(omega_trunc, Omega_trunc)
    if rho <= 0.0:
        raise ConfigError("The FedSONIA orthogonal step scale must be positive")
    y_tilde = check_matrix(y_tilde, name='Hessian sketch')
    d, n_cols = y_tilde.shape
    m = check_matrix(m, shape=(n_cols, n_cols), name='curvature matrix')
    g_tilde = check_vector(g_tilde, dim=d, name='gradient estimate')

    q, r = qr_range(y_tilde)
    if q.shape[1] == 0:
        return -rho * g_tilde
    eig = sym_eig(symmetrize(r @ pinv(m) @ r.T))
    v_tilde = q @ eig.eigenvectors
    g_par = q @ (q.T @ g_tilde)
    g_perp = g_tilde - g_par
    truncated = truncate_spectrum(eig.eigenvalues, omega_trunc, Omega_trunc)
    return -(v_tilde @ ((v_tilde.T @ g_par) / truncated)) - rho * g_perp
