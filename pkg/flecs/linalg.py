# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Optional, Tuple, NamedTuple

import numpy as np
from scipy import linalg

from flecs.errors import ConfigError, DimensionError
from flecs.utils.data import check_vector, check_matrix


class SymEigDecomposition(NamedTuple):
    """
    Spectral decomposition A = V diag(eigenvalues) V^T of a symmetric matrix.
    Eigenvalues are sorted in descending order.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def symmetrize(a: np.ndarray) -> np.ndarray:
    """
    Compute the symmetric part (A + A^T) / 2 of a square matrix.

    :param a: The square matrix.
    :return: The symmetric part of the matrix.
    """
    return 0.5 * (a + a.T)


def sym_eig(a: np.ndarray) -> SymEigDecomposition:
    """
    Compute the spectral decomposition of a (possibly slightly asymmetric) square matrix.
    The input is symmetrized before the decomposition, and each eigenvector is normalized
    such that its first non-negligible component is positive, so that results are reproducible.

    :param a: The square matrix.
    :return: The spectral decomposition, having eigenvalues in descending order.
    :raises DimensionError: If the matrix is not square.
    :raises NumericError: If the matrix contains non-finite values.
    """
    a = check_matrix(a, square=True, name='matrix to decompose')
    if a.shape[0] == 0:
        return SymEigDecomposition(np.empty(0), np.empty((0, 0)))
    eigenvalues, eigenvectors = linalg.eigh(symmetrize(a))
    eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]

    # Fix the sign of each eigenvector
    significant = np.abs(eigenvectors) > 1e-12
    first_idx = np.argmax(significant, axis=0)
    signs = np.sign(eigenvectors[first_idx, np.arange(len(first_idx))])
    signs[signs == 0.0] = 1.0
    return SymEigDecomposition(np.ascontiguousarray(eigenvalues), eigenvectors * signs)


def qr_thin(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Compute the thin QR factorization of a tall matrix.

    :param a: The (d, m) matrix, with d >= m.
    :return: A pair (Q, R), where Q is a (d, m) matrix with orthonormal columns and R is a (m, m) upper triangular.
    :raises DimensionError: If the matrix has more columns than rows.
    """
    a = check_matrix(a, name='matrix to factorize')
    d, m = a.shape
    if d < m:
        raise DimensionError("The thin QR factorization requires at least as many rows as columns")
    q, r = linalg.qr(a, mode='economic')
    return q, r


def qr_range(a: np.ndarray, tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Compute a rank-revealing thin QR factorization A = Q R by using column pivoting,
    where Q is an orthonormal basis of the range of A.

    :param a: The (d, m) matrix.
    :param tol: The threshold on the diagonal of R below which columns are considered dependent.
                If None, it defaults to max(d, m) * eps * |R_00|.
    :return: A pair (Q, R), where Q has shape (d, r) and R has shape (r, m), being r the numerical rank of A.
    """
    a = check_matrix(a, name='matrix to factorize')
    d, m = a.shape
    if d == 0 or m == 0 or not np.any(a):
        return np.zeros((d, 0)), np.zeros((0, m))
    q, r, perm = linalg.qr(a, mode='economic', pivoting=True)
    diag = np.abs(np.diag(r))
    if tol is None:
        tol = max(d, m) * np.finfo(np.float64).eps * diag[0]
    rank = int(np.sum(diag > tol))
    r_unperm = np.empty((rank, m))
    r_unperm[:, perm] = r[:rank]
    return q[:, :rank], r_unperm


def pinv(m: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """
    Compute the Moore-Penrose pseudo-inverse of a square matrix via the singular value decomposition.

    :param m: The square matrix.
    :param tol: Singular values not greater than this threshold are treated as zero.
                If None, it defaults to size * eps * largest singular value.
    :return: The pseudo-inverse.
    :raises DimensionError: If the matrix is not square.
    """
    m = check_matrix(m, square=True, name='matrix to pseudo-invert')
    if m.size == 0 or not np.any(m):
        return np.zeros_like(m)
    u, s, vt = linalg.svd(m)
    if tol is None:
        tol = len(s) * np.finfo(np.float64).eps * s[0]
    inv_s = np.zeros_like(s)
    mask = s > tol
    inv_s[mask] = 1.0 / s[mask]
    return (vt.T * inv_s) @ u.T


def check_truncation_band(omega_trunc: float, Omega_trunc: float):
    """
    Check the truncation constants.

    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :raises ConfigError: If the truncation constants are out of domain.
    """
    if omega_trunc <= 0.0:
        raise ConfigError("The lower truncation constant must be positive")
    if omega_trunc > Omega_trunc:
        raise ConfigError("The lower truncation constant must not exceed the upper one")


def truncate_spectrum(lambdas: np.ndarray, omega_trunc: float, Omega_trunc: float) -> np.ndarray:
    """
    Truncate a spectrum, i.e. replace each eigenvalue with min(max(|lambda|, omega), Omega).

    :param lambdas: The eigenvalues.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :return: The truncated eigenvalues, all lying in [omega_trunc, Omega_trunc].
    :raises ConfigError: If the truncation constants are out of domain.
    """
    check_truncation_band(omega_trunc, Omega_trunc)
    return np.clip(np.abs(np.asarray(lambdas, dtype=np.float64)), omega_trunc, Omega_trunc)


def truncated_inverse_apply(b: np.ndarray, v: np.ndarray, omega_trunc: float, Omega_trunc: float) -> np.ndarray:
    """
    Apply the truncated inverse of a symmetric matrix B, i.e. V diag(1 / |Lambda|_omega^Omega) V^T, to a vector.

    :param b: The (d, d) symmetric matrix.
    :param v: The vector of dimension d.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :return: The truncated inverse applied to the vector.
    :raises DimensionError: If there is a dimension mismatch between the matrix and the vector.
    :raises ConfigError: If the truncation constants are out of domain.
    """
    check_truncation_band(omega_trunc, Omega_trunc)
    b = check_matrix(b, square=True, name='matrix')
    v = check_vector(v, dim=b.shape[0], name='vector')
    eig = sym_eig(b)
    truncated = truncate_spectrum(eig.eigenvalues, omega_trunc, Omega_trunc)
    return eig.eigenvectors @ ((eig.eigenvectors.T @ v) / truncated)
