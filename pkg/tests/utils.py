import numpy as np

from typing import List, Optional
from scipy import sparse

from flecs.objectives.logistic import LogisticShard
from flecs.objectives.quadratic import QuadraticShard


def random_spd_matrix(
    dim: int,
    random_state: np.random.Generator,
    min_eig: float = 1.0,
    max_eig: float = 10.0
) -> np.ndarray:
    """
    Generate a random symmetric positive definite matrix having eigenvalues in a given interval.

    :param dim: The dimension.
    :param random_state: The random state.
    :param min_eig: The smallest eigenvalue.
    :param max_eig: The largest eigenvalue.
    :return: The matrix.
    """
    q, _ = np.linalg.qr(random_state.standard_normal((dim, dim)))
    lambdas = np.linspace(min_eig, max_eig, num=dim)
    h = (q * lambdas) @ q.T
    return 0.5 * (h + h.T)


def random_quadratic_shards(n_shards: int, dim: int, random_state: np.random.Generator) -> List[QuadraticShard]:
    """
    Generate random strongly convex quadratic local functions.

    :param n_shards: The number of local functions.
    :param dim: The dimension.
    :param random_state: The random state.
    :return: The local functions.
    """
    return [
        QuadraticShard(random_spd_matrix(dim, random_state), random_state.standard_normal(dim))
        for _ in range(n_shards)
    ]


def random_logistic_shard(
    n_samples: int,
    dim: int,
    random_state: np.random.Generator,
    reg_mu: float = 1e-2,
    density: Optional[float] = None
) -> LogisticShard:
    """
    Generate a random logistic regression local function.

    :param n_samples: The number of samples.
    :param dim: The dimension.
    :param random_state: The random state.
    :param reg_mu: The regularization coefficient.
    :param density: The density of sparse features. If None dense features are generated.
    :return: The local function.
    """
    if density is None:
        features = random_state.standard_normal((n_samples, dim))
    else:
        features = sparse.random(n_samples, dim, density=density, format='csr', random_state=random_state,
                                 data_rvs=random_state.standard_normal)
    labels = np.where(random_state.random(n_samples) < 0.5, -1.0, 1.0)
    return LogisticShard(features, labels, reg_mu=reg_mu)


def naive_logistic_value(features: np.ndarray, labels: np.ndarray, reg_mu: float, w: np.ndarray) -> float:
    """
    Compute the regularized logistic loss with a per-sample summation.

    :param features: The dense features.
    :param labels: The labels.
    :param reg_mu: The regularization coefficient.
    :param w: The parameters.
    :return: The loss value.
    """
    total = 0.0
    for a, b in zip(features, labels):
        total += np.log(1.0 + np.exp(-b * np.dot(a, w)))
    return total / len(labels) + 0.5 * reg_mu * np.dot(w, w)


def naive_logistic_gradient(features: np.ndarray, labels: np.ndarray, reg_mu: float, w: np.ndarray) -> np.ndarray:
    """
    Compute the gradient of the regularized logistic loss with a per-sample summation.

    :param features: The dense features.
    :param labels: The labels.
    :param reg_mu: The regularization coefficient.
    :param w: The parameters.
    :return: The gradient.
    """
    total = np.zeros_like(w)
    for a, b in zip(features, labels):
        total += -b * a / (1.0 + np.exp(b * np.dot(a, w)))
    return total / len(labels) + reg_mu * w


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """
    Compute the relative error ||a - b|| / ||b||.

    :param a: The approximation.
    :param b: The reference.
    :return: The relative error.
    """
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
