# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.special import expit

from flecs.errors import DataError
from flecs.objectives.base import Shard, BatchSpec, FULL
from flecs.utils.data import check_vector, check_matrix, check_finite
from flecs.utils.random import RandomState


def logistic_loss(z: np.ndarray) -> np.ndarray:
    """
    Compute log(1 + exp(-z)) in a numerically stable way.

    :param z: The margins.
    :return: The logistic losses.
    """
    return np.log1p(np.exp(-np.abs(z))) + np.maximum(0.0, -z)


class LogisticShard(Shard):
    def __init__(
        self,
        features: Union[np.ndarray, sparse.spmatrix],
        labels: np.ndarray,
        reg_mu: float = 0.0
    ):
        """
        Build a regularized logistic regression local function, i.e.
        f(w) = (1/r) sum_j log(1 + exp(-b_j a_j^T w)) + (mu/2) ||w||^2.

        :param features: The (r, d) features matrix, either dense or sparse.
        :param labels: The r labels, each in {-1, +1}.
        :param reg_mu: The L2 regularization coefficient mu.
        :raises DataError: If the features or the labels are not valid.
        :raises ValueError: If the regularization coefficient is negative.
        """
        if reg_mu < 0.0:
            raise ValueError("The regularization coefficient must be non-negative")
        if sparse.issparse(features):
            features = sparse.csr_matrix(features, dtype=np.float64)
            check_finite(features.data, 'features')
        else:
            features = check_matrix(features, name='features')
        labels = np.asarray(labels, dtype=np.float64)
        if labels.ndim != 1 or len(labels) != features.shape[0]:
            raise DataError("There must be exactly one label per sample")
        if len(labels) == 0:
            raise DataError("A logistic local function must have at least one sample")
        if not np.all(np.isin(labels, [-1.0, 1.0])):
            raise DataError("The labels must be either -1 or +1")
        self.features = features
        self.labels = labels
        self.reg_mu = float(reg_mu)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    def _slice(self, idx: Optional[np.ndarray]):
        if idx is None:
            return self.features, self.labels
        return self.features[idx], self.labels[idx]

    def value(self, w: np.ndarray) -> float:
        w = check_vector(w, dim=self.dim, name='parameters')
        z = self.labels * (self.features @ w)
        return float(np.mean(logistic_loss(z)) + 0.5 * self.reg_mu * np.dot(w, w))

    def gradient(
        self,
        w: np.ndarray,
        batch: BatchSpec = FULL,
        random_state: Optional[RandomState] = None
    ) -> np.ndarray:
        w = check_vector(w, dim=self.dim, name='parameters')
        a, b = self._slice(batch.sample_indices(self.n_samples, random_state))
        z = b * (a @ w)
        coefs = -b * expit(-z) / len(b)
        return np.asarray(a.T @ coefs).ravel() + self.reg_mu * w

    def hessian_sketch(
        self,
        w: np.ndarray,
        s: np.ndarray,
        batch: BatchSpec = FULL,
        random_state: Optional[RandomState] = None
    ) -> np.ndarray:
        w = check_vector(w, dim=self.dim, name='parameters')
        s = check_matrix(s, shape=(self.dim, None), name='sketch matrix')
        a, b = self._slice(batch.sample_indices(self.n_samples, random_state))
        z = b * (a @ w)
        curvature = expit(z) * expit(-z) / len(b)
        return np.asarray(a.T @ (curvature[:, np.newaxis] * (a @ s))) + self.reg_mu * s
