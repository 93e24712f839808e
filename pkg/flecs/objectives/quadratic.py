# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Optional

import numpy as np

from flecs.objectives.base import Shard, BatchSpec, FULL
from flecs.utils.data import check_vector, check_matrix, check_symmetric
from flecs.utils.random import RandomState


class QuadraticShard(Shard):
    def __init__(self, h: np.ndarray, b: np.ndarray):
        """
        Build a quadratic local function f(w) = (1/2) w^T H w + b^T w. Its oracles are always exact.

        :param h: The (d, d) symmetric positive semi-definite matrix H.
        :param b: The linear term of dimension d.
        :raises NumericError: If H is not symmetric.
        """
        self.h = check_symmetric(check_matrix(h, square=True, name='quadratic matrix'), rtol=1e-12,
                                 name='quadratic matrix')
        self.b = check_vector(b, dim=self.h.shape[0], name='linear term')

    @property
    def dim(self) -> int:
        return len(self.b)

    @property
    def n_samples(self) -> int:
        return 1

    def minimizer(self) -> np.ndarray:
        """
        Compute a minimizer -H^+ b of the quadratic function.

        :return: The minimizer.
        """
        return -np.linalg.lstsq(self.h, self.b, rcond=None)[0]

    def value(self, w: np.ndarray) -> float:
        w = check_vector(w, dim=self.dim, name='parameters')
        return float(0.5 * np.dot(w, self.h @ w) + np.dot(self.b, w))

    def gradient(
        self,
        w: np.ndarray,
        batch: BatchSpec = FULL,
        random_state: Optional[RandomState] = None
    ) -> np.ndarray:
        w = check_vector(w, dim=self.dim, name='parameters')
        return self.h @ w + self.b

    def hessian_sketch(
        self,
        w: np.ndarray,
        s: np.ndarray,
        batch: BatchSpec = FULL,
        random_state: Optional[RandomState] = None
    ) -> np.ndarray:
        check_vector(w, dim=self.dim, name='parameters')
        s = check_matrix(s, shape=(self.dim, None), name='sketch matrix')
        return self.h @ s
