# MIT License: Copyright (c) 2022 flecs-kit developers

import abc
from dataclasses import dataclass
from typing import Optional, Tuple, List

import numpy as np

from flecs.errors import ConfigError
from flecs.utils.random import RandomState, check_random_state

#: The full batch mode, i.e. exact oracles.
FULL_BATCH = 'full'
#: The minibatch mode, i.e. unbiased stochastic oracles.
MINIBATCH = 'minibatch'


@dataclass(frozen=True)
class BatchSpec:
    """
    Specification of the oracle sampling mode.

    :param mode: The batch mode. It can be either 'full' or 'minibatch'.
    :param size: The minibatch size. Only used in minibatch mode.
    """
    mode: str = FULL_BATCH
    size: Optional[int] = None

    def __post_init__(self):
        if self.mode not in [FULL_BATCH, MINIBATCH]:
            raise ConfigError("Unknown batch mode called {}".format(self.mode))
        if self.mode == MINIBATCH and (self.size is None or self.size < 1):
            raise ConfigError("The minibatch size must be a positive integer")

    @property
    def is_full(self) -> bool:
        return self.mode == FULL_BATCH

    def sample_indices(self, n_samples: int, random_state: Optional[RandomState] = None) -> Optional[np.ndarray]:
        """
        Sample the indices of a minibatch, uniformly at random without replacement.

        :param n_samples: The number of samples of the local function.
        :param random_state: The random state. It can be either None, a seed integer or a Numpy Generator.
        :return: The sorted sample indices, or None in full batch mode (or if the minibatch covers all the samples).
        :raises ConfigError: If the minibatch size exceeds the number of samples.
        """
        if self.is_full:
            return None
        if self.size > n_samples:
            raise ConfigError("The minibatch size must not exceed the number of samples ({})".format(n_samples))
        if self.size == n_samples:
            return None
        random_state = check_random_state(random_state)
        return np.sort(random_state.choice(n_samples, size=self.size, replace=False))


#: The default (full) batch specification.
FULL = BatchSpec()


class Shard(abc.ABC):
    """Abstract local function f_i held by a worker."""
    @property
    @abc.abstractmethod
    def dim(self) -> int:
        """The number of parameters d."""

    @property
    @abc.abstractmethod
    def n_samples(self) -> int:
        """The number of samples r of the local function."""

    @abc.abstractmethod
    def value(self, w: np.ndarray) -> float:
        """
        Compute the exact value of the local function.

        :param w: The parameters.
        :return: The value f_i(w).
        """

    @abc.abstractmethod
    def gradient(
        self,
        w: np.ndarray,
        batch: BatchSpec = FULL,
        random_state: Optional[RandomState] = None
    ) -> np.ndarray:
        """
        Compute the gradient of the local function, or an unbiased estimate of it.

        :param w: The parameters.
        :param batch: The batch specification.
        :param random_state: The random state used in minibatch mode.
        :return: The (estimated) gradient.
        """

    @abc.abstractmethod
    def hessian_sketch(
        self,
        w: np.ndarray,
        s: np.ndarray,
        batch: BatchSpec = FULL,
        random_state: Optional[RandomState] = None
    ) -> np.ndarray:
        """
        Compute the product between the Hessian of the local function and a sketch matrix, or an unbiased estimate
        of it, without materializing the Hessian.

        :param w: The parameters.
        :param s: The (d, m) sketch matrix.
        :param batch: The batch specification.
        :param random_state: The random state used in minibatch mode.
        :return: The (d, m) Hessian-sketch product.
        """


def global_value_and_grad(shards: List[Shard], w: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Compute the exact value and gradient of the global objective F(w) = (1/n) sum_i f_i(w).

    :param shards: The local functions.
    :param w: The parameters.
    :return: The value and the gradient of the global objective.
    :raises ValueError: If the list of local functions is empty.
    """
    if len(shards) == 0:
        raise ValueError("The list of local functions must be non-empty")
    value = np.mean([shard.value(w) for shard in shards])
    gradient = np.mean([shard.gradient(w) for shard in shards], axis=0)
    return float(value), gradient
