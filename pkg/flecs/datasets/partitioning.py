# MIT License: Copyright (c) 2022 flecs-kit developers

from dataclasses import dataclass
from typing import List

import numpy as np

from flecs.errors import ConfigError, DataError
from flecs.datasets.libsvm import Dataset
from flecs.objectives.logistic import LogisticShard
from flecs.utils.random import derive_generator, PARTITION_TAG

#: Contiguous partitioning, i.e. rows are assigned to workers by blocks in file order.
CONTIGUOUS = 'contiguous'
#: Shuffled partitioning, i.e. rows are permuted (with a seed) before block assignment.
SHUFFLED = 'shuffled'


@dataclass(frozen=True)
class PartitionSpec:
    """
    Specification of how rows are split across workers.

    :param n_workers: The number of workers.
    :param mode: The partitioning mode. It can be either 'contiguous' or 'shuffled'.
    :param seed: The seed of the permutation, used in shuffled mode only.
    """
    n_workers: int = 1
    mode: str = CONTIGUOUS
    seed: int = 42

    def __post_init__(self):
        if self.n_workers < 1:
            raise ConfigError("The number of workers must be positive")
        if self.mode not in [CONTIGUOUS, SHUFFLED]:
            raise ConfigError("Unknown partitioning mode called {}".format(self.mode))


def partition_indices(n_samples: int, spec: PartitionSpec) -> List[np.ndarray]:
    """
    Compute the row indices of each worker. Each of the first n - 1 workers gets floor(n_samples / n) rows
    and the remainder rows go to the last worker.

    :param n_samples: The number of rows.
    :param spec: The partitioning specification.
    :return: A list of row indices arrays, one for each worker.
    :raises DataError: If there are more workers than rows.
    """
    if spec.n_workers > n_samples:
        raise DataError("The number of workers ({}) exceeds the number of rows ({})".format(
            spec.n_workers, n_samples
        ))
    if spec.mode == SHUFFLED:
        order = derive_generator(spec.seed, PARTITION_TAG).permutation(n_samples)
    else:
        order = np.arange(n_samples)
    block = n_samples // spec.n_workers
    bounds = [i * block for i in range(spec.n_workers)] + [n_samples]
    return [order[bounds[i]:bounds[i + 1]] for i in range(spec.n_workers)]


def partition(ds: Dataset, spec: PartitionSpec, reg_mu: float = 0.0) -> List[LogisticShard]:
    """
    Split a dataset into disjoint logistic regression local functions, one for each worker.

    :param ds: The dataset.
    :param spec: The partitioning specification.
    :param reg_mu: The L2 regularization coefficient of every local function.
    :return: The list of local functions.
    :raises DataError: If there are more workers than rows.
    """
    return [
        LogisticShard(ds.rows[idx], ds.labels[idx], reg_mu=reg_mu)
        for idx in partition_indices(ds.n_samples, spec)
    ]
