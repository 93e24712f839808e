# MIT License: Copyright (c) 2022 flecs-kit developers

import numpy as np
from scipy import sparse
from scipy.special import expit

from flecs.datasets.libsvm import Dataset
from flecs.utils.random import derive_generator, SYNTHETIC_TAG


def make_synthetic_dataset(
    n_samples: int = 1000,
    dim: int = 50,
    heterogeneity: float = 0.0,
    n_blocks: int = 1,
    seed: int = 42
) -> Dataset:
    """
    Generate a synthetic binary classification dataset, having labels drawn from a logistic model
    around a random ground-truth parameters vector.

    Rows are generated in n_blocks contiguous blocks. The features of block i are shifted by
    heterogeneity * z_i, with z_i a random standard Gaussian vector, so that contiguous partitioning
    in n_blocks workers yields non-identically distributed local data.

    :param n_samples: The number of samples.
    :param dim: The number of features.
    :param heterogeneity: The magnitude of the per-block features shift.
    :param n_blocks: The number of blocks.
    :param seed: The seed.
    :return: The synthetic dataset.
    :raises ValueError: If a parameter is out of domain.
    """
    if n_samples <= 0 or dim <= 0:
        raise ValueError("The number of samples and features must be positive")
    if heterogeneity < 0.0:
        raise ValueError("The heterogeneity must be non-negative")
    if n_blocks <= 0 or n_blocks > n_samples:
        raise ValueError("The number of blocks must be positive and at most the number of samples")

    random_state = derive_generator(seed, SYNTHETIC_TAG)
    w_true = random_state.standard_normal(dim) / np.sqrt(dim)
    features = random_state.standard_normal((n_samples, dim))
    if heterogeneity > 0.0:
        block = n_samples // n_blocks
        for i in range(n_blocks):
            end = n_samples if i == n_blocks - 1 else (i + 1) * block
            features[i * block:end] += heterogeneity * random_state.standard_normal(dim)
    probs = expit(features @ w_true)
    labels = np.where(random_state.random(n_samples) < probs, 1.0, -1.0)
    return Dataset(sparse.csr_matrix(features), labels, dim)
