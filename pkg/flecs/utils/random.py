# MIT License: Copyright (c) 2022 flecs-kit developers

import zlib
from typing import Optional, Union

import numpy as np

#: A random state type is either an integer seed value or a Numpy Generator instance.
RandomState = Union[int, np.random.Generator]

#: Purpose tags of the independent random streams used by a simulation.
SKETCH_TAG = 'sketch'
GRAD_ORACLE_TAG = 'grad-oracle'
HESS_ORACLE_TAG = 'hess-oracle'
GRAD_COMPRESS_TAG = 'grad-compress'
HESS_COMPRESS_TAG = 'hess-compress'
PARTITION_TAG = 'partition'
SYNTHETIC_TAG = 'synthetic'


def check_random_state(random_state: Optional[RandomState] = None) -> np.random.Generator:
    """
    Check a possible input random state and return it as a Numpy's Generator object.

    :param random_state: The random state to check. If None a new Numpy Generator will be returned.
                         If not None, it can be either a seed integer or a np.random.Generator instance.
                         In the latter case, itself will be returned.
    :return: A Numpy's Generator object.
    :raises ValueError: If the random state is not None or a seed integer or a Numpy Generator object.
    """
    if random_state is None:
        return np.random.default_rng()
    if isinstance(random_state, (int, np.integer)) and not isinstance(random_state, bool):
        return np.random.default_rng(int(random_state))
    if isinstance(random_state, np.random.Generator):
        return random_state
    raise ValueError("The random state must be either None, a seed integer or a Numpy Generator object")


def derive_generator(global_seed: int, tag: str, *keys: int) -> np.random.Generator:
    """
    Derive an independent random stream from a global seed, a purpose tag and some integer keys
    (e.g. the round number and the worker id).

    The derived stream only depends on its arguments, hence it is the same regardless of the order
    in which streams are requested or of the thread requesting it.

    :param global_seed: The global seed of the simulation.
    :param tag: The purpose tag of the stream.
    :param keys: Additional non-negative integer keys.
    :return: A Numpy's Generator object.
    :raises ValueError: If the seed or some key is negative.
    """
    if global_seed < 0:
        raise ValueError("The global seed must be non-negative")
    if any(k < 0 for k in keys):
        raise ValueError("The keys of a random stream must be non-negative")
    tag_key = zlib.crc32(tag.encode('utf-8'))
    seq = np.random.SeedSequence(int(global_seed), spawn_key=(tag_key, *map(int, keys)))
    return np.random.default_rng(seq)
