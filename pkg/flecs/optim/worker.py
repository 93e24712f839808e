# MIT License: Copyright (c) 2022 flecs-kit developers

from dataclasses import dataclass

import numpy as np

from flecs.compression.base import CompressorSpec
from flecs.compression.operators import compress_vector, compress_matrix
from flecs.errors import ConfigError
from flecs.objectives.base import Shard, BatchSpec, FULL
from flecs.protocol.messages import UplinkMessage, make_uplink
from flecs.utils.data import check_vector, check_matrix, check_finite
from flecs.utils.random import derive_generator
from flecs.utils.random import GRAD_ORACLE_TAG, HESS_ORACLE_TAG, GRAD_COMPRESS_TAG, HESS_COMPRESS_TAG


@dataclass
class WorkerState:
    """
    The state of a worker. The worker never stores its Hessian approximation,
    it only receives its product with the current sketch from the server.

    :param worker_id: The worker id.
    :param shard: The local function.
    :param h: The error feedback vector h_k^i, i.e. the worker's running memory of its gradient.
    :param global_seed: The global seed, from which the worker's random streams are derived.
    """
    worker_id: int
    shard: Shard
    h: np.ndarray
    global_seed: int = 42


def init_worker(worker_id: int, shard: Shard, global_seed: int = 42) -> WorkerState:
    """
    Build a worker state having zero error feedback vector.

    :param worker_id: The worker id.
    :param shard: The local function.
    :param global_seed: The global seed.
    :return: The worker state.
    """
    return WorkerState(worker_id, shard, np.zeros(shard.dim), global_seed)


def worker_round(
    state: WorkerState,
    w: np.ndarray,
    bs: np.ndarray,
    s: np.ndarray,
    gamma: float,
    grad_spec: CompressorSpec,
    hess_spec: CompressorSpec,
    batch: BatchSpec = FULL,
    k: int = 0,
    float_bits: int = 32
) -> UplinkMessage:
    """
    Execute the worker side of a round: query the local oracles, compress the gradient and Hessian-sketch
    differences, update the error feedback vector and build the uplink message.

    :param state: The worker state. Its error feedback vector is updated as h := h + gamma * c.
    :param w: The current iterate w_k.
    :param bs: The (d, m) product B_k^i S_k received from the server.
    :param s: The (d, m) sketch S_k.
    :param gamma: The error feedback step size.
    :param grad_spec: The gradient compressor specification.
    :param hess_spec: The Hessian-sketch compressor specification.
    :param batch: The batch specification of the oracles.
    :param k: The round number, used to derive the random streams.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The uplink message.
    :raises DimensionError: If there is a dimension mismatch.
    :raises NumericError: If some oracle output is not finite.
    :raises ConfigError: If the step size is not positive.
    """
    if gamma <= 0.0:
        raise ConfigError("The error feedback step size must be positive")
    d = state.shard.dim
    w = check_vector(w, dim=d, name='iterate')
    s = check_matrix(s, shape=(d, None), name='sketch matrix')
    bs = check_matrix(bs, shape=s.shape, name='Hessian-sketch product')
    seed, wid = state.global_seed, state.worker_id

    # Query the local (possibly stochastic) oracles
    g = check_finite(
        state.shard.gradient(w, batch, derive_generator(seed, GRAD_ORACLE_TAG, k, wid)), 'gradient'
    )
    y = check_finite(
        state.shard.hessian_sketch(w, s, batch, derive_generator(seed, HESS_ORACLE_TAG, k, wid)), 'Hessian sketch'
    )
    m = s.T @ y

    # Compress the differences w.r.t. the shared memories
    c = compress_vector(g - state.h, grad_spec, derive_generator(seed, GRAD_COMPRESS_TAG, k, wid))
    big_c = compress_matrix(y - bs, hess_spec, derive_generator(seed, HESS_COMPRESS_TAG, k, wid))

    state.h = state.h + gamma * c.value
    return make_uplink(wid, c, big_c, m, float_bits)
