# MIT License: Copyright (c) 2022 flecs-kit developers

import time
import logging
import dataclasses
from collections import OrderedDict
from typing import Optional, List, Dict, NamedTuple, Callable

import numpy as np
from tqdm import tqdm

from flecs.errors import ConfigError, NumericError
from flecs.compression.base import IDENTITY
from flecs.datasets.libsvm import Dataset, load_libsvm
from flecs.datasets.partitioning import partition
from flecs.datasets.synthetic import make_synthetic_dataset
from flecs.harness.config import RunConfig, SYNTHETIC
from flecs.objectives.base import Shard, global_value_and_grad
from flecs.optim.server import init_server, initial_downlinks, server_round
from flecs.optim.worker import init_worker, worker_round
from flecs.protocol.bits import BitLedger
from flecs.protocol.sketch import sample_sketch
from flecs.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

#: The columns of a trace.
TRACE_COLUMNS = ['k', 'objective', 'grad_sq_norm', 'uplink_bits', 'downlink_bits', 'ms']


class TraceRow(NamedTuple):
    """
    The metrics of a simulation at a round boundary.

    :param k: The round number.
    :param objective: The exact global objective F(w_k).
    :param grad_sq_norm: The exact squared gradient norm of the global objective at w_k.
    :param uplink_bits: The cumulative uplink bits per node.
    :param downlink_bits: The cumulative downlink bits per node.
    :param ms: The elapsed wall-clock milliseconds, or zero if timing is not recorded.
    """
    k: int
    objective: float
    grad_sq_norm: float
    uplink_bits: int
    downlink_bits: int
    ms: float


def _identity_gradients(config: RunConfig) -> RunConfig:
    return dataclasses.replace(config, grad_compressor=IDENTITY, gamma=1.0)


#: The variants that can be compared. FLECS sends uncompressed gradients, while keeping the Hessian-sketch compressor.
VARIANTS: Dict[str, Callable[[RunConfig], RunConfig]] = OrderedDict([
    ('cgd', lambda config: config),
    ('flecs', _identity_gradients)
])


def load_dataset(config: RunConfig) -> Dataset:
    """
    Load the dataset of a configuration, either synthetic or from a LIBSVM file.

    :param config: The configuration.
    :return: The dataset.
    :raises DataError: If the dataset file cannot be read or parsed.
    """
    if config.dataset == SYNTHETIC:
        return make_synthetic_dataset(
            config.synthetic_samples, config.synthetic_dim, config.synthetic_heterogeneity,
            n_blocks=min(config.n_workers, config.synthetic_samples), seed=config.seed
        )
    return load_libsvm(config.dataset, n_features=config.n_features)


def build_shards(config: RunConfig) -> List[Shard]:
    """
    Build the local functions of the workers, by loading and partitioning the dataset of a configuration.

    :param config: The configuration.
    :return: The local functions, one per worker.
    :raises DataError: If the dataset cannot be loaded or partitioned.
    """
    ds = load_dataset(config)
    logger.info("Loaded dataset %s having %d samples and %d features", config.dataset, ds.n_samples, ds.dim)
    return partition(ds, config.partition_spec, reg_mu=config.reg_mu)


def _check_setup(config: RunConfig, shards: List[Shard], w0: np.ndarray):
    if len(shards) != config.n_workers:
        raise ConfigError("There must be one local function per worker")
    d = shards[0].dim
    if any(shard.dim != d for shard in shards) or len(w0) != d:
        raise ConfigError("The local functions and the initial iterate must have the same dimension")
    if config.memory > d:
        raise ConfigError("The memory size must not exceed the number of parameters")
    if config.batch_size is not None and not config.batch_spec.is_full:
        if config.batch_size > min(shard.n_samples for shard in shards):
            raise ConfigError("The batch size must not exceed the number of samples of any worker")


def run(
    config: RunConfig,
    shards: Optional[List[Shard]] = None,
    w0: Optional[np.ndarray] = None
) -> List[TraceRow]:
    """
    Run a simulation of FLECS-CGD for a number of synchronous rounds.
    The metrics are computed with the exact full-data oracles, and the first row is a pure evaluation at w_0.

    :param config: The configuration.
    :param shards: The local functions. If None they are built from the configuration.
    :param w0: The initial iterate. If None it defaults to zero.
    :return: The trace, having K + 1 rows.
    :raises ConfigError: If the configuration is not valid.
    :raises DataError: If the dataset cannot be loaded.
    :raises NumericError: If the simulation produces non-finite values.
    """
    config.validate()
    if shards is None:
        shards = build_shards(config)
    d = shards[0].dim if shards else 0
    w0 = np.zeros(d) if w0 is None else np.array(w0, dtype=np.float64)
    _check_setup(config, shards, w0)

    workers = [init_worker(i, shard, config.seed) for i, shard in enumerate(shards)]
    server = init_server(
        w0, config.n_workers, b0_scale=config.b0_scale, sketch=config.sketch_spec,
        alpha=config.alpha, gamma=config.gamma, beta=config.beta, rho=config.rho_value,
        omega_trunc=config.omega_trunc, Omega_trunc=config.Omega_trunc,
        hessian_update=config.hessian_update, direction=config.direction, lsr1_middle=config.lsr1_middle,
        float_bits=config.float_bits, n_jobs=config.n_jobs
    )
    grad_spec, hess_spec, batch = config.grad_spec, config.hess_spec, config.batch_spec
    ledger = BitLedger()
    start_time = time.perf_counter()

    def evaluate(k: int) -> TraceRow:
        value, grad = global_value_and_grad(shards, server.w)
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            raise NumericError("The simulation diverged at round {}".format(k))
        ms = 1e3 * (time.perf_counter() - start_time) if config.record_time else 0.0
        return TraceRow(k, value, float(np.dot(grad, grad)), ledger.uplink, ledger.downlink, ms)

    logger.info("Running %d rounds with %d workers on %d parameters", config.rounds, config.n_workers, d)
    trace = [evaluate(0)]
    downlinks = initial_downlinks(server)

    # Initialize the tqdm bar, if verbose is specified
    iterator = range(config.rounds)
    if config.verbose:
        iterator = tqdm(
            iterator, leave=None, unit='round',
            bar_format='{desc}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}, {rate_fmt}]'
        )

    for k in iterator:
        s = sample_sketch(config.sketch_spec, d, k)

        def work(i: int):
            return worker_round(
                workers[i], downlinks[i].w, downlinks[i].BS, s, config.gamma, grad_spec, hess_spec,
                batch=batch, k=k, float_bits=config.float_bits
            )

        # The uplink messages are merged by worker id, regardless of the scheduling
        uplinks = parallel_map(work, list(range(config.n_workers)), n_jobs=config.n_jobs)
        _, downlinks = server_round(server, uplinks, k, s)
        ledger.record(uplinks, downlinks)
        trace.append(evaluate(k + 1))

        # Update the progress bar
        if config.verbose:
            iterator.set_description('Grad. Sq. Norm: {:.3e}'.format(trace[-1].grad_sq_norm))

    logger.info(
        "Finished with objective %.6e, squared gradient norm %.3e and %d uplink bits per node",
        trace[-1].objective, trace[-1].grad_sq_norm, ledger.uplink
    )
    return trace


def compare(
    config: RunConfig,
    variants: List[str],
    shards: Optional[List[Shard]] = None
) -> Dict[str, List[TraceRow]]:
    """
    Run several variants of a configuration, sharing the seed and the data partition.

    :param config: The base configuration.
    :param variants: The variant names. Each one can be either 'cgd' or 'flecs'.
    :param shards: The local functions. If None they are built once from the configuration.
    :return: The traces, indexed by variant name, in the given order.
    :raises ConfigError: If the list of variants is empty, or contains unknown or duplicated names.
    """
    if len(variants) == 0:
        raise ConfigError("The list of variants to compare must be non-empty")
    unknown = [v for v in variants if v not in VARIANTS]
    if unknown:
        raise ConfigError("Unknown variants called {}".format(', '.join(unknown)))
    if len(set(variants)) != len(variants):
        raise ConfigError("The list of variants to compare must not contain duplicates")

    config.validate()
    if shards is None:
        shards = build_shards(config)
    traces = OrderedDict()
    for name in variants:
        logger.info("Running variant %s", name)
        traces[name] = run(VARIANTS[name](config), shards)
    return traces


def bits_to_reach(trace: List[TraceRow], threshold: float) -> Optional[int]:
    """
    Compute the cumulative uplink bits per node needed to reach an objective threshold.

    :param trace: The trace.
    :param threshold: The objective threshold.
    :return: The uplink bits of the first row having objective not greater than the threshold,
             or None if the threshold is never reached.
    """
    for row in trace:
        if row.objective <= threshold:
            return row.uplink_bits
    return None
