# MIT License: Copyright (c) 2022 flecs-kit developers

import logging
from dataclasses import dataclass, field
from typing import List, Tuple, NamedTuple, Optional

import numpy as np

from flecs.errors import ConfigError
from flecs.linalg import check_truncation_band, symmetrize
from flecs.optim.hessian import LSR1, DIRECT, LSR1_SECANT, LSR1_PRINTED, lsr1_correction, direct_update
from flecs.optim.direction import TRUNCATED, FEDSONIA, direction_truncated, direction_fedsonia
from flecs.protocol.messages import UplinkMessage, DownlinkMessage, make_downlink
from flecs.protocol.sketch import SketchSpec, sample_sketch
from flecs.utils.parallel import parallel_map

logger = logging.getLogger(__name__)


@dataclass
class ServerState:
    """
    The state of the server.

    :param w: The current iterate w_k.
    :param B: The per-worker (d, d) Hessian approximations B_k^i.
    :param h_shadow: The server copies of the workers' error feedback vectors h_k^i.
    :param sketch: The sketch specification shared with the workers.
    :param alpha: The step size of the iterate update.
    :param gamma: The error feedback step size.
    :param beta: The learning rate of the direct Hessian approximation update.
    :param rho: The FedSONIA step scale on the orthogonal complement of the sketch range.
    :param omega_trunc: The lower truncation constant.
    :param Omega_trunc: The upper truncation constant.
    :param hessian_update: The Hessian approximation update rule. It can be either 'lsr1' or 'direct'.
    :param direction: The search direction rule. It can be either 'truncated' or 'fedsonia'.
    :param lsr1_middle: The L-SR1 middle matrix variant. It can be either 'secant' or 'printed'.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :param n_jobs: The number of parallel jobs for the per-worker Hessian updates.
    """
    w: np.ndarray
    B: List[np.ndarray]
    h_shadow: List[np.ndarray]
    sketch: SketchSpec = field(default_factory=SketchSpec)
    alpha: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0
    rho: float = 1e-8
    omega_trunc: float = 1e-5
    Omega_trunc: float = 1e8
    hessian_update: str = LSR1
    direction: str = FEDSONIA
    lsr1_middle: str = LSR1_SECANT
    float_bits: int = 32
    n_jobs: int = 0

    def __post_init__(self):
        check_truncation_band(self.omega_trunc, self.Omega_trunc)
        if self.alpha < 0.0:
            raise ConfigError("The step size must be non-negative")
        if self.gamma <= 0.0:
            raise ConfigError("The error feedback step size must be positive")
        if self.beta <= 0.0 or self.beta > 1.0:
            raise ConfigError("The learning rate of the direct update must be in (0, 1]")
        if self.rho <= 0.0:
            raise ConfigError("The FedSONIA orthogonal step scale must be positive")
        if self.hessian_update not in [LSR1, DIRECT]:
            raise ConfigError("Unknown Hessian approximation update called {}".format(self.hessian_update))
        if self.direction not in [TRUNCATED, FEDSONIA]:
            raise ConfigError("Unknown search direction called {}".format(self.direction))
        if self.lsr1_middle not in [LSR1_SECANT, LSR1_PRINTED]:
            raise ConfigError("Unknown L-SR1 middle matrix variant called {}".format(self.lsr1_middle))
        if len(self.B) != len(self.h_shadow) or len(self.B) == 0:
            raise ConfigError("There must be one Hessian approximation and one shadow memory per worker")

    @property
    def dim(self) -> int:
        return len(self.w)

    @property
    def n_workers(self) -> int:
        return len(self.B)


class AggregateBundle(NamedTuple):
    """
    The quantities reconstructed from the uplink messages of a round.

    :param g_tilde: The averaged gradient estimate.
    :param Y_tilde: The averaged (d, m) Hessian sketch.
    :param M: The averaged (m, m) curvature matrix.
    :param g_workers: The per-worker gradient estimates c_k^i + h_k^i.
    :param Y_workers: The per-worker Hessian sketches C_k^i + B_k^i S_k.
    :param M_workers: The per-worker curvature matrices.
    """
    g_tilde: np.ndarray
    Y_tilde: np.ndarray
    M: np.ndarray
    g_workers: List[np.ndarray]
    Y_workers: List[np.ndarray]
    M_workers: List[np.ndarray]


class TraceInputs(NamedTuple):
    """
    Per-round diagnostics computed by the server.

    :param k: The round number.
    :param g_tilde_sq_norm: The squared norm of the aggregated gradient estimate.
    :param p_norm: The norm of the search direction.
    :param n_skipped: The number of eigenvalues skipped by the truncated L-SR1 updates, over all workers.
    :param uplink_bits: The largest uplink message size of the round.
    :param downlink_bits: The largest downlink message size of the round.
    """
    k: int
    g_tilde_sq_norm: float
    p_norm: float
    n_skipped: int
    uplink_bits: int
    downlink_bits: int


def init_server(
    w0: np.ndarray,
    n_workers: int,
    b0_scale: float = 0.0,
    **kwargs
) -> ServerState:
    """
    Build the initial server state, having B_0^i = b0_scale * I and zero shadow memories.

    :param w0: The initial iterate.
    :param n_workers: The number of workers.
    :param b0_scale: The scale of the initial Hessian approximations.
    :param kwargs: Other hyperparameters of the server state.
    :return: The server state.
    """
    w0 = np.array(w0, dtype=np.float64)
    d = len(w0)
    return ServerState(
        w=w0,
        B=[b0_scale * np.eye(d) for _ in range(n_workers)],
        h_shadow=[np.zeros(d) for _ in range(n_workers)],
        **kwargs
    )


def initial_downlinks(state: ServerState) -> List[DownlinkMessage]:
    """
    Build the downlink messages preceding the first round, i.e. w_0 and B_0^i S_0.

    :param state: The server state.
    :return: The downlink messages, one per worker.
    """
    s = sample_sketch(state.sketch, state.dim, 0)
    return [make_downlink(state.w.copy(), b @ s, state.float_bits) for b in state.B]


def aggregate(state: ServerState, msgs: List[UplinkMessage], s: np.ndarray) -> AggregateBundle:
    """
    Reconstruct and average the gradient estimates and Hessian sketches of a round, and update the shadow
    memories exactly as the workers update theirs.

    :param state: The server state. Its shadow memories are updated as h := h + gamma * c.
    :param msgs: The uplink messages, one per worker.
    :param s: The (d, m) sketch of the round.
    :return: The aggregated bundle.
    :raises ValueError: If some worker message is missing or duplicated.
    """
    by_id = {msg.worker_id: msg for msg in msgs}
    if len(msgs) != state.n_workers or sorted(by_id) != list(range(state.n_workers)):
        raise ValueError("Exactly one uplink message per worker is required")

    g_workers, y_workers, m_workers = [], [], []
    for i in range(state.n_workers):
        msg = by_id[i]
        g_workers.append(msg.c.value + state.h_shadow[i])
        y_workers.append(msg.C.value + state.B[i] @ s)
        m_workers.append(msg.M)
        state.h_shadow[i] = state.h_shadow[i] + state.gamma * msg.c.value

    return AggregateBundle(
        np.mean(g_workers, axis=0), np.mean(y_workers, axis=0), np.mean(m_workers, axis=0),
        g_workers, y_workers, m_workers
    )


def update_hessians(state: ServerState, bundle: AggregateBundle, s: np.ndarray) -> int:
    """
    Update the per-worker Hessian approximations, possibly in parallel.

    :param state: The server state. Its Hessian approximations are replaced by the updated ones.
    :param bundle: The aggregated bundle of the round.
    :param s: The (d, m) sketch of the round.
    :return: The number of eigenvalues skipped by the truncated L-SR1 updates.
    """
    def update(i: int) -> Tuple[np.ndarray, int]:
        if state.hessian_update == DIRECT:
            return direct_update(state.B[i], bundle.Y_workers[i], bundle.M_workers[i], state.beta), 0
        correction, n_skipped = lsr1_correction(
            state.B[i], bundle.Y_workers[i], bundle.M_workers[i], s, state.omega_trunc, state.lsr1_middle
        )
        return symmetrize(state.B[i] + correction), n_skipped

    results = parallel_map(update, list(range(state.n_workers)), n_jobs=state.n_jobs)
    state.B = [b for b, _ in results]
    return sum(n for _, n in results)


def compute_direction(state: ServerState, bundle: AggregateBundle) -> np.ndarray:
    """
    Compute the search direction of a round, using the already updated Hessian approximations.

    :param state: The server state.
    :param bundle: The aggregated bundle of the round.
    :return: The search direction.
    """
    if state.direction == TRUNCATED:
        b_avg = symmetrize(np.mean(state.B, axis=0))
        return direction_truncated(b_avg, bundle.g_tilde, state.omega_trunc, state.Omega_trunc)
    return direction_fedsonia(
        bundle.Y_tilde, bundle.M, bundle.g_tilde, state.omega_trunc, state.Omega_trunc, state.rho
    )


def server_round(
    state: ServerState,
    msgs: List[UplinkMessage],
    k: int,
    s: Optional[np.ndarray] = None
) -> Tuple[TraceInputs, List[DownlinkMessage]]:
    """
    Execute the server side of a round: aggregate, update the Hessian approximations, compute the search
    direction, update the iterate and build the downlink messages for the next round.

    :param state: The server state, updated in place.
    :param msgs: The uplink messages, one per worker.
    :param k: The round number.
    :param s: The sketch of the round. If None it is sampled from the shared seed.
    :return: The round diagnostics and the downlink messages, one per worker.
    """
    if s is None:
        s = sample_sketch(state.sketch, state.dim, k)
    bundle = aggregate(state, msgs, s)
    n_skipped = update_hessians(state, bundle, s)
    p = compute_direction(state, bundle)
    state.w = state.w + state.alpha * p

    s_next = sample_sketch(state.sketch, state.dim, k + 1)
    downlinks = [make_downlink(state.w.copy(), b @ s_next, state.float_bits) for b in state.B]
    info = TraceInputs(
        k=k,
        g_tilde_sq_norm=float(np.dot(bundle.g_tilde, bundle.g_tilde)),
        p_norm=float(np.linalg.norm(p)),
        n_skipped=n_skipped,
        uplink_bits=max(msg.bits for msg in msgs),
        downlink_bits=max(msg.bits for msg in downlinks)
    )
    logger.debug(
        "Round %d: |g|^2 = %.3e, |p| = %.3e, skipped eigenvalues = %d", k, info.g_tilde_sq_norm, info.p_norm, n_skipped
    )
    return info, downlinks
