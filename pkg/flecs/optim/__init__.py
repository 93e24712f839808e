from .worker import WorkerState, init_worker, worker_round
from .hessian import LSR1, DIRECT, LSR1_SECANT, LSR1_PRINTED, lsr1_correction, lsr1_update, direct_update
from .direction import TRUNCATED, FEDSONIA, direction_truncated, direction_fedsonia
from .server import ServerState, AggregateBundle, TraceInputs
from .server import init_server, initial_downlinks, aggregate, update_hessians, compute_direction, server_round
