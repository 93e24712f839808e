from collections import OrderedDict
from typing import Dict, List, Optional

import numpy as np

from flecs.harness import TraceRow, bits_to_reach


def objective_thresholds(traces: Dict[str, List[TraceRow]], n_thresholds: int = 5) -> np.ndarray:
    """
    Compute objective thresholds reached by every trace, evenly spaced between the initial objective
    and the worst of the best objectives.

    :param traces: The traces, indexed by variant name.
    :param n_thresholds: The number of thresholds.
    :return: The thresholds, in decreasing order.
    """
    start = max(trace[0].objective for trace in traces.values())
    reached = max(min(row.objective for row in trace) for trace in traces.values())
    return np.linspace(start, reached, num=n_thresholds + 1)[1:]


def summarize_traces(traces: Dict[str, List[TraceRow]], n_thresholds: int = 5) -> dict:
    """
    Summarize the traces of a comparison, i.e. the final metrics and the uplink bits per node
    needed to reach some common objective thresholds.

    :param traces: The traces, indexed by variant name.
    :param n_thresholds: The number of thresholds.
    :return: The summary, as a JSON serializable dictionary.
    """
    thresholds = objective_thresholds(traces, n_thresholds)
    summary = OrderedDict()
    for name, trace in traces.items():
        bits: List[Optional[int]] = [bits_to_reach(trace, t) for t in thresholds]
        summary[name] = {
            'objective': trace[-1].objective,
            'grad_sq_norm': trace[-1].grad_sq_norm,
            'uplink_bits': trace[-1].uplink_bits,
            'downlink_bits': trace[-1].downlink_bits,
            'bits_to_reach': bits
        }
    summary['thresholds'] = thresholds.tolist()
    return summary
