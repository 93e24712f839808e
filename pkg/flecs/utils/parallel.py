# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Any, Callable, List, Sequence

import joblib


def parallel_map(func: Callable[[Any], Any], items: Sequence[Any], n_jobs: int = 0) -> List[Any]:
    """
    Apply a function to each item, possibly in parallel threads.
    The results are returned in the same order of the items, regardless of the scheduling.

    :param func: The function to apply.
    :param items: The items.
    :param n_jobs: The number of parallel jobs. It follows the joblib's convention. Set to 0 to disable.
    :return: The list of results.
    """
    if n_jobs == 0 or len(items) <= 1:
        return [func(item) for item in items]

    # Run parallel threads using joblib
    with joblib.parallel_backend('threading', n_jobs=n_jobs):
        with joblib.Parallel() as parallel:
            return list(parallel(joblib.delayed(func)(item) for item in items))
