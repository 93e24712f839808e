# MIT License: Copyright (c) 2022 flecs-kit developers

from dataclasses import dataclass

import numpy as np

from flecs.errors import ConfigError
from flecs.utils.random import derive_generator, SKETCH_TAG

#: Gaussian sketches, having i.i.d. N(0, 1/m) entries.
GAUSSIAN = 'gaussian'
#: Coordinate sketches, having m distinct standard basis columns.
COORDINATE = 'coordinate'


@dataclass(frozen=True)
class SketchSpec:
    """
    Specification of the random sketch matrices S_k shared by the server and the workers.

    :param kind: The sketch kind. It can be either 'gaussian' or 'coordinate'.
    :param memory: The memory size m, i.e. the number of columns of the sketch.
    :param global_seed: The global seed. Together with the round number, it determines the sketch.
    """
    kind: str = GAUSSIAN
    memory: int = 1
    global_seed: int = 42

    def __post_init__(self):
        if self.kind not in [GAUSSIAN, COORDINATE]:
            raise ConfigError("Unknown sketch kind called {}".format(self.kind))
        if self.memory < 1:
            raise ConfigError("The memory size must be positive")


def sample_sketch(spec: SketchSpec, d: int, k: int) -> np.ndarray:
    """
    Sample the sketch matrix of a round. The sketch is a deterministic function of the global seed
    and of the round number, which is how workers and server agree on it without communicating it.

    :param spec: The sketch specification.
    :param d: The number of parameters.
    :param k: The round number.
    :return: The (d, m) sketch matrix.
    :raises ConfigError: If the memory size exceeds the number of parameters.
    """
    m = spec.memory
    if m > d:
        raise ConfigError("The memory size ({}) must not exceed the number of parameters ({})".format(m, d))
    random_state = derive_generator(spec.global_seed, SKETCH_TAG, k)
    if spec.kind == GAUSSIAN:
        return random_state.standard_normal((d, m)) / np.sqrt(m)
    s = np.zeros((d, m))
    s[random_state.choice(d, size=m, replace=False), np.arange(m)] = 1.0
    return s
