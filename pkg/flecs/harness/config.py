# MIT License: Copyright (c) 2022 flecs-kit developers

import os
import typing
import dataclasses
from dataclasses import dataclass
from typing import Optional, Union, Any

import numpy as np

from flecs.errors import ConfigError
from flecs.compression.base import CompressorSpec, RANDOM_DITHERING
from flecs.datasets.partitioning import PartitionSpec, CONTIGUOUS
from flecs.linalg import check_truncation_band
from flecs.objectives.base import BatchSpec, FULL_BATCH
from flecs.optim.direction import TRUNCATED, FEDSONIA
from flecs.optim.hessian import LSR1, DIRECT, LSR1_SECANT, LSR1_PRINTED
from flecs.protocol.sketch import SketchSpec, GAUSSIAN

#: The dataset name selecting synthetic data.
SYNTHETIC = 'synthetic'

#: Text values standing for None, for optional keys.
_NONE_VALUES = ['none', 'auto']


@dataclass(frozen=True)
class RunConfig:
    """
    The configuration of a simulation. Every field is a key of the flat configuration file format.
    Defaults follow the logistic regression experiments: B_0 = 0, omega = 1e-5, Omega = 1e8,
    alpha = beta = gamma = 1, rho = 1 / Omega, m = 1 and random dithering with s = 64 levels and inf-norm.
    """
    dataset: str = SYNTHETIC
    synthetic_samples: int = 1000
    synthetic_dim: int = 50
    synthetic_heterogeneity: float = 0.0
    n_features: Optional[int] = None
    n_workers: int = 4
    partition: str = CONTIGUOUS
    memory: int = 1
    sketch: str = GAUSSIAN
    grad_compressor: str = RANDOM_DITHERING
    grad_levels: int = 64
    grad_norm: float = np.inf
    hess_compressor: str = RANDOM_DITHERING
    hess_levels: int = 64
    hess_norm: float = np.inf
    float_bits: int = 32
    hessian_update: str = LSR1
    lsr1_middle: str = LSR1_SECANT
    direction: str = FEDSONIA
    alpha: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0
    rho: Optional[float] = None
    omega_trunc: float = 1e-5
    Omega_trunc: float = 1e8
    reg_mu: float = 1e-3
    b0_scale: float = 0.0
    batch: str = FULL_BATCH
    batch_size: Optional[int] = None
    rounds: int = 100
    seed: int = 42
    n_jobs: int = 0
    record_time: bool = False
    verbose: bool = False

    @property
    def grad_spec(self) -> CompressorSpec:
        return CompressorSpec(self.grad_compressor, self.grad_levels, self.grad_norm, self.float_bits)

    @property
    def hess_spec(self) -> CompressorSpec:
        return CompressorSpec(self.hess_compressor, self.hess_levels, self.hess_norm, self.float_bits)

    @property
    def batch_spec(self) -> BatchSpec:
        return BatchSpec(self.batch, self.batch_size)

    @property
    def sketch_spec(self) -> SketchSpec:
        return SketchSpec(self.sketch, self.memory, self.seed)

    @property
    def partition_spec(self) -> PartitionSpec:
        return PartitionSpec(self.n_workers, self.partition, self.seed)

    @property
    def rho_value(self) -> float:
        """The FedSONIA step scale, defaulting to 1 / Omega."""
        return 1.0 / self.Omega_trunc if self.rho is None else self.rho

    def validate(self) -> 'RunConfig':
        """
        Check every constraint of the configuration.

        :return: The configuration itself.
        :raises ConfigError: If some value is out of domain.
        """
        # The specification objects check their own constraints
        _ = self.grad_spec, self.hess_spec, self.batch_spec, self.sketch_spec, self.partition_spec
        check_truncation_band(self.omega_trunc, self.Omega_trunc)
        if self.hessian_update not in [LSR1, DIRECT]:
            raise ConfigError("Unknown Hessian approximation update called {}".format(self.hessian_update))
        if self.lsr1_middle not in [LSR1_SECANT, LSR1_PRINTED]:
            raise ConfigError("Unknown L-SR1 middle matrix variant called {}".format(self.lsr1_middle))
        if self.direction not in [TRUNCATED, FEDSONIA]:
            raise ConfigError("Unknown search direction called {}".format(self.direction))
        if self.alpha < 0.0:
            raise ConfigError("The step size alpha must be non-negative")
        if self.gamma <= 0.0:
            raise ConfigError("The error feedback step size gamma must be positive")
        if self.beta <= 0.0 or self.beta > 1.0:
            raise ConfigError("The learning rate beta must be in (0, 1]")
        if self.rho_value <= 0.0:
            raise ConfigError("The FedSONIA step scale rho must be positive")
        if self.reg_mu < 0.0:
            raise ConfigError("The regularization coefficient must be non-negative")
        if self.rounds < 0:
            raise ConfigError("The number of rounds must be non-negative")
        if self.seed < 0:
            raise ConfigError("The seed must be non-negative")
        if self.dataset == SYNTHETIC and (self.synthetic_samples < 1 or self.synthetic_dim < 1):
            raise ConfigError("The synthetic dataset must have positive numbers of samples and features")
        if self.synthetic_heterogeneity < 0.0:
            raise ConfigError("The synthetic heterogeneity must be non-negative")
        if self.n_features is not None and self.n_features < 1:
            raise ConfigError("The number of features must be positive")
        return self

    def to_text(self) -> str:
        """
        Serialize the configuration in the flat key/value text format.

        :return: The configuration text, one 'key = value' line per field.
        """
        lines = ['{} = {}'.format(f.name, _format_value(getattr(self, f.name))) for f in dataclasses.fields(self)]
        return '\n'.join(lines) + '\n'


def _format_value(value: Any) -> str:
    if value is None:
        return 'none'
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(text: str, annotation: Any) -> Any:
    if typing.get_origin(annotation) is Union:
        if text.lower() in _NONE_VALUES:
            return None
        annotation = next(t for t in typing.get_args(annotation) if t is not type(None))
    if annotation is bool:
        if text.lower() not in ['true', 'false']:
            raise ValueError("expected either 'true' or 'false'")
        return text.lower() == 'true'
    if annotation is int:
        return int(text)
    if annotation is float:
        return float(text)
    return text


def parse_config(text: str) -> RunConfig:
    """
    Parse a configuration in the flat key/value text format. Blank lines and '#' comments are ignored,
    and keys not given keep their default value.

    :param text: The configuration text.
    :return: The validated configuration.
    :raises ConfigError: If some line is malformed, or some key is unknown or duplicated, or some value is invalid.
    """
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    hints = typing.get_type_hints(RunConfig)
    values = dict()
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError("Line {}: expected a 'key = value' pair".format(line_number))
        if key not in fields:
            raise ConfigError("Line {}: unknown key '{}'".format(line_number, key))
        if key in values:
            raise ConfigError("Line {}: duplicated key '{}'".format(line_number, key))
        try:
            values[key] = _parse_value(value, hints[key])
        except ValueError as e:
            raise ConfigError("Line {}: invalid value '{}' for key '{}' ({})".format(line_number, value, key, e)) from e
    return RunConfig(**values).validate()


def load_config(filepath: Union[os.PathLike, str]) -> RunConfig:
    """
    Load a configuration file in the flat key/value text format.

    :param filepath: The configuration filepath.
    :return: The validated configuration.
    :raises ConfigError: If the file cannot be read or parsed.
    """
    try:
        with open(filepath, 'r', encoding='utf-8') as file:
            text = file.read()
    except OSError as e:
        raise ConfigError("Cannot read the configuration file {}: {}".format(filepath, e)) from e
    return parse_config(text)


def save_config(config: RunConfig, filepath: Union[os.PathLike, str]):
    """
    Save a configuration file in the flat key/value text format.

    :param config: The configuration.
    :param filepath: The configuration filepath.
    """
    with open(filepath, 'w', encoding='utf-8') as file:
        file.write(config.to_text())
