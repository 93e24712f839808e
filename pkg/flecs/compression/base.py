# MIT License: Copyright (c) 2022 flecs-kit developers

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from flecs.errors import ConfigError

#: The identity compressor, i.e. no compression at all.
IDENTITY = 'identity'
#: The unbiased random dithering compressor.
RANDOM_DITHERING = 'random-dithering'

#: The supported compressor kinds.
COMPRESSOR_KINDS = [IDENTITY, RANDOM_DITHERING]

#: The supported norm orders of the random dithering compressor.
NORM_ORDERS = [2.0, np.inf]


@dataclass(frozen=True)
class CompressorSpec:
    """
    Specification of an unbiased compression operator.

    :param kind: The compressor kind. It can be either 'identity' or 'random-dithering'.
    :param levels: The number of quantization levels s (ignored by the identity compressor).
    :param norm_order: The norm order p used for scaling, either 2 or inf (ignored by the identity compressor).
    :param float_bits: The number of bits of a floating point value on the wire.
    """
    kind: str = RANDOM_DITHERING
    levels: int = 64
    norm_order: float = np.inf
    float_bits: int = 32

    def __post_init__(self):
        if self.kind not in COMPRESSOR_KINDS:
            raise ConfigError("Unknown compressor kind called {}, suitable kinds are: {}".format(
                self.kind, ', '.join(COMPRESSOR_KINDS)
            ))
        if self.float_bits <= 0:
            raise ConfigError("The number of bits of a floating point value must be positive")
        if self.kind == IDENTITY:
            return
        if self.levels < 1:
            raise ConfigError("The number of quantization levels must be positive")
        if float(self.norm_order) not in NORM_ORDERS:
            raise ConfigError("The norm order of the random dithering compressor must be either 2 or inf")

    @property
    def is_identity(self) -> bool:
        return self.kind == IDENTITY

    @property
    def level_bits(self) -> int:
        """The number of bits of a level index, i.e. ceil(log2(s + 1))."""
        return int(self.levels).bit_length()

    def vector_bits(self, dim: int) -> int:
        """
        Compute the nominal payload size of a compressed vector, i.e. without escape-coded levels.

        :param dim: The dimension of the vector.
        :return: The number of bits.
        """
        if self.is_identity:
            return self.float_bits * dim
        return self.float_bits + dim * (1 + self.level_bits)


class CompressedVector(NamedTuple):
    """
    The output of a vector compressor.

    :param value: The dequantized vector.
    :param bits: The exact payload size in bits.
    :param norm: The scaling norm sent along the levels (the Euclidean norm, for the identity compressor).
    """
    value: np.ndarray
    bits: int
    norm: float


class CompressedMatrix(NamedTuple):
    """
    The output of a column-wise matrix compressor.

    :param value: The dequantized matrix.
    :param bits: The exact payload size in bits, i.e. the sum of the columns payload sizes.
    """
    value: np.ndarray
    bits: int
