# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import NamedTuple, List

from flecs.errors import ConfigError
from flecs.compression.base import IDENTITY, CompressorSpec
from flecs.protocol.messages import UplinkMessage, DownlinkMessage


class UplinkBreakdown(NamedTuple):
    """
    The per-round, per-node uplink payload size, term by term.

    :param gradient: The bits of the compressed gradient difference c.
    :param hessian: The bits of the compressed Hessian-sketch difference C.
    :param curvature: The bits of the uncompressed (m, m) matrix M.
    :param total: The total number of bits.
    """
    gradient: int
    hessian: int
    curvature: int
    total: int


def uplink_breakdown(
    d: int,
    m: int,
    grad_spec: CompressorSpec,
    hess_spec: CompressorSpec,
    float_bits: int = 32
) -> UplinkBreakdown:
    """
    Compute the nominal per-round, per-node uplink payload size, term by term.

    :param d: The number of parameters.
    :param m: The memory size.
    :param grad_spec: The gradient compressor specification.
    :param hess_spec: The Hessian-sketch compressor specification.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The uplink payload size breakdown.
    :raises ConfigError: If the dimensions are out of domain.
    """
    if d < 1 or m < 1:
        raise ConfigError("The number of parameters and the memory size must be positive")
    gradient = grad_spec.vector_bits(d)
    hessian = m * hess_spec.vector_bits(d)
    curvature = float_bits * m * m
    return UplinkBreakdown(gradient, hessian, curvature, gradient + hessian + curvature)


def uplink_bits(
    d: int,
    m: int,
    grad_spec: CompressorSpec,
    hess_spec: CompressorSpec,
    float_bits: int = 32
) -> int:
    """
    Compute the nominal per-round, per-node uplink payload size in bits, i.e. the size of c, C and M.
    The uncompressed-gradient baseline is obtained with an identity gradient compressor.

    :param d: The number of parameters.
    :param m: The memory size.
    :param grad_spec: The gradient compressor specification.
    :param hess_spec: The Hessian-sketch compressor specification.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The number of bits.
    :raises ConfigError: If the dimensions are out of domain.
    """
    return uplink_breakdown(d, m, grad_spec, hess_spec, float_bits).total


def baseline_uplink_bits(d: int, m: int, hess_spec: CompressorSpec, float_bits: int = 32) -> int:
    """
    Compute the per-round, per-node uplink payload size of the uncompressed-gradient baseline.

    :param d: The number of parameters.
    :param m: The memory size.
    :param hess_spec: The Hessian-sketch compressor specification.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The number of bits.
    """
    grad_spec = CompressorSpec(kind=IDENTITY, float_bits=float_bits)
    return uplink_bits(d, m, grad_spec, hess_spec, float_bits)


def downlink_bits(d: int, m: int, float_bits: int = 32) -> int:
    """
    Compute the per-round, per-node downlink payload size in bits, i.e. the size of w and B S.

    :param d: The number of parameters.
    :param m: The memory size.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The number of bits.
    """
    return float_bits * (d + d * m)


class BitLedger:
    def __init__(self):
        """
        Build a ledger of the cumulative communication cost per node.
        The per-node cost of a round is the largest message size over all the nodes.
        """
        self.uplink = 0
        self.downlink = 0
        self.n_rounds = 0

    def record(self, uplinks: List[UplinkMessage], downlinks: List[DownlinkMessage]):
        """
        Record the messages exchanged during a round.

        :param uplinks: The uplink messages.
        :param downlinks: The downlink messages.
        """
        self.uplink += max((msg.bits for msg in uplinks), default=0)
        self.downlink += max((msg.bits for msg in downlinks), default=0)
        self.n_rounds += 1
