# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import NamedTuple

import numpy as np

from flecs.compression.base import CompressedVector, CompressedMatrix


class UplinkMessage(NamedTuple):
    """
    The message a worker sends to the server at each round.

    :param worker_id: The worker id.
    :param c: The compressed gradient difference c_k^i = Q(g_k^i - h_k^i).
    :param C: The compressed Hessian-sketch difference C_k^i = C(Y_k^i - B_k^i S_k).
    :param M: The uncompressed (m, m) matrix M_k^i = S_k^T Y_k^i.
    :param bits: The total payload size in bits.
    """
    worker_id: int
    c: CompressedVector
    C: CompressedMatrix
    M: np.ndarray
    bits: int


class DownlinkMessage(NamedTuple):
    """
    The message the server sends to a worker at each round.

    :param w: The current iterate.
    :param BS: The (d, m) product between the worker's Hessian approximation and the next sketch.
    :param bits: The total payload size in bits.
    """
    w: np.ndarray
    BS: np.ndarray
    bits: int


def make_uplink(
    worker_id: int,
    c: CompressedVector,
    C: CompressedMatrix,
    M: np.ndarray,
    float_bits: int = 32
) -> UplinkMessage:
    """
    Build an uplink message, accounting for its payload size, i.e. c.bits + C.bits + float_bits * m^2.

    :param worker_id: The worker id.
    :param c: The compressed gradient difference.
    :param C: The compressed Hessian-sketch difference.
    :param M: The (m, m) matrix, sent uncompressed.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The uplink message.
    """
    return UplinkMessage(worker_id, c, C, M, c.bits + C.bits + float_bits * M.size)


def make_downlink(w: np.ndarray, BS: np.ndarray, float_bits: int = 32) -> DownlinkMessage:
    """
    Build a downlink message, accounting for its payload size, i.e. float_bits * (d + d m).

    :param w: The current iterate.
    :param BS: The (d, m) Hessian approximation and sketch product.
    :param float_bits: The number of bits of an uncompressed floating point value.
    :return: The downlink message.
    """
    return DownlinkMessage(w, BS, float_bits * (w.size + BS.size))
