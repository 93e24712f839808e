# MIT License: Copyright (c) 2022 flecs-kit developers

from typing import Optional

import numpy as np

from flecs.context import is_check_finite_enabled, is_check_symmetric_enabled
from flecs.errors import DimensionError, NumericError


def check_finite(x: np.ndarray, name: str = 'array') -> np.ndarray:
    """
    Check that an array contains only finite values, if the 'check_finite' context flag is enabled.

    :param x: The array.
    :param name: The name of the array, used for error messages.
    :return: The array itself.
    :raises NumericError: If the array contains NaN or Inf values.
    """
    if is_check_finite_enabled() and not np.all(np.isfinite(x)):
        raise NumericError("The {} must contain finite values only".format(name))
    return x


def check_vector(x: np.ndarray, dim: Optional[int] = None, name: str = 'vector') -> np.ndarray:
    """
    Check (and cast when needed) a dense vector, i.e. a one-dimensional float64 Numpy array.

    :param x: The vector.
    :param dim: The expected dimension. If None it is not checked.
    :param name: The name of the vector, used for error messages.
    :return: The vector as a float64 Numpy array.
    :raises DimensionError: If the input is not one-dimensional or its dimension is not the expected one.
    :raises NumericError: If the vector contains non-finite values.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("The {} must be one-dimensional".format(name))
    if dim is not None and len(x) != dim:
        raise DimensionError("The {} must have dimension {}, got {}".format(name, dim, len(x)))
    return check_finite(x, name)


def check_matrix(
    a: np.ndarray,
    shape: Optional[tuple] = None,
    square: bool = False,
    name: str = 'matrix'
) -> np.ndarray:
    """
    Check (and cast when needed) a dense matrix, i.e. a two-dimensional float64 Numpy array.

    :param a: The matrix.
    :param shape: The expected shape. Entries set to None are not checked.
    :param square: Whether the matrix must be square.
    :param name: The name of the matrix, used for error messages.
    :return: The matrix as a float64 Numpy array.
    :raises DimensionError: If the shape of the matrix is not valid.
    :raises NumericError: If the matrix contains non-finite values.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError("The {} must be two-dimensional".format(name))
    if square and a.shape[0] != a.shape[1]:
        raise DimensionError("The {} must be square, got shape {}".format(name, a.shape))
    if shape is not None:
        for expected, actual in zip(shape, a.shape):
            if expected is not None and expected != actual:
                raise DimensionError("The {} must have shape {}, got {}".format(name, shape, a.shape))
    return check_finite(a, name)


def check_symmetric(a: np.ndarray, rtol: float = 1e-8, name: str = 'matrix') -> np.ndarray:
    """
    Check that a square matrix is symmetric, if the 'check_symmetric' context flag is enabled.

    :param a: The square matrix.
    :param rtol: The tolerance, relative to the largest absolute entry.
    :param name: The name of the matrix, used for error messages.
    :return: The matrix itself.
    :raises NumericError: If the matrix is not symmetric.
    """
    if is_check_symmetric_enabled():
        scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
        if np.max(np.abs(a - a.T), initial=0.0) > rtol * scale:
            raise NumericError("The {} must be symmetric".format(name))
    return a
