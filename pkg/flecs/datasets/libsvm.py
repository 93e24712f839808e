# MIT License: Copyright (c) 2022 flecs-kit developers

import io
import os
from dataclasses import dataclass
from typing import Optional, Union, IO, Iterable, List, Tuple

import numpy as np
from scipy import sparse
from sklearn.datasets import load_svmlight_file, dump_svmlight_file

from flecs.errors import DataError, ParseError


@dataclass(frozen=True)
class Dataset:
    """
    A binary classification dataset with sparse rows.

    :param rows: The (n_samples, dim) sparse features matrix, in CSR format.
    :param labels: The labels, each in {-1, +1}.
    :param dim: The number of features.
    """
    rows: sparse.csr_matrix
    labels: np.ndarray
    dim: int

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]


def normalize_labels(labels: np.ndarray) -> np.ndarray:
    """
    Normalize binary labels to {-1, +1}. Labels in {-1, +1} are kept, labels in {0, 1} are mapped to {-1, +1},
    and any other pair of label values is mapped to -1 (the smaller) and +1 (the larger).

    :param labels: The raw labels.
    :return: The normalized labels.
    :raises DataError: If there are more than two distinct labels.
    """
    values = np.unique(labels)
    if np.all(np.isin(values, [-1.0, 1.0])):
        return labels.astype(np.float64)
    if np.all(np.isin(values, [0.0, 1.0])):
        return 2.0 * labels - 1.0
    if len(values) == 2:
        return np.where(labels == values[0], -1.0, 1.0)
    raise DataError("Binary labels are required, found {} distinct label values".format(len(values)))


def _validate_lines(f: Union[IO, Iterable[str]]) -> Tuple[List[str], int]:
    """
    Check the LIBSVM lines one by one, so that malformed lines are reported with their line number.

    :param f: A text stream, or any iterable of lines.
    :return: The sample lines stripped from comments, and the maximum (1-based) feature index seen.
    :raises ParseError: If a line is malformed.
    """
    lines, max_idx = [], 0
    for line_number, line in enumerate(f, start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            float(tokens[0])
        except ValueError as e:
            raise ParseError("Invalid label '{}'".format(tokens[0]), line_number) from e
        last_idx = 0
        for token in tokens[1:]:
            idx, sep, val = token.partition(':')
            if not sep:
                raise ParseError("Invalid feature token '{}'".format(token), line_number)
            try:
                idx, _ = int(idx), float(val)
            except ValueError as e:
                raise ParseError("Non-numeric feature token '{}'".format(token), line_number) from e
            if idx <= last_idx:
                raise ParseError("Feature indices must be positive and strictly ascending", line_number)
            last_idx = idx
        max_idx = max(max_idx, last_idx)
        lines.append(line)
    return lines, max_idx


def parse_libsvm(
    f: Union[IO, Iterable[str]],
    n_features: Optional[int] = None
) -> Dataset:
    """
    Parse a dataset in LIBSVM text format, i.e. one "label index:value index:value ..." sample per line,
    with 1-based strictly ascending feature indices. Empty lines and '#' comments are ignored.

    :param f: A text stream, or any iterable of lines.
    :param n_features: The number of features. If None it is inferred as the maximum feature index seen.
    :return: The parsed dataset.
    :raises ParseError: If a line is malformed.
    :raises DataError: If the labels are not binary or some index exceeds the given number of features.
    """
    lines, dim = _validate_lines(f)
    if n_features is not None:
        if dim > n_features:
            raise DataError("Found feature index {} exceeding the number of features {}".format(dim, n_features))
        dim = n_features
    if not lines:
        return Dataset(sparse.csr_matrix((0, dim), dtype=np.float64), np.empty(0, dtype=np.float64), dim)

    payload = io.BytesIO('\n'.join(lines).encode('utf-8'))
    rows, labels = load_svmlight_file(payload, n_features=dim, dtype=np.float64, zero_based=False)
    if not np.all(np.isfinite(rows.data)):
        raise DataError("The feature values must be finite")
    return Dataset(sparse.csr_matrix(rows), normalize_labels(labels), dim)


def load_libsvm(filepath: Union[os.PathLike, str], n_features: Optional[int] = None) -> Dataset:
    """
    Load a dataset in LIBSVM text format from file.

    :param filepath: The filepath.
    :param n_features: The number of features. If None it is inferred from data.
    :return: The loaded dataset.
    :raises DataError: If the file cannot be read or parsed.
    """
    try:
        with open(filepath, 'r', encoding='utf-8') as file:
            return parse_libsvm(file, n_features=n_features)
    except OSError as e:
        raise DataError("Cannot read the dataset file {}: {}".format(filepath, e)) from e


def dump_libsvm(ds: Dataset, f: Optional[IO] = None) -> Optional[str]:
    """
    Serialize a dataset in LIBSVM text format, with integer labels and 1-based feature indices.

    :param ds: The dataset.
    :param f: A text stream. If None the serialized dataset is returned as a string.
    :return: The serialized dataset, if no stream is given.
    """
    rows = sparse.csr_matrix(ds.rows, copy=True)
    rows.sort_indices()
    buffer = io.BytesIO()
    dump_svmlight_file(rows, ds.labels.astype(np.int64), buffer, zero_based=False)
    text = buffer.getvalue().decode('utf-8')
    if f is None:
        return text
    f.write(text)
    return None
