# MIT License: Copyright (c) 2022 flecs-kit developers

import csv
import io
import os
from typing import List, Dict, Union, Optional, IO

from flecs.harness.driver import TraceRow, TRACE_COLUMNS


def _format_row(row: TraceRow) -> List[str]:
    # Floats are written with their shortest round-tripping representation
    return [str(row.k), repr(row.objective), repr(row.grad_sq_norm), str(row.uplink_bits),
            str(row.downlink_bits), repr(row.ms)]


def write_trace(trace: List[TraceRow], f: Optional[IO] = None) -> Optional[str]:
    """
    Write a trace in CSV format, having columns k, objective, grad_sq_norm, uplink_bits, downlink_bits and ms.

    :param trace: The trace.
    :param f: The output text stream. If None the CSV text is returned instead.
    :return: The CSV text if no output stream is given, None otherwise.
    """
    out = io.StringIO() if f is None else f
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(TRACE_COLUMNS)
    for row in trace:
        writer.writerow(_format_row(row))
    return out.getvalue() if f is None else None


def write_comparison(traces: Dict[str, List[TraceRow]], f: Optional[IO] = None) -> Optional[str]:
    """
    Write several traces in a single CSV, keyed by variant name and round number.

    :param traces: The traces, indexed by variant name.
    :param f: The output text stream. If None the CSV text is returned instead.
    :return: The CSV text if no output stream is given, None otherwise.
    """
    out = io.StringIO() if f is None else f
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(['variant'] + TRACE_COLUMNS)
    for name, trace in traces.items():
        for row in trace:
            writer.writerow([name] + _format_row(row))
    return out.getvalue() if f is None else None


def save_csv(text: str, filepath: Union[os.PathLike, str]):
    """
    Save a CSV text to a file, creating the parent directories if needed.

    :param text: The CSV text.
    :param filepath: The output filepath.
    """
    dirpath = os.path.dirname(os.fspath(filepath))
    if dirpath:
        os.makedirs(dirpath, exist_ok=True)
    with open(filepath, 'w', encoding='utf-8', newline='') as file:
        file.write(text)


def read_trace(f: IO) -> Dict[str, List[TraceRow]]:
    """
    Read traces written either by write_trace or by write_comparison.

    :param f: The input text stream.
    :return: The traces, indexed by variant name. A single trace is indexed by the empty string.
    :raises ValueError: If the CSV header is not a trace header.
    """
    reader = csv.reader(f)
    header = next(reader)
    has_variant = header[:1] == ['variant']
    if header[int(has_variant):] != TRACE_COLUMNS:
        raise ValueError("The CSV header must be a trace header")
    traces: Dict[str, List[TraceRow]] = dict()
    for record in reader:
        name = record[0] if has_variant else ''
        k, objective, grad_sq_norm, uplink, downlink, ms = record[int(has_variant):]
        row = TraceRow(int(k), float(objective), float(grad_sq_norm), int(uplink), int(downlink), float(ms))
        traces.setdefault(name, []).append(row)
    return traces
