"""Headerless CSV matrix files."""

import csv
import math

import numpy as np

from .errors import CsvParseError, InvalidInputError


def read_matrix_csv(path):
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise CsvParseError(f"expected {width} fields, found {len(record)}", lineno)
            row = []
            for col, token in enumerate(record, start=1):
                try:
                    value = float(token)
                except ValueError:
                    raise CsvParseError(f"non-numeric token {token!r}", lineno, col) from None
                if not math.isfinite(value):
                    raise CsvParseError(f"non-finite value {token!r}", lineno, col)
                row.append(value)
            rows.append(row)
    if not rows:
        raise CsvParseError("file contains no data", 1)
    return np.array(rows, dtype=float)


def format_number(x):
    """Shortest decimal that round-trips to the same double; integral values lose the '.0'."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def format_matrix_csv(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or 0 in M.shape:
        raise InvalidInputError(f"refusing to write a matrix of shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("refusing to write a matrix with non-finite entries")
    return "".join(",".join(format_number(x) for x in row) + "\n" for row in M)


def write_matrix_csv(M, path):
    text = format_matrix_csv(M)
    with open(path, "w", newline="") as fh:
        fh.write(text)
