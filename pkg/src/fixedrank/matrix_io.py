"""Matrix and label persistence.

Two matrix formats:

* csv — one row per line, comma separated, shortest round-trip decimals.
* frrm binary — magic "FRRM", then format version, row count, and column
  count as unsigned 32-bit little-endian, then the payload as IEEE-754
  binary64 little-endian in column-major order.  Bit-exact for every finite
  double, signed zeros and subnormals included.

The format is chosen by explicit argument or file extension (.csv / .frrm).
"""

import struct

import numpy as np

from .errors import (
    BadMagicError,
    BadVersionError,
    ParseError,
    TruncatedFileError,
)

__all__ = ["write_matrix", "read_matrix", "write_labels", "read_labels"]

MAGIC = b"FRRM"
VERSION = 1


def _format_for(path, fmt):
    if fmt is not None:
        if fmt not in ("csv", "frrm"):
            raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'frrm'")
        return fmt
    if str(path).endswith(".csv"):
        return "csv"
    if str(path).endswith(".frrm"):
        return "frrm"
    raise ValueError(f"cannot infer format from {path!r}; pass fmt='csv' or 'frrm'")


def _fmt_value(v):
    # repr of a Python float is the shortest string that round-trips;
    # integral values drop the trailing ".0" so identity rows read "1,0"
    s = repr(float(v))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def write_matrix(M, path, fmt=None):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"matrix must be 2-dimensional, got ndim={M.ndim}")
    fmt = _format_for(path, fmt)
    if fmt == "csv":
        with open(path, "w") as fh:
            for row in M:
                fh.write(",".join(_fmt_value(v) for v in row))
                fh.write("\n")
        return
    rows, cols = M.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", VERSION, rows, cols))
        fh.write(M.astype("<f8").tobytes(order="F"))


def read_matrix(path, fmt=None):
    fmt = _format_for(path, fmt)
    if fmt == "csv":
        return _read_csv(path)
    return _read_frrm(path)


def _read_csv(path):
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line == "" and width is None:
                continue  # leading blank line is tolerated as an empty file
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} values, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        return np.zeros((0, 0))
    return np.asarray(rows, dtype=np.float64)


def _read_frrm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"{path}: missing FRRM magic")
    if len(data) < 16:
        raise TruncatedFileError(f"{path}: header incomplete")
    version, rows, cols = struct.unpack("<III", data[4:16])
    if version != VERSION:
        raise BadVersionError(f"{path}: unsupported version {version}")
    expected = 16 + rows * cols * 8
    if len(data) < expected:
        raise TruncatedFileError(f"{path}: payload ends early ({len(data)} of {expected} bytes)")
    if len(data) > expected:
        raise ParseError(f"{path}: {len(data) - expected} trailing bytes after payload")
    flat = np.frombuffer(data, dtype="<f8", offset=16)
    return flat.reshape((rows, cols), order="F").astype(np.float64)


def write_labels(labels, path):
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("labels must be a 1-d sequence")
    if labels.size and (labels < 0).any():
        raise ValueError("labels must be nonnegative")
    with open(path, "w") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


def read_labels(path):
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                v = int(line)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: not an integer label: {line!r}") from None
            if v < 0:
                raise ParseError(f"{path}:{lineno}: negative label {v}")
            values.append(v)
    return np.asarray(values, dtype=np.int64)
