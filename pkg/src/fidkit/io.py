"""Binary Gaussian-statistics files and sample CSV ingestion.

Stats file layout (all little-endian)::

    offset  size   field
    0       8      magic b"FSTATS01"
    8       4      d        uint32
    12      4      n        uint32, source sample count (0 if unknown)
    16      1      repr     0 = full covariance, 1 = centered factor
    17      3      reserved zero bytes
    20      8*d    mu       float64
    ...            payload  float64: d*d row-major covariance, or
                            d*n column-major factor C with C C^T = Sigma
"""

from __future__ import annotations

import csv
import io
import math
import struct
from pathlib import Path

import numpy as np

from .errors import FidError, FormatError
from .stats import CenteredFactor, GaussianStats

__all__ = [
    "MAGIC",
    "format_float",
    "read_samples_csv",
    "read_stats",
    "stats_from_bytes",
    "stats_to_bytes",
    "write_csv_rows",
    "write_samples_csv",
    "write_stats",
]

MAGIC = b"FSTATS01"
HEADER = struct.Struct("<8sIIB3s")
REPR_FULL = 0
REPR_FACTOR = 1
_F8 = np.dtype("<f8")


def stats_to_bytes(stats: GaussianStats) -> bytes:
    d = stats.d
    if stats.is_factor:
        c = stats.sigma.values
        header = HEADER.pack(MAGIC, d, c.shape[1], REPR_FACTOR, b"\0\0\0")
        payload = np.asarray(c, dtype=_F8).tobytes(order="F")
    else:
        header = HEADER.pack(MAGIC, d, stats.sample_count, REPR_FULL, b"\0\0\0")
        payload = np.asarray(stats.sigma, dtype=_F8).tobytes(order="C")
    return header + np.asarray(stats.mu, dtype=_F8).tobytes() + payload


def stats_from_bytes(buf: bytes) -> GaussianStats:
    if len(buf) < HEADER.size:
        raise FormatError(f"stats file truncated: {len(buf)} bytes, header needs {HEADER.size}")
    magic, d, n, rep, reserved = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if rep not in (REPR_FULL, REPR_FACTOR):
        raise FormatError(f"unknown representation byte {rep}")
    if reserved != b"\0\0\0":
        raise FormatError("reserved header bytes are not zero")
    if d < 1:
        raise FormatError("dimension d must be >= 1")
    if rep == REPR_FACTOR and n < 1:
        raise FormatError("factor representation needs n >= 1 columns")
    payload_len = d * d if rep == REPR_FULL else d * n
    expected = HEADER.size + 8 * (d + payload_len)
    if len(buf) != expected:
        raise FormatError(f"stats file has {len(buf)} bytes but header (d={d}, n={n}) implies {expected}")
    body = np.frombuffer(buf, dtype=_F8, offset=HEADER.size).astype(np.float64)
    if not np.all(np.isfinite(body)):
        raise FormatError("stats file contains NaN or Inf")
    mu, payload = body[:d], body[d:]
    try:
        if rep == REPR_FULL:
            return GaussianStats(mu, payload.reshape(d, d), n)
        return GaussianStats(mu, CenteredFactor(payload.reshape((d, n), order="F")), n)
    except FidError as exc:
        raise FormatError(f"invalid stats payload: {exc}") from exc


def write_stats(path, stats: GaussianStats) -> None:
    Path(path).write_bytes(stats_to_bytes(stats))


def read_stats(path) -> GaussianStats:
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read stats file {path}: {exc.strerror}") from exc
    return stats_from_bytes(buf)


def _parse_row(row: list[str]) -> list[float] | None:
    try:
        return [float(cell) for cell in row]
    except ValueError:
        return None


def read_samples_csv(path) -> np.ndarray:
    """Read one sample per row and return the ``d x k`` feature matrix.

    A first row that does not parse as numbers is taken to be a header.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        values = _parse_row(row)
        if values is None:
            if lineno == 1:
                continue
            raise FormatError(f"{path}:{lineno}: non-numeric cell")
        if not all(math.isfinite(v) for v in values):
            raise FormatError(f"{path}:{lineno}: non-finite value")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise FormatError(f"{path}:{lineno}: expected {width} columns, got {len(values)}")
        rows.append(values)
    if not rows:
        raise FormatError(f"{path}: no samples")
    return np.array(rows, dtype=np.float64).T


def format_float(x) -> str:
    return repr(float(x))


def write_csv_rows(out, header: list[str], rows) -> None:
    """Write rows to a path or an open text stream, floats at round-trip precision."""

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])

    if hasattr(out, "write"):
        emit(out)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


def write_samples_csv(path, x: np.ndarray) -> None:
    """Inverse of :func:`read_samples_csv`, with an ``f0,f1,...`` header row."""
    write_csv_rows(path, [f"f{i}" for i in range(x.shape[0])], x.T.tolist())
