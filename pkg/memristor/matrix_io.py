"""
Text matrix snapshots shared by network weights and crossbar conductances.

    format qW.F dims a×b        one raw integer per line, row-major
    format real dims a×b        one decimal per line (9 significant digits)
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from fixedpoint.qformat import FixedPointError, QFormat
from signals.traces import format_value
from .device import MemristorError

_HEADER_RE = re.compile(r'^format\s+(\S+)\s+dims\s+(\d+)[×x](\d+)$')
REAL = 'real'


def dump_matrix(rows, fmt: QFormat | None = None) -> str:
    """``fmt`` given: ``rows`` hold raw integers; otherwise reals."""
    matrix = np.array(rows, dtype=object if fmt is not None else np.float64, ndmin=2)
    n_rows, n_cols = matrix.shape
    lines = [f"format {fmt if fmt is not None else REAL} dims {n_rows}×{n_cols}"]
    for value in matrix.flat:
        lines.append(str(int(value)) if fmt is not None else format_value(float(value)))
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> tuple[QFormat | None, list[list]]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise MemristorError("matrix snapshot is empty")
    match = _HEADER_RE.match(lines[0])
    if not match:
        raise MemristorError(f"bad snapshot header {lines[0]!r}")
    tag, n_rows, n_cols = match.group(1), int(match.group(2)), int(match.group(3))
    try:
        fmt = None if tag == REAL else QFormat.parse(tag)
    except FixedPointError as exc:
        raise MemristorError(f"bad snapshot format {tag!r}") from exc
    body = lines[1:]
    if len(body) != n_rows * n_cols:
        raise MemristorError(f"header promises {n_rows}×{n_cols} values, found {len(body)}")
    try:
        values = [int(v) for v in body] if fmt is not None else [float(v) for v in body]
    except ValueError as exc:
        raise MemristorError(f"bad snapshot value: {exc}") from exc
    return fmt, [values[r * n_cols:(r + 1) * n_cols] for r in range(n_rows)]


def write_matrix(path, rows, fmt: QFormat | None = None) -> None:
    try:
        Path(path).write_text(dump_matrix(rows, fmt), encoding='utf-8')
    except OSError as exc:
        raise MemristorError(f"cannot write {path}: {exc}") from exc


def read_matrix(path) -> tuple[QFormat | None, list[list]]:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise MemristorError(f"cannot read {path}: {exc}") from exc
    return load_matrix(text)
