"""
Deterministic weight initialization and weight snapshots.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

from fixedpoint.qformat import FixedPointError, QFormat, QSample, quantize
from memristor.device import MemristorError
from memristor.matrix_io import read_matrix, write_matrix
from signals.generators import Lcg31
from .tanh_lut import NeuroFilterError

logger = logging.getLogger(__name__)

Matrix = list[list[QSample]]


def _enforce_row_sum(row: list[QSample], limit: float) -> list[QSample]:
    """Rescale, quantize, then trim the largest |raw| until Σ|w| ≤ limit holds exactly."""
    fmt = row[0].fmt
    total = math.fsum(abs(w.value) for w in row)
    if total <= limit:
        return row
    factor = limit / total
    raws = [quantize(w.value * factor, fmt).raw for w in row]
    budget = math.floor(limit * (1 << fmt.frac))
    while sum(abs(r) for r in raws) > budget:
        k = max(range(len(raws)), key=lambda j: abs(raws[j]))
        raws[k] -= 1 if raws[k] > 0 else -1
    return [QSample(r, fmt) for r in raws]


def init_weights(seed: int, dims: tuple[int, int], fmt: QFormat, row_sum_limit: float | None = None) -> Matrix:
    """
    Uniform draws in [−0.5, 0.5) from the signal LCG, row-major.

    With ``row_sum_limit`` every row is rescaled so that Σ|w| ≤ limit after
    quantization.
    """
    rows, cols = dims
    if rows < 1 or cols < 1:
        raise NeuroFilterError(f"weight dimensions must be positive, got {rows}×{cols}")
    rng = Lcg31(seed)
    matrix = [[quantize(rng.uniform(-0.5, 0.5), fmt) for _ in range(cols)] for _ in range(rows)]
    if row_sum_limit is not None:
        if not row_sum_limit > 0:
            raise NeuroFilterError(f"row-sum limit must be positive, got {row_sum_limit}")
        matrix = [_enforce_row_sum(row, row_sum_limit) for row in matrix]
    logger.debug("initialized %d×%d weights from seed %d", rows, cols, seed)
    return matrix


def write_weights(path, matrix: Sequence[Sequence[QSample]]) -> None:
    if not matrix or not matrix[0]:
        raise NeuroFilterError("cannot snapshot an empty weight matrix")
    fmt = matrix[0][0].fmt
    if any(len(row) != len(matrix[0]) or any(w.fmt != fmt for w in row) for row in matrix):
        raise NeuroFilterError("weight matrix is ragged or mixes Q-formats")
    try:
        write_matrix(path, [[w.raw for w in row] for row in matrix], fmt)
    except MemristorError as exc:
        raise NeuroFilterError(str(exc)) from exc


def read_weights(path) -> Matrix:
    try:
        fmt, rows = read_matrix(path)
    except MemristorError as exc:
        raise NeuroFilterError(str(exc)) from exc
    if fmt is None:
        raise NeuroFilterError(f"{path} holds real values, not fixed-point weights")
    try:
        return [[QSample(raw, fmt) for raw in row] for row in rows]
    except FixedPointError as exc:
        raise NeuroFilterError(f"{path}: {exc}") from exc
