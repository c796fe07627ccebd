"""
Ideal memristor crossbar: analog MAC and differential weight programming.

A signed weight w ∈ [−1, 1] is stored on a cell pair,

    w = (g⁺ − g⁻) / (g_max − g_min)

with the unused cell of the pair parked at g_min. Conductances are
programmed on a uniform grid of ``levels`` values between g_min and g_max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import MemristorError, MemristorParams, MemristorState, conductance

DEFAULT_LEVELS = 256


@dataclass(frozen=True)
class CrossbarMatrix:
    """Rows are inputs, columns are outputs."""
    g: np.ndarray
    g_min: float
    g_max: float

    def __post_init__(self):
        if not 0 < self.g_min < self.g_max:
            raise MemristorError(f"need 0 < g_min < g_max, got {self.g_min}, {self.g_max}")
        g = np.array(self.g, dtype=np.float64, ndmin=2)
        if g.ndim != 2:
            raise MemristorError(f"conductance matrix must be 2-D, got shape {g.shape}")
        if np.any(np.isnan(g)):
            raise MemristorError("conductance matrix holds NaN")
        if g.size and (g.min() < self.g_min or g.max() > self.g_max):
            raise MemristorError(
                f"conductances must lie in [{self.g_min}, {self.g_max}], "
                f"got [{g.min()}, {g.max()}]"
            )
        g.setflags(write=False)
        object.__setattr__(self, 'g', g)

    @property
    def shape(self) -> tuple[int, int]:
        return self.g.shape


def crossbar_mac(v, m: CrossbarMatrix) -> np.ndarray:
    """Column currents i_j = Σ_i v_i·g[i][j]."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != m.shape[0]:
        raise MemristorError(f"{v.shape[0] if v.ndim == 1 else v.shape} inputs for a {m.shape[0]}-row crossbar")
    return v @ m.g


def program_weights(w, g_min: float, g_max: float, levels: int = DEFAULT_LEVELS) -> tuple[CrossbarMatrix, CrossbarMatrix]:
    """Map a signed weight matrix onto a (positive, negative) crossbar pair."""
    if levels < 2:
        raise MemristorError(f"levels must be >= 2, got {levels}")
    w = np.array(w, dtype=np.float64, ndmin=2)
    if np.any(np.isnan(w)):
        raise MemristorError("cannot program NaN weights")
    if np.any(np.abs(w) > 1.0):
        raise MemristorError(f"weights must lie in [-1, 1], got max |w| = {np.abs(w).max()}")
    top = levels - 1
    level = np.rint(np.abs(w) * top)
    g = np.where(level == top, g_max, g_min + (g_max - g_min) * level / top)
    g = np.clip(g, g_min, g_max)
    pos = np.where(w > 0, g, g_min)
    neg = np.where(w < 0, g, g_min)
    return CrossbarMatrix(pos, g_min, g_max), CrossbarMatrix(neg, g_min, g_max)


def reconstruct_weights(pos: CrossbarMatrix, neg: CrossbarMatrix) -> np.ndarray:
    if pos.shape != neg.shape or (pos.g_min, pos.g_max) != (neg.g_min, neg.g_max):
        raise MemristorError("crossbar pair differs in shape or conductance range")
    return (pos.g - neg.g) / (pos.g_max - pos.g_min)


def states_to_crossbar(xs, p: MemristorParams) -> CrossbarMatrix:
    xs = np.array(xs, dtype=np.float64, ndmin=2)
    g = np.vectorize(lambda x: conductance(MemristorState(float(x)), p))(xs)
    return CrossbarMatrix(np.clip(g, p.g_min, p.g_max), p.g_min, p.g_max)


def conductance_to_state(g, p: MemristorParams) -> np.ndarray:
    """Device state that realizes conductance ``g`` (inverse of the linear mix)."""
    g = np.asarray(g, dtype=np.float64)
    if np.any(g < p.g_min * (1 - 1e-12)) or np.any(g > p.g_max * (1 + 1e-12)):
        raise MemristorError(f"conductance outside [{p.g_min}, {p.g_max}]")
    return np.clip((p.r_off - 1.0 / g) / (p.r_off - p.r_on), 0.0, 1.0)
