"""
Behavioral memristor models
===========================

Linear-mix device (netlist model):

    G(x)  = 1 / (R_on·x + R_off·(1 − x))
    dx/dt = k · v · G(x) · 4x(1 − x)          x clamped to [0, 1]

Threshold flux model:

    dw/dt = I_0 · sign(v) · (e^{|v|/v_0} − e^{v_TH/v_0})   if |v| > v_TH
          = 0                                             otherwise

Both are integrated with forward Euler.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from django.conf import settings

from neurodsp.exceptions import NeuroDspError

logger = logging.getLogger(__name__)


class MemristorError(NeuroDspError):
    """Invalid device parameters, drive or crossbar programming request"""
    pass


@dataclass(frozen=True)
class MemristorParams:
    r_on: float = 100.0
    r_off: float = 16000.0
    k: float = 10000.0
    x0: float = 0.3

    def __post_init__(self):
        if not 0 < self.r_on < self.r_off:
            raise MemristorError(f"need 0 < r_on < r_off, got r_on={self.r_on}, r_off={self.r_off}")
        if not self.k > 0:
            raise MemristorError(f"k must be positive, got {self.k}")
        if not 0.0 <= self.x0 <= 1.0:
            raise MemristorError(f"x0 must lie in [0, 1], got {self.x0}")

    @classmethod
    def from_settings(cls) -> MemristorParams:
        conf = settings.NEURODSP
        return cls(r_on=conf['MEM_RON'], r_off=conf['MEM_ROFF'], k=conf['MEM_K'], x0=conf['MEM_X0'])

    @property
    def g_min(self) -> float:
        return 1.0 / self.r_off

    @property
    def g_max(self) -> float:
        return 1.0 / self.r_on


@dataclass(frozen=True)
class MemristorState:
    x: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise MemristorError(f"state x must lie in [0, 1], got {self.x}")


@dataclass(frozen=True)
class ThresholdFluxParams:
    i0: float
    v0: float
    v_th: float

    def __post_init__(self):
        if not (self.i0 > 0 and self.v0 > 0 and self.v_th > 0):
            raise MemristorError(f"i0, v0 and v_th must be positive, got {self.i0}, {self.v0}, {self.v_th}")


@dataclass(frozen=True)
class IvPoint:
    t: float
    v: float
    i: float
    x: float


def window(x: float) -> float:
    return 4.0 * x * (1.0 - x)


def conductance(s: MemristorState, p: MemristorParams) -> float:
    return 1.0 / (p.r_on * s.x + p.r_off * (1.0 - s.x))


def memristor_step(s: MemristorState, v: float, dt: float, p: MemristorParams) -> MemristorState:
    if not dt > 0:
        raise MemristorError(f"dt must be positive, got {dt}")
    x = s.x + dt * p.k * v * conductance(s, p) * window(s.x)
    return MemristorState(min(1.0, max(0.0, x)))


def threshold_flux_step(w: float, v: float, dt: float, p: ThresholdFluxParams) -> float:
    if not dt > 0:
        raise MemristorError(f"dt must be positive, got {dt}")
    if abs(v) <= p.v_th:
        return w
    rate = p.i0 * math.copysign(1.0, v) * (math.exp(abs(v) / p.v0) - math.exp(p.v_th / p.v0))
    return w + dt * rate


def iv_sweep(p: MemristorParams, v_amp: float, v_freq: float, dt: float, n_periods: int) -> list[IvPoint]:
    """
    Drive the device with v(t) = v_amp·sin(2π·v_freq·t) from state x0.

    Each point holds the drive, the current i = G(x)·v and the state at time
    t, before the step to t + dt.
    """
    if not (v_amp > 0 and v_freq > 0 and dt > 0):
        raise MemristorError(f"v_amp, v_freq and dt must be positive, got {v_amp}, {v_freq}, {dt}")
    if n_periods < 1:
        raise MemristorError(f"n_periods must be >= 1, got {n_periods}")
    n_steps = round(n_periods / (v_freq * dt))
    state = MemristorState(p.x0)
    points = []
    for n in range(n_steps + 1):
        t = n * dt
        v = v_amp * math.sin(2 * math.pi * v_freq * t)
        points.append(IvPoint(t=t, v=v, i=conductance(state, p) * v, x=state.x))
        state = memristor_step(state, v, dt, p)
    logger.debug("I-V sweep: %d points, final x=%.6f", len(points), state.x)
    return points


def loop_area(points: Sequence[IvPoint]) -> float:
    """Absolute shoelace area enclosed by the (v, i) polygon."""
    if len(points) < 3:
        return 0.0
    acc = math.fsum(
        a.v * b.i - b.v * a.i
        for a, b in zip(points, list(points[1:]) + [points[0]])
    )
    return abs(acc) / 2.0
