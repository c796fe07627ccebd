"""
Time-mode (pulse-width) arithmetic
==================================

A value is carried by the width of a pulse inside a clock period T_CLK.

    TR        T_out = T_CLK − T_in
    AMP-TR    T_out = T_CLK − a·T_in
    adder     T_out = T_CLK − Σ T_in

Widths are exact rationals so that complement chains cancel exactly. Any
operation that would discharge its capacitor before the end of the period
(negative output width) is an error.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Iterable, Sequence

from neurodsp.exceptions import NeuroDspError
from signals.traces import format_value

logger = logging.getLogger(__name__)


class TimeDomainError(NeuroDspError):
    """Pulse width outside the clock period or a non-positive gain"""
    pass


def as_width(value: Real | str) -> Fraction:
    """Exact rational width; floats convert without rounding."""
    try:
        return value if isinstance(value, Fraction) else Fraction(value)
    except (TypeError, ValueError) as exc:
        raise TimeDomainError(f"not a pulse width: {value!r}") from exc


@dataclass(frozen=True)
class TimeClock:
    t_clk: Fraction
    duty: Fraction = field(default=Fraction(1, 4))

    def __post_init__(self):
        object.__setattr__(self, 't_clk', as_width(self.t_clk))
        object.__setattr__(self, 'duty', as_width(self.duty))
        if self.t_clk <= 0:
            raise TimeDomainError(f"clock period must be positive, got {self.t_clk}")


@dataclass(frozen=True)
class TimePulse:
    width: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'width', as_width(self.width))
        if self.width < 0:
            raise TimeDomainError(f"pulse width must be non-negative, got {self.width}")

    def __float__(self) -> float:
        return float(self.width)


def _check_fits(width: Fraction, clk: TimeClock, what: str) -> None:
    if width > clk.t_clk:
        raise TimeDomainError(f"{what} {float(width):.9g} s exceeds T_CLK {float(clk.t_clk):.9g} s")


def time_register(t_in: TimePulse, clk: TimeClock) -> TimePulse:
    _check_fits(t_in.width, clk, "input width")
    return TimePulse(clk.t_clk - t_in.width)


def time_amplifier(t_in: TimePulse, clk: TimeClock, a: Real | str) -> TimePulse:
    a = as_width(a)
    if a <= 0:
        raise TimeDomainError(f"time gain must be positive, got {a}")
    _check_fits(a * t_in.width, clk, "amplified width")
    return TimePulse(clk.t_clk - a * t_in.width)


def time_adder(t_ins: Iterable[TimePulse], clk: TimeClock) -> TimePulse:
    total = sum((p.width for p in t_ins), Fraction(0))
    _check_fits(total, clk, "summed width")
    return TimePulse(clk.t_clk - total)


@dataclass(frozen=True)
class CascadeRecord:
    """One clock cycle of the z⁻¹ cascade: stage outputs in order, then the delayed output."""
    k: int
    width_in: Fraction
    stages: tuple[Fraction, Fraction, Fraction, Fraction]

    @property
    def width_out(self) -> Fraction:
        return self.stages[-1]


_STAGES = ("AMP-TR(a)", "TR", "AMP-TR(1)", "TR")


def _stage(k: int, n: int, run) -> TimePulse:
    try:
        return run()
    except TimeDomainError as exc:
        raise TimeDomainError(f"cycle {k}, stage {n + 1} {_STAGES[n]}: {exc}") from exc


def z_delay_stages(pulses: Sequence[TimePulse], clk: TimeClock, a: Real | str = 1, flush: bool = False) -> list[CascadeRecord]:
    """
    Run AMP-TR(a) → TR → latch → AMP-TR(1) → TR over ``pulses``.

    The latch holds the second stage's output for one cycle, so cycle k emits
    a·width[k−1] (0 on the first cycle). ``flush`` runs one extra cycle with a
    zero input to drain the latch.
    """
    records = []
    latched = TimePulse(0)
    inputs = list(pulses) + ([TimePulse(0)] if flush else [])
    for k, pulse in enumerate(inputs):
        s1 = _stage(k, 0, lambda: time_amplifier(pulse, clk, a))
        s2 = _stage(k, 1, lambda: time_register(s1, clk))
        s3 = _stage(k, 2, lambda: time_amplifier(latched, clk, 1))
        s4 = _stage(k, 3, lambda: time_register(s3, clk))
        latched = s2
        widths = (s1.width, s2.width, s3.width, s4.width)
        records.append(CascadeRecord(k=k, width_in=pulse.width, stages=widths))
    logger.debug("z^-1 cascade: %d cycles, gain %s", len(records), a)
    return records


def z_delay(pulses: Sequence[TimePulse], clk: TimeClock, a: Real | str = 1, flush: bool = False) -> list[TimePulse]:
    return [TimePulse(r.width_out) for r in z_delay_stages(pulses, clk, a, flush)]


def write_cascade_csv(path, records: Sequence[CascadeRecord]) -> None:
    try:
        with Path(path).open('w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['k', 'width_in', 'width_out'])
            for r in records:
                writer.writerow([r.k, format_value(float(r.width_in)), format_value(float(r.width_out))])
    except OSError as exc:
        raise TimeDomainError(f"cannot write {path}: {exc}") from exc
