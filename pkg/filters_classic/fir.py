"""
Direct-form fixed-point FIR filter (the golden reference).

    y(n) = Σ_{k=0}^{M-1} b_k · x(n−k)

Products are accumulated exactly and rounded/saturated once, like a DSP-slice
MAC with a wide accumulator.
"""

from __future__ import annotations

from typing import Sequence

from fixedpoint.qformat import QFormat, QSample, dot
from neurodsp.exceptions import NeuroDspError
from signals.traces import Trace


class FilterError(NeuroDspError):
    """Invalid filter coefficients, unstable design or format mismatch"""
    pass


def check_coeffs(coeffs: Sequence[QSample], name: str = "coefficients") -> QFormat:
    """Return the shared format of ``coeffs``; reject empty or mixed sequences."""
    if not coeffs:
        raise FilterError(f"{name} must not be empty")
    fmt = coeffs[0].fmt
    if any(c.fmt != fmt for c in coeffs):
        raise FilterError(f"{name} mix Q-formats")
    return fmt


class FirFilter:
    """
    Direct-form FIR with a most-recent-first delay line.

    ``coeffs`` may use a different Q-format than the data (same width);
    ``fmt`` is the data format for inputs and outputs.
    """

    def __init__(self, coeffs: Sequence[QSample], fmt: QFormat):
        self.coeff_fmt = check_coeffs(coeffs)
        if self.coeff_fmt.width != fmt.width:
            raise FilterError(f"coefficient format {self.coeff_fmt} and data format {fmt} differ in width")
        self.coeffs = tuple(coeffs)
        self.fmt = fmt
        self.reset()

    def reset(self) -> None:
        zero = QSample(0, self.fmt)
        self.delay_line = [zero] * len(self.coeffs)

    def step(self, x: QSample) -> QSample:
        if x.fmt != self.fmt:
            raise FilterError(f"input is {x.fmt}, filter expects {self.fmt}")
        self.delay_line.insert(0, x)
        self.delay_line.pop()
        return dot(self.coeffs, self.delay_line, self.fmt)

    def run(self, trace: Trace) -> Trace:
        return Trace.of([self.step(x) for x in trace], self.fmt)


def fir_step(f: FirFilter, x: QSample) -> QSample:
    return f.step(x)
