"""
Fixed-point IIR kernels: biquad Direct Form I and Direct Form II transposed.

Biquad (DF1):
    y[n] = g·(x[n] + β1·x[n−1] + β2·x[n−2]) − a1·y[n−1] − a2·y[n−2]

General order (DF2T), a_0 = 1 implied:
    y = b0·x + s1
    s_i = b_i·x − a_i·y + s_{i+1}

Coefficients use their own Q-format (usually ``coefficient_format(data)``
so that |a1| up to 2 fits). Every output is rounded and saturated exactly
once; DF2T state registers keep the double-width partial sums, so both forms
agree bit for bit whenever nothing saturates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from fixedpoint.qformat import QFormat, QSample, dequantize, round_shift, saturate
from signals.traces import Trace
from .fir import FilterError, check_coeffs


def is_stable(a1: float, a2: float) -> bool:
    """Stability triangle of 1 + a1·z⁻¹ + a2·z⁻²."""
    return abs(a2) < 1 and abs(a1) < 1 + a2


@dataclass(frozen=True)
class BiquadCoeffs:
    g: QSample
    beta1: QSample
    beta2: QSample
    a1: QSample
    a2: QSample
    stable: bool = True

    def __post_init__(self):
        check_coeffs([self.g, self.beta1, self.beta2, self.a1, self.a2], "biquad coefficients")
        if self.stable and not is_stable(dequantize(self.a1), dequantize(self.a2)):
            raise FilterError(
                f"poles of 1 + ({dequantize(self.a1)})z^-1 + ({dequantize(self.a2)})z^-2 "
                f"are not inside the unit circle"
            )

    @property
    def fmt(self) -> QFormat:
        return self.g.fmt

    def as_floats(self) -> dict[str, float]:
        return {
            'g': dequantize(self.g),
            'beta1': dequantize(self.beta1),
            'beta2': dequantize(self.beta2),
            'a1': dequantize(self.a1),
            'a2': dequantize(self.a2),
        }


class Biquad:
    """Direct Form I biquad with x[n−1], x[n−2], y[n−1], y[n−2] history."""

    def __init__(self, coeffs: BiquadCoeffs, fmt: QFormat):
        if coeffs.fmt.width != fmt.width:
            raise FilterError(f"coefficient format {coeffs.fmt} and data format {fmt} differ in width")
        self.coeffs = coeffs
        self.fmt = fmt
        self.reset()

    def reset(self) -> None:
        self.x1 = self.x2 = self.y1 = self.y2 = 0

    def step(self, x: QSample) -> QSample:
        if x.fmt != self.fmt:
            raise FilterError(f"input is {x.fmt}, filter expects {self.fmt}")
        c = self.coeffs
        cf = c.fmt.frac
        feed_forward = (x.raw << cf) + c.beta1.raw * self.x1 + c.beta2.raw * self.x2
        feedback = c.a1.raw * self.y1 + c.a2.raw * self.y2
        acc = c.g.raw * feed_forward - (feedback << cf)
        y = saturate(round_shift(acc, 2 * cf), self.fmt)
        self.x2, self.x1 = self.x1, x.raw
        self.y2, self.y1 = self.y1, y
        return QSample(y, self.fmt)

    def run(self, trace: Trace) -> Trace:
        return Trace.of([self.step(x) for x in trace], self.fmt)


class IirDf2t:
    """
    Direct Form II transposed IIR of arbitrary order.

    ``b`` holds b_0..b_M and ``a`` holds a_1..a_N (a_0 = 1 implied); both
    share one coefficient format of the data width.
    """

    def __init__(self, b: Sequence[QSample], a: Sequence[QSample], fmt: QFormat):
        self.coeff_fmt = check_coeffs(list(b) + list(a))
        if self.coeff_fmt.width != fmt.width:
            raise FilterError(f"coefficient format {self.coeff_fmt} and data format {fmt} differ in width")
        self.b = tuple(b)
        self.a = tuple(a)
        self.fmt = fmt
        self.order = max(len(self.b) - 1, len(self.a))
        self.reset()

    def reset(self) -> None:
        # partial sums at scale 2^-(data.frac + coeff.frac)
        self.state = [0] * self.order

    def _b(self, k: int) -> int:
        return self.b[k].raw if k < len(self.b) else 0

    def _a(self, k: int) -> int:
        return self.a[k - 1].raw if k - 1 < len(self.a) else 0

    def step(self, x: QSample) -> QSample:
        if x.fmt != self.fmt:
            raise FilterError(f"input is {x.fmt}, filter expects {self.fmt}")
        s = self.state
        head = s[0] if s else 0
        y = saturate(round_shift(self._b(0) * x.raw + head, self.coeff_fmt.frac), self.fmt)
        for i in range(self.order):
            tail = s[i + 1] if i + 1 < self.order else 0
            s[i] = self._b(i + 1) * x.raw - self._a(i + 1) * y + tail
        return QSample(y, self.fmt)

    def run(self, trace: Trace) -> Trace:
        return Trace.of([self.step(x) for x in trace], self.fmt)


def biquad_as_df2t(coeffs: BiquadCoeffs) -> tuple[list[QSample], list[QSample]]:
    """Expand g·(1, β1, β2) / (1, a1, a2) into DF2T (b, a) in the same coefficient format."""
    fmt = coeffs.fmt
    g = coeffs.g.raw

    def scaled(beta: QSample) -> QSample:
        return QSample(saturate(round_shift(g * beta.raw, fmt.frac), fmt), fmt)

    return [coeffs.g, scaled(coeffs.beta1), scaled(coeffs.beta2)], [coeffs.a1, coeffs.a2]


def biquad_step(f: Biquad, x: QSample) -> QSample:
    return f.step(x)


def iir_df2t_step(f: IirDf2t, x: QSample) -> QSample:
    return f.step(x)
