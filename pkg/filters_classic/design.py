"""
Default coefficient designs for the classical filters.

- FIR: Hamming-windowed sinc, normalized to unit DC gain, then quantized.
- Biquad: bilinear-transform low-pass from the audio EQ cookbook
  (g·(1 + 2z⁻¹ + z⁻²) / (1 + a1·z⁻¹ + a2·z⁻²)), unit DC gain.
"""

from __future__ import annotations

import math

import numpy as np

from fixedpoint.qformat import QFormat, QSample, coefficient_format, dequantize, quantize
from .fir import FilterError
from .iir import BiquadCoeffs


def design_lowpass_fir(num_taps: int, cutoff: float, fmt: QFormat) -> list[QSample]:
    """``cutoff`` is normalized to the sample rate (0 < cutoff < 0.5)."""
    if num_taps < 1 or num_taps % 2 == 0:
        raise FilterError(f"num_taps must be a positive odd number, got {num_taps}")
    if not 0 < cutoff < 0.5:
        raise FilterError(f"cutoff must lie in (0, 0.5), got {cutoff}")
    n = np.arange(num_taps) - (num_taps - 1) / 2
    h = 2 * cutoff * np.sinc(2 * cutoff * n) * np.hamming(num_taps)
    h = h / np.sum(h)
    return [quantize(float(v), fmt) for v in h]


def design_lowpass_biquad(cutoff: float, q: float, fmt: QFormat) -> BiquadCoeffs:
    """
    Second-order low-pass for data in ``fmt``.

    Coefficients come back in ``coefficient_format(fmt)``. β1 is re-derived
    from the quantized g, a1 and a2 so that the quantized filter keeps its DC
    gain within a fraction of one coefficient LSB of unity.
    """
    if not 0 < cutoff < 0.5:
        raise FilterError(f"cutoff must lie in (0, 0.5), got {cutoff}")
    if not q > 0:
        raise FilterError(f"q must be positive, got {q}")
    cfmt = coefficient_format(fmt)
    w0 = 2 * math.pi * cutoff
    alpha = math.sin(w0) / (2 * q)
    a0 = 1 + alpha
    g = quantize((1 - math.cos(w0)) / 2 / a0, cfmt)
    a1 = quantize(-2 * math.cos(w0) / a0, cfmt)
    a2 = quantize((1 - alpha) / a0, cfmt)
    if g.raw == 0:
        raise FilterError(f"cutoff {cutoff} is too low for {cfmt} coefficients")
    beta2 = quantize(1.0, cfmt)
    denominator_dc = 1 + dequantize(a1) + dequantize(a2)
    beta1 = quantize(denominator_dc / dequantize(g) - 1 - dequantize(beta2), cfmt)
    return BiquadCoeffs(g=g, beta1=beta1, beta2=beta2, a1=a1, a2=a2)
