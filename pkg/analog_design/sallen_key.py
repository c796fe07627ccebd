"""
Sallen-Key Second-Order Low-Pass Calculator
===========================================

Design arithmetic for the unity-feedback op-amp stage with gain-setting
resistors R_A (to ground) and R_B (feedback):

    K   = (4 + α) / 2            DC gain, K = 1 + R_B / R_A
    f_c = (4 + β) / 2  kHz       cut-off frequency
    R   = 1 / (2π · f_c · C)     equal-R, equal-C network

and its s-domain transfer function

    H(s) = b0 / (s² + a1·s + a0)
    b0 = K / (RC)²,  a1 = (3 − K) / (RC),  a0 = 1 / (RC)²
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from neurodsp.exceptions import NeuroDspError


class AnalogDesignError(NeuroDspError):
    """Non-physical component values or a degenerate gain"""
    pass


@dataclass(frozen=True)
class SallenKeyDesign:
    alpha: float
    beta: float
    c: float
    r_a: float
    k: float
    f_c: float
    r: float
    r_b: float

    def as_rows(self) -> list[tuple[str, float, str]]:
        return [
            ('K', self.k, ''),
            ('f_c', self.f_c, 'Hz'),
            ('R', self.r, 'ohm'),
            ('R_A', self.r_a, 'ohm'),
            ('R_B', self.r_b, 'ohm'),
            ('C', self.c, 'F'),
        ]


@dataclass(frozen=True)
class SecondOrderTF:
    """b0 / (s² + a1·s + a0)"""
    b0: float
    a1: float
    a0: float

    def __post_init__(self):
        for name in ('b0', 'a1', 'a0'):
            if not math.isfinite(getattr(self, name)):
                raise AnalogDesignError(f"{name} must be finite, got {getattr(self, name)}")
        if not self.a0 > 0:
            raise AnalogDesignError(f"a0 must be positive, got {self.a0}")

    def at(self, s: complex) -> complex:
        return self.b0 / (s * s + self.a1 * s + self.a0)


def sallen_key_design(alpha: float, beta: float, c: float, r_a: float, r_override: float | None = None) -> SallenKeyDesign:
    """
    Compute K, f_c, R and R_B from the design inputs.

    Args:
        alpha, beta: dimensionless design inputs
        c: capacitance in farads
        r_a: ground-leg resistor in ohms
        r_override: pin R instead of deriving it from f_c and C

    Raises:
        AnalogDesignError: non-positive components or K <= 1
    """
    if not c > 0:
        raise AnalogDesignError(f"C must be positive, got {c}")
    if not r_a > 0:
        raise AnalogDesignError(f"R_A must be positive, got {r_a}")
    k = (4 + alpha) / 2
    if k <= 1:
        raise AnalogDesignError(f"K = {k} leaves R_B = R_A(K - 1) non-positive")
    f_c = (4 + beta) / 2 * 1000.0
    if not f_c > 0:
        raise AnalogDesignError(f"cut-off frequency must be positive, got {f_c} Hz")
    r = 1 / (2 * math.pi * f_c * c)
    if r_override is not None:
        if not r_override > 0:
            raise AnalogDesignError(f"R must be positive, got {r_override}")
        r = r_override
    return SallenKeyDesign(alpha=alpha, beta=beta, c=c, r_a=r_a, k=k, f_c=f_c, r=r, r_b=r_a * (k - 1))


def sallen_key_transfer(d: SallenKeyDesign) -> SecondOrderTF:
    rc = d.r * d.c
    return SecondOrderTF(b0=d.k / rc ** 2, a1=(3 - d.k) / rc, a0=1 / rc ** 2)


def sallen_key_transfer_general(r1: float, r2: float, c3: float, c4: float, k: float) -> SecondOrderTF:
    """Unequal-component form; R1, R2 series resistors, C3 feedback and C4 ground capacitors."""
    for name, value in (('R1', r1), ('R2', r2), ('C3', c3), ('C4', c4)):
        if not value > 0:
            raise AnalogDesignError(f"{name} must be positive, got {value}")
    product = r1 * r2 * c3 * c4
    a1 = 1 / (r1 * c3) + 1 / (r2 * c3) + 1 / (r2 * c4) - k / (r2 * c4)
    return SecondOrderTF(b0=k / product, a1=a1, a0=1 / product)


def tf_magnitude(tf: SecondOrderTF, f: float) -> float:
    if f < 0:
        raise AnalogDesignError(f"frequency must be non-negative, got {f}")
    return abs(tf.at(2j * math.pi * f))


def stability_check(tf: SecondOrderTF) -> bool:
    """Both poles strictly in the left half-plane."""
    return tf.a1 > 0 and tf.a0 > 0


def tf_poles(tf: SecondOrderTF) -> tuple[complex, complex]:
    p = np.roots([1.0, tf.a1, tf.a0])
    return complex(p[0]), complex(p[1])


def quality_factor(tf: SecondOrderTF) -> float:
    if tf.a1 == 0:
        raise AnalogDesignError("Q is unbounded for a1 = 0")
    return math.sqrt(tf.a0) / tf.a1
