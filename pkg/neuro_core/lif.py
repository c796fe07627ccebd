"""
Leaky integrate-and-fire neuron
===============================

    τ · dV/dt = −(V − V_rest) + R · I_in        (C = τ / R)

Euler discretization with step dt:

    V' = V + (dt/τ) · (−(V − V_rest) + R · I_in)

V' ≥ V_th emits a spike, resets V to V_reset and starts an absolute
refractory period of t_ref seconds during which V is held at V_reset.
All neuron math is double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from django.conf import settings

from neurodsp.exceptions import NeuroDspError


class NeuronError(NeuroDspError):
    """Ill-posed neuron parameters or coding arguments"""
    pass


@dataclass(frozen=True)
class LifParams:
    tau: float = 0.01
    v_rest: float = 0.0
    r_mem: float = 1.0
    v_th: float = 1.0
    v_reset: float = 0.0
    t_ref: float = 0.0
    dt: float = 0.001

    def __post_init__(self):
        if not self.tau > 0:
            raise NeuronError(f"tau must be positive, got {self.tau}")
        if not self.dt > 0:
            raise NeuronError(f"dt must be positive, got {self.dt}")
        if self.dt > self.tau / 2:
            raise NeuronError(f"dt = {self.dt} exceeds tau/2 = {self.tau / 2}")
        if not self.v_th > self.v_reset >= self.v_rest:
            raise NeuronError(
                f"need v_th > v_reset >= v_rest, got {self.v_th}, {self.v_reset}, {self.v_rest}"
            )
        if self.t_ref < 0:
            raise NeuronError(f"t_ref must be non-negative, got {self.t_ref}")

    @classmethod
    def from_settings(cls, **overrides) -> LifParams:
        conf = settings.NEURODSP
        params = cls(
            tau=conf['LIF_TAU'],
            v_rest=conf['LIF_V_REST'],
            r_mem=conf['LIF_R'],
            v_th=conf['LIF_V_TH'],
            v_reset=conf['LIF_V_RESET'],
            t_ref=conf['LIF_T_REF'],
            dt=conf['LIF_DT'],
        )
        return replace(params, **overrides) if overrides else params

    @property
    def capacitance(self) -> float:
        return self.tau / self.r_mem


@dataclass(frozen=True)
class LifState:
    v: float
    refractory_remaining: float = 0.0

    @classmethod
    def at_rest(cls, p: LifParams) -> LifState:
        return cls(v=p.v_rest)


def _fire(p: LifParams) -> tuple[LifState, bool]:
    return LifState(v=p.v_reset, refractory_remaining=p.t_ref), True


def lif_step(state: LifState, p: LifParams, i_in: float) -> tuple[LifState, bool]:
    if state.refractory_remaining > 0:
        remaining = state.refractory_remaining - p.dt
        # float residue from repeated subtraction of dt
        if remaining < p.dt * 1e-9:
            remaining = 0.0
        return LifState(v=p.v_reset, refractory_remaining=remaining), False
    if state.v >= p.v_th:
        return _fire(p)
    v = state.v + (p.dt / p.tau) * (-(state.v - p.v_rest) + p.r_mem * i_in)
    if v >= p.v_th:
        return _fire(p)
    return LifState(v=v), False


def lif_trace(p: LifParams, currents: Iterable[float]) -> tuple[list[float], list[bool]]:
    """Membrane potential after each step and the spike train, starting at rest."""
    state = LifState.at_rest(p)
    voltages, spikes = [], []
    for i_in in currents:
        state, spiked = lif_step(state, p, i_in)
        voltages.append(state.v)
        spikes.append(spiked)
    return voltages, spikes


def lif_run(p: LifParams, currents: Iterable[float]) -> list[bool]:
    return lif_trace(p, currents)[1]


def spike_times(spikes: Sequence[bool]) -> list[int]:
    return [n for n, s in enumerate(spikes) if s]


def isi_closed_form(p: LifParams, current: float) -> float:
    """
    Interspike interval in seconds for a constant current, from reset to
    threshold plus the refractory period. ``math.inf`` if the drive never
    reaches threshold.
    """
    v_inf = p.v_rest + p.r_mem * current
    if v_inf <= p.v_th:
        return math.inf
    return p.tau * math.log((v_inf - p.v_reset) / (v_inf - p.v_th)) + p.t_ref


def firing_rate(p: LifParams, current: float, n_steps: int) -> float:
    """Spikes per second over ``n_steps`` of constant drive."""
    if n_steps < 1:
        raise NeuronError(f"n_steps must be >= 1, got {n_steps}")
    return sum(lif_run(p, [current] * n_steps)) / (n_steps * p.dt)
