"""
Experiment orchestration.

One run builds the shared stimulus, materializes the golden FIR output for
the test phase, then runs every requested model:

- fir, iir   classical kernels, zero state at the start of each phase
- nfir       trained online on the train phase with the FIR output as target
- niir       trained online with the classical IIR output as target

Neuro models are switched to infer mode and reset before the test phase.
Every MSE is taken on the test phase against the one golden trace.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass, field

from fixedpoint.qformat import dequantize
from filters_classic.coeff_utils import load_coefficients
from filters_classic.design import design_lowpass_biquad, design_lowpass_fir
from filters_classic.fir import FirFilter
from filters_classic.iir import Biquad, IirDf2t, biquad_as_df2t
from neuro_core.coding import spiking_output_stage
from neuro_core.lif import LifParams
from neuro_filters.networks import ElmanNet, Mode, NeuroFir
from neuro_filters.tanh_lut import TanhLut
from neurodsp.exceptions import NeuroDspError
from signals.generators import gen_impulse, gen_step, gen_test_signal, phase_seeds
from signals.metrics import mse
from signals.traces import Trace
from .config import MODEL_ORDER, ExperimentConfig, ExperimentError

logger = logging.getLogger(__name__)

GOLDEN_MODEL = 'fir'


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    train_seed: int
    test_seed: int
    input: Trace
    outputs: dict[str, Trace]
    mse_table: dict[str, float]
    train_errors: dict[str, list[float]] = field(default_factory=dict)
    spike_rates: dict[str, float] = field(default_factory=dict)

    @property
    def models(self) -> list[str]:
        return [m for m in MODEL_ORDER if m in self.outputs]

    def canonical(self) -> dict:
        return {
            'config': self.config.as_dict(),
            'seeds': {'seed': self.config.seed, 'train': self.train_seed, 'test': self.test_seed},
            'input': self.input.raws(),
            'outputs': {m: self.outputs[m].raws() for m in self.models},
            'mse': {m: repr(self.mse_table[m]) for m in self.models},
            'train_errors': {m: [repr(e) for e in errs] for m, errs in sorted(self.train_errors.items())},
            'spike_rates': {m: repr(r) for m, r in sorted(self.spike_rates.items())},
        }

    def canonical_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True, separators=(',', ':'))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()


@contextmanager
def attributed(model: str):
    """Re-raise module errors as ExperimentError naming the model."""
    try:
        yield
    except ExperimentError:
        raise
    except NeuroDspError as exc:
        raise ExperimentError(f"{model}: {exc}") from exc


def build_stimulus(cfg: ExperimentConfig, n_steps: int, seed: int) -> Trace:
    if cfg.stimulus == 'impulse':
        return gen_impulse(n_steps, cfg.amp, cfg.fmt)
    if cfg.stimulus == 'step':
        return gen_step(n_steps, cfg.amp, cfg.fmt)
    return gen_test_signal(cfg.signal(n_steps, seed))


def build_golden_fir(cfg: ExperimentConfig) -> FirFilter:
    if cfg.fir_coeffs:
        coeffs = load_coefficients(cfg.fir_coeffs, cfg.fmt)
    else:
        coeffs = design_lowpass_fir(cfg.fir_taps, cfg.fir_cutoff, cfg.fmt)
    return FirFilter(coeffs, cfg.fmt)


def build_classic_iir(cfg: ExperimentConfig) -> Biquad | IirDf2t:
    coeffs = design_lowpass_biquad(cfg.iir_cutoff, cfg.iir_q, cfg.fmt)
    if cfg.iir_form == 'df2t':
        b, a = biquad_as_df2t(coeffs)
        return IirDf2t(b, a, cfg.fmt)
    return Biquad(coeffs, cfg.fmt)


def build_network(model: str, cfg: ExperimentConfig, n_taps: int, lut: TanhLut) -> NeuroFir | ElmanNet:
    common = {
        'mu': cfg.mu,
        'lut': lut,
        'storage': cfg.storage,
        'levels': cfg.crossbar_levels,
    }
    if model == 'nfir':
        return NeuroFir.from_settings(n_taps, cfg.fmt, cfg.seed, n_hidden=cfg.nfir_hidden, **common)
    return ElmanNet.from_settings(
        cfg.fmt, cfg.seed, n_hidden=cfg.niir_hidden, row_sum_limit=cfg.elman_row_sum, **common
    )


def run_phase(kernel, trace: Trace) -> Trace:
    kernel.reset()
    return kernel.run(trace)


def train_network(net: NeuroFir | ElmanNet, x: Trace, desired: Trace) -> list[float]:
    """Online LMS over one phase; returns the squared error of every step."""
    net.set_mode(Mode.TRAIN)
    net.reset()
    errors = []
    for xn, dn in zip(x, desired):
        _, err = net.train_step(xn, dn)
        errors.append(dequantize(err) ** 2)
    return errors


def infer_network(net: NeuroFir | ElmanNet, x: Trace) -> Trace:
    net.set_mode(Mode.INFER)
    net.reset()
    return Trace.of([net.forward(s) for s in x], x.fmt)


def saturated_count(trace: Trace) -> int:
    rails = (trace.fmt.raw_min, trace.fmt.raw_max)
    return sum(1 for s in trace if s.raw in rails)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    requested = [m for m in MODEL_ORDER if m in cfg.models]
    train_seed, test_seed = phase_seeds(cfg.seed)
    logger.info(
        "experiment: models=%s steps=%d train_steps=%d seed=%d stimulus=%s format=%s",
        ','.join(requested), cfg.steps, cfg.train_steps, cfg.seed, cfg.stimulus, cfg.fmt,
    )

    with attributed('stimulus'):
        x_test = build_stimulus(cfg, cfg.steps, test_seed)
        x_train = build_stimulus(cfg, cfg.train_steps, train_seed) if cfg.train_steps else None

    with attributed('fir'):
        fir = build_golden_fir(cfg)
        golden = run_phase(fir, x_test)
    logger.info("golden FIR reference: %d taps, %d samples", len(fir.coeffs), len(golden))

    iir = None
    if 'iir' in requested or 'niir' in requested:
        with attributed('iir'):
            iir = build_classic_iir(cfg)
            iir_test = run_phase(iir, x_test)

    outputs: dict[str, Trace] = {}
    train_errors: dict[str, list[float]] = {}
    lut = None
    for model in requested:
        with attributed(model):
            if model == 'fir':
                outputs[model] = golden
            elif model == 'iir':
                outputs[model] = iir_test
            else:
                if lut is None:
                    lut = TanhLut(cfg.fmt, cfg.tanh_lut_size, cfg.tanh_lut_range)
                net = build_network(model, cfg, len(fir.coeffs), lut)
                if x_train is not None:
                    target_kernel = fir if model == 'nfir' else iir
                    desired = run_phase(target_kernel, x_train)
                    logger.info("%s: training on %d steps", model, len(x_train))
                    train_errors[model] = train_network(net, x_train, desired)
                else:
                    logger.warning("%s: running untrained", model)
                outputs[model] = infer_network(net, x_test)
        saturated = saturated_count(outputs[model])
        logger.info("%s: %d saturated output samples", model, saturated)

    mse_table = {model: mse(outputs[model], golden) for model in requested}

    spike_rates: dict[str, float] = {}
    if cfg.spike_stage:
        params = LifParams.from_settings()
        for model in requested:
            with attributed(model):
                rates = spiking_output_stage(outputs[model], params, cfg.spike_i_scale, cfg.spike_window)
            spike_rates[model] = math.fsum(rates) / len(rates)

    result = ExperimentResult(
        config=cfg,
        train_seed=train_seed,
        test_seed=test_seed,
        input=x_test,
        outputs=outputs,
        mse_table=mse_table,
        train_errors=train_errors,
        spike_rates=spike_rates,
    )
    logger.info("experiment done: %s", ', '.join(f"{m}={v:.6f}" for m, v in mse_table.items()))
    return result


def learning_curve_drop(errors: list[float], window: int = 200) -> tuple[float, float]:
    """Mean squared error over the first and the last ``window`` training steps."""
    if len(errors) < window:
        raise ExperimentError(f"need at least {window} training steps, got {len(errors)}")
    return math.fsum(errors[:window]) / window, math.fsum(errors[-window:]) / window
