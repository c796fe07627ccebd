"""
Experiment configuration.

Defaults come from ``settings.NEURODSP``; an INI-style config file and then
command-line flags override them key by key. Config keys and flags share
their names (``train_steps`` in the file is ``--train-steps`` on the
command line).
"""

from __future__ import annotations

import configparser
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

from django.conf import settings

from fixedpoint.qformat import FixedPointError, Q15, QFormat
from neurodsp.exceptions import NeuroDspError
from signals.generators import SignalConfig
from signals.traces import SignalError

logger = logging.getLogger(__name__)

MODEL_ORDER = ('fir', 'iir', 'nfir', 'niir')
STIMULI = ('sine', 'impulse', 'step')
IIR_FORMS = ('df1', 'df2t')
STORAGES = ('register', 'crossbar')


class ExperimentError(NeuroDspError):
    """Invalid experiment configuration or a failed run"""
    pass


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _to_models(value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = value.split(',')
    return tuple(str(m).strip().lower() for m in value if str(m).strip())


def _to_format(value) -> QFormat:
    return value if isinstance(value, QFormat) else QFormat.parse(str(value).strip())


def _to_optional_path(value) -> str | None:
    text = str(value).strip() if value is not None else ''
    return text or None


def _to_str(value) -> str:
    return str(value).strip().lower()


# key -> (config file section, dataclass field, converter)
CONFIG_KEYS: dict[str, tuple[str, str, Callable[[Any], Any]]] = {
    'amp': ('signal', 'amp', float),
    'freq': ('signal', 'freq', float),
    'fs': ('signal', 'fs', float),
    'noise': ('signal', 'noise', float),
    'seed': ('signal', 'seed', int),
    'format': ('signal', 'fmt', _to_format),
    'stimulus': ('signal', 'stimulus', _to_str),

    'fir_taps': ('filters', 'fir_taps', int),
    'fir_cutoff': ('filters', 'fir_cutoff', float),
    'fir_coeffs': ('filters', 'fir_coeffs', _to_optional_path),
    'iir_cutoff': ('filters', 'iir_cutoff', float),
    'iir_q': ('filters', 'iir_q', float),
    'iir_form': ('filters', 'iir_form', _to_str),

    'nfir_hidden': ('network', 'nfir_hidden', int),
    'niir_hidden': ('network', 'niir_hidden', int),
    'mu': ('network', 'mu', float),
    'elman_row_sum': ('network', 'elman_row_sum', float),
    'storage': ('network', 'storage', _to_str),
    'crossbar_levels': ('network', 'crossbar_levels', int),
    'tanh_lut_size': ('network', 'tanh_lut_size', int),
    'tanh_lut_range': ('network', 'tanh_lut_range', float),

    'models': ('experiment', 'models', _to_models),
    'steps': ('experiment', 'steps', int),
    'train_steps': ('experiment', 'train_steps', int),
    'allow_untrained': ('experiment', 'allow_untrained', _to_bool),
    'spike_stage': ('experiment', 'spike_stage', _to_bool),
    'spike_i_scale': ('experiment', 'spike_i_scale', float),
    'spike_window': ('experiment', 'spike_window', int),
}


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[str, ...] = MODEL_ORDER
    steps: int = 2000
    train_steps: int = 2000
    seed: int = 1
    amp: float = 0.6
    freq: float = 50.0
    fs: float = 1000.0
    noise: float = 0.05
    fmt: QFormat = Q15
    stimulus: str = 'sine'
    fir_taps: int = 15
    fir_cutoff: float = 0.1
    fir_coeffs: str | None = None
    iir_cutoff: float = 0.1
    iir_q: float = 2 ** -0.5
    iir_form: str = 'df1'
    nfir_hidden: int = 8
    niir_hidden: int = 4
    mu: float = 2.0 ** -6
    elman_row_sum: float = 0.9
    storage: str = 'register'
    crossbar_levels: int = 256
    tanh_lut_size: int = 1024
    tanh_lut_range: float = 4.0
    allow_untrained: bool = False
    spike_stage: bool = False
    spike_i_scale: float = 2.0
    spike_window: int = 20

    @classmethod
    def from_settings(cls) -> ExperimentConfig:
        conf = settings.NEURODSP
        return cls(
            models=tuple(conf['MODELS']),
            steps=conf['TEST_STEPS'],
            train_steps=conf['TRAIN_STEPS'],
            seed=conf['SEED'],
            amp=conf['AMPLITUDE'],
            freq=conf['FREQ'],
            fs=conf['SAMPLE_RATE'],
            noise=conf['NOISE_AMP'],
            fmt=QFormat.parse(conf['FORMAT']),
            fir_taps=conf['FIR_TAPS'],
            fir_cutoff=conf['FIR_CUTOFF'],
            iir_cutoff=conf['IIR_CUTOFF'],
            iir_q=conf['IIR_Q'],
            iir_form=conf['IIR_FORM'],
            nfir_hidden=conf['NFIR_HIDDEN'],
            niir_hidden=conf['NIIR_HIDDEN'],
            mu=conf['MU'],
            elman_row_sum=conf['ELMAN_ROW_SUM'],
            storage=conf['WEIGHT_STORAGE'],
            crossbar_levels=conf['CROSSBAR_LEVELS'],
            tanh_lut_size=conf['TANH_LUT_SIZE'],
            tanh_lut_range=conf['TANH_LUT_RANGE'],
        )

    def with_options(self, options: Mapping[str, Any]) -> ExperimentConfig:
        """
        Apply ``key -> value`` overrides. Values may be strings (config file,
        JSON body) or already typed; ``None`` means "not given".
        """
        changes = {}
        for key, value in options.items():
            if value is None:
                continue
            name = key.replace('-', '_')
            if name not in CONFIG_KEYS:
                raise ExperimentError(f"unknown config key {key!r}")
            _, field_name, convert = CONFIG_KEYS[name]
            try:
                changes[field_name] = convert(value)
            except (TypeError, ValueError, FixedPointError) as exc:
                raise ExperimentError(f"{name}: invalid value {value!r}") from exc
        return dataclasses.replace(self, **changes)

    def signal(self, n_steps: int, seed: int) -> SignalConfig:
        return SignalConfig(
            amplitude=self.amp,
            freq=self.freq,
            sample_rate=self.fs,
            noise_amp=self.noise,
            n_steps=n_steps,
            seed=seed,
            fmt=self.fmt,
        )

    def validate(self) -> None:
        if not self.models:
            raise ExperimentError("model set is empty")
        unknown = [m for m in self.models if m not in MODEL_ORDER]
        if unknown:
            raise ExperimentError(f"unknown model(s) {', '.join(unknown)}; choose from {', '.join(MODEL_ORDER)}")
        if len(set(self.models)) != len(self.models):
            raise ExperimentError(f"model listed twice in {','.join(self.models)}")
        if self.steps < 1:
            raise ExperimentError(f"steps must be >= 1, got {self.steps}")
        if self.train_steps < 0:
            raise ExperimentError(f"train_steps must be >= 0, got {self.train_steps}")
        if self.train_steps == 0 and not self.allow_untrained:
            raise ExperimentError("train_steps = 0 needs allow_untrained")
        if self.stimulus not in STIMULI:
            raise ExperimentError(f"stimulus must be one of {', '.join(STIMULI)}, got {self.stimulus!r}")
        if self.iir_form not in IIR_FORMS:
            raise ExperimentError(f"iir_form must be one of {', '.join(IIR_FORMS)}, got {self.iir_form!r}")
        if self.storage not in STORAGES:
            raise ExperimentError(f"storage must be one of {', '.join(STORAGES)}, got {self.storage!r}")
        if self.spike_stage and (self.spike_i_scale <= 0 or self.spike_window < 1):
            raise ExperimentError("spike stage needs spike_i_scale > 0 and spike_window >= 1")
        try:
            self.signal(self.steps, self.seed).validate()
        except SignalError as exc:
            raise ExperimentError(f"signal: {exc}") from exc

    def as_dict(self) -> dict[str, Any]:
        """Config echo keyed by config-file key, JSON-serializable."""
        echo = {}
        for key, (_, field_name, _) in CONFIG_KEYS.items():
            value = getattr(self, field_name)
            if isinstance(value, QFormat):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            echo[key] = value
        return echo


def read_config_file(path) -> dict[str, str]:
    """Raw ``key -> value`` strings from an experiment config file."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    try:
        with path.open(encoding='utf-8') as f:
            parser.read_file(f)
    except OSError as exc:
        raise ExperimentError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ExperimentError(f"{path}: {exc}") from exc

    options = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = key.replace('-', '_')
            if name not in CONFIG_KEYS:
                raise ExperimentError(f"{path}: unknown key {key!r} in [{section}]")
            expected = CONFIG_KEYS[name][0]
            if section != expected:
                raise ExperimentError(f"{path}: key {key!r} belongs in [{expected}], found in [{section}]")
            options[name] = value
    logger.debug("read %d config keys from %s", len(options), path)
    return options


def load_config(path=None, overrides: Mapping[str, Any] | None = None) -> ExperimentConfig:
    """Settings defaults, then the config file, then explicit overrides."""
    cfg = ExperimentConfig.from_settings()
    if path is not None:
        cfg = cfg.with_options(read_config_file(path))
    if overrides:
        cfg = cfg.with_options(overrides)
    cfg.validate()
    return cfg
