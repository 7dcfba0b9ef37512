"""SPM accumulation experiments on periodic lines.

Amplifiers are noiseless so the only impairment left after ideal dispersion
compensation is nonlinear interference. The measured noise power after ``n``
spans, ``N(n) = P_ch / SNR(n)``, gives the empirical coherence coefficient
``c_hat(n) = N(n) / N(1) - n``, the counterpart of the analytic C(n).
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..core import Route
from ..errors import InvalidParameterError, NonPerturbativeError
from .propagation import AdaptiveStep, FixedStep, amplify_noiseless, propagate_span
from .receiver import receive_and_measure
from .transmitter import generate_waveform

__all__ = [
    "SimConfig",
    "SimRun",
    "SpmCalibration",
    "CoherenceExtractionWarning",
    "run_accumulation",
    "run_averaged",
    "extract_coherence",
    "calibrate_single_span_spm",
]

logger = logging.getLogger(__name__)

MIN_SYMBOLS = 2**12
MIN_SAMPLES_PER_SYMBOL = 8
MAX_ADAPTIVE_PHASE = 1e-3
# tolerated SNR increase between consecutive spans before a run counts as noisy
MONOTONE_SLACK_DB = 0.05


class CoherenceExtractionWarning(UserWarning):
    """Noise power did not grow monotonically; more averaging is needed."""


@dataclass(frozen=True)
class SimConfig:
    route: Route
    seed: int = 1
    n_symbols: int = 2**15
    samples_per_symbol: int = 16
    step_control: AdaptiveStep | FixedStep = field(default_factory=AdaptiveStep)
    measure_after_each_span: bool = True
    edge_symbols: int = 64

    def __post_init__(self):
        if self.n_symbols < MIN_SYMBOLS:
            raise InvalidParameterError(f"n_symbols must be >= {MIN_SYMBOLS}, got {self.n_symbols}")
        if self.samples_per_symbol < MIN_SAMPLES_PER_SYMBOL:
            raise InvalidParameterError(
                f"samples_per_symbol must be >= {MIN_SAMPLES_PER_SYMBOL}, got {self.samples_per_symbol}"
            )
        if isinstance(self.step_control, AdaptiveStep) and self.step_control.max_phase > MAX_ADAPTIVE_PHASE:
            raise InvalidParameterError(
                f"adaptive steps need max_phase <= {MAX_ADAPTIVE_PHASE} rad, got {self.step_control.max_phase}"
            )
        if self.edge_symbols < 0 or 2 * self.edge_symbols >= self.n_symbols:
            raise InvalidParameterError("edge_symbols must leave symbols to measure")

    @property
    def channel(self):
        return self.route.channel

    def with_route(self, route):
        return replace(self, route=route)


@dataclass(frozen=True)
class SimRun:
    """Per-span measurements of one experiment (or a seed average).

    Arrays are indexed by span count minus one. ``delta_snr_per_span[0]`` is
    NaN because the back-to-back SNR is unbounded.
    """

    config: SimConfig
    span_indices: np.ndarray
    snr_per_span: np.ndarray
    delta_snr_per_span: np.ndarray
    noise_power: np.ndarray
    extracted_c: np.ndarray
    seeds: tuple[int, ...] = ()
    nonperturbative: tuple[int, ...] = ()

    @property
    def n_spans(self):
        return len(self.span_indices)


def _check_periodic(route):
    if not route.is_periodic:
        raise InvalidParameterError("accumulation experiments need a periodic route of identical spans")


def _propagate(config: SimConfig):
    """Noise power N(n) (W) at each measured span count."""
    route = config.route
    channel = route.channel
    signal = generate_waveform(config.seed, channel, config.n_symbols, config.samples_per_symbol)
    indices, noise = [], []
    last = len(route)
    for n, (span, amp) in enumerate(route, start=1):
        signal = propagate_span(signal, span, config.step_control)
        signal = amplify_noiseless(signal, amp.gain)
        if config.measure_after_each_span or n == last:
            snr_db = receive_and_measure(signal, channel, edge_symbols=config.edge_symbols)
            indices.append(n)
            noise.append(0.0 if snr_db == math.inf else channel.launch_power / 10 ** (snr_db / 10))
            logger.debug("span %d: SNR %.4f dB", n, snr_db)
    return np.array(indices), np.array(noise)


def _assemble(config, indices, noise, seeds):
    p = config.channel.launch_power
    with np.errstate(divide="ignore"):
        snr = 10.0 * np.log10(p / noise)
    delta = np.full(snr.shape, np.nan)
    if len(indices) > 1 and np.all(np.diff(indices) == 1):
        delta[1:] = snr[:-1] - snr[1:]
    chat = _coherence_from_noise(indices, noise)
    flagged = tuple(int(i) for i, s in zip(indices, snr) if s < 0)
    if flagged:
        logger.warning("SNR below 0 dB after spans %s: outside the perturbative regime", flagged)
    return SimRun(config, indices, snr, delta, noise, chat, tuple(seeds), flagged)


def _coherence_from_noise(indices, noise):
    if len(indices) == 0 or indices[0] != 1 or noise[0] == 0:
        return np.full(len(indices), np.nan)
    return noise / noise[0] - indices


def run_accumulation(config: SimConfig):
    """Propagate through every span of a periodic route, measuring SNR_SPM after each."""
    _check_periodic(config.route)
    indices, noise = _propagate(config)
    return _assemble(config, indices, noise, (config.seed,))


def run_averaged(config: SimConfig, seeds: Sequence[int], executor=None):
    """Average the noise power N(n) over independent seeds."""
    _check_periodic(config.route)
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidParameterError("need at least one seed")
    configs = [replace(config, seed=s) for s in seeds]
    mapper = map if executor is None else executor.map
    results = list(mapper(_propagate, configs))
    indices = results[0][0]
    noise = np.mean([r[1] for r in results], axis=0)
    return _assemble(config, indices, noise, seeds)


def extract_coherence(run: SimRun):
    """Empirical coherence coefficients ``c_hat(n) = N(n)/N(1) - n``."""
    if run.n_spans < 2 or run.span_indices[0] != 1:
        raise InvalidParameterError("coherence extraction needs measurements after span 1 and later spans")
    snr = run.snr_per_span
    if np.any(np.diff(snr) > MONOTONE_SLACK_DB):
        warnings.warn(
            "nonlinear noise power is not monotone in span count; average over more seeds",
            CoherenceExtractionWarning,
            stacklevel=2,
        )
    return _coherence_from_noise(run.span_indices, run.noise_power)


@dataclass(frozen=True)
class SpmCalibration:
    """Single-span SPM generation at the configured launch power.

    ``p_spm`` is N(1) in W; ``eta`` is ``p_spm / launch_power**3`` in 1/W**2;
    ``scaling_db`` is the measured growth of N(1) for a ``step_db`` power step.
    """

    p_spm: float
    eta: float
    launch_power: float
    step_db: float
    scaling_db: float


def calibrate_single_span_spm(config: SimConfig, step_db=1.0, cubic_tolerance=0.1):
    """Measure N(1) and check it grows with the cube of the launch power.

    Raises
    ------
    NonPerturbativeError
        If N(1) at the raised power departs from the cubic prediction by more
        than ``cubic_tolerance`` (relative).
    """
    route = config.route
    first = Route((route.spans[0],), (route.amplifiers[0],), route.channel)
    base = replace(config, route=first, measure_after_each_span=True)
    p = route.channel.launch_power
    _, n_low = _propagate(base)
    p_spm = float(n_low[0])
    if route.spans[0].gamma_nl == 0:
        return SpmCalibration(p_spm, p_spm / p**3, p, step_db, math.nan)
    raised = route.with_channel(replace(route.channel, launch_power=p * 10 ** (step_db / 10)))
    _, n_high = _propagate(base.with_route(Route((raised.spans[0],), (raised.amplifiers[0],), raised.channel)))
    ratio = float(n_high[0]) / p_spm
    expected = 10 ** (3 * step_db / 10)
    scaling_db = 10 * math.log10(ratio)
    if abs(ratio / expected - 1) > cubic_tolerance:
        raise NonPerturbativeError(
            f"N(1) grew by {scaling_db:.2f} dB for a {step_db:g} dB power step "
            f"(cubic law: {3 * step_db:.2f} dB)"
        )
    return SpmCalibration(p_spm, p_spm / p**3, p, step_db, scaling_db)
