"""Symmetric split-step integration of the scalar NLSE.

    dA/dz = -(alpha/2) A - j (beta2/2) d2A/dt2 + j gamma |A|^2 A

Dispersion is applied in the frequency domain, Kerr phase and loss in the
time domain. Consecutive half dispersion steps are merged, so each step costs
one FFT pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ..core import FiberSpan
from ..errors import InvalidParameterError
from .transmitter import Signal

__all__ = ["FixedStep", "AdaptiveStep", "MAX_STEP_PHASE", "step_plan", "propagate_span", "amplify_noiseless"]

# steps rotating the mean-power Kerr phase by more than this are refused
MAX_STEP_PHASE = 0.05


@dataclass(frozen=True)
class FixedStep:
    """Uniform steps of at most ``step`` metres."""

    step: float

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidParameterError(f"step must be positive, got {self.step!r}")


@dataclass(frozen=True)
class AdaptiveStep:
    """Steps sized so the mean-power Kerr phase per step is ``max_phase`` rad."""

    max_phase: float = 1e-3

    def __post_init__(self):
        if not (math.isfinite(self.max_phase) and self.max_phase > 0):
            raise InvalidParameterError(f"max_phase must be positive, got {self.max_phase!r}")


def _effective_length(alpha, h):
    return h if alpha == 0 else -math.expm1(-alpha * h) / alpha


def step_plan(span: FiberSpan, control, power):
    """Step lengths (m) covering ``span`` for a field of mean ``power`` (W) at its input."""
    length, alpha, gamma = span.length, span.attenuation, span.gamma_nl
    if isinstance(control, FixedStep):
        n = max(1, math.ceil(length / control.step - 1e-9))
        steps = [length / n] * n
        phase = gamma * power * _effective_length(alpha, steps[0])
        if phase > MAX_STEP_PHASE:
            raise InvalidParameterError(
                f"fixed step of {steps[0]:.4g} m gives a nonlinear phase of {phase:.3g} rad "
                f"(limit {MAX_STEP_PHASE} rad)"
            )
        return steps
    if not isinstance(control, AdaptiveStep):
        raise InvalidParameterError(f"unknown step control {control!r}")
    if gamma == 0 or power == 0:
        return [length]
    steps = []
    z = 0.0
    while z < length * (1 - 1e-12):
        p = power * math.exp(-alpha * z)
        # largest h with gamma * p * L_eff(h) <= max_phase
        budget = control.max_phase / (gamma * p)
        if alpha == 0:
            h = budget
        elif alpha * budget >= 1:
            h = math.inf
        else:
            h = -math.log1p(-alpha * budget) / alpha
        h = min(h, length - z)
        steps.append(h)
        z += h
    return steps


def propagate_span(signal: Signal, span: FiberSpan, step_control=None):
    """Propagate ``signal`` through one fiber span (no amplification)."""
    if step_control is None:
        step_control = AdaptiveStep()
    steps = step_plan(span, step_control, signal.power)
    omega2 = (2.0 * np.pi * signal.frequencies()) ** 2
    half = 0.5j * span.beta2 * omega2 / 2.0  # times step length -> half-step exponent
    alpha, gamma = span.attenuation, span.gamma_nl

    spectrum = sfft.fft(signal.field)
    spectrum *= np.exp(half * steps[0])
    for i, h in enumerate(steps):
        field = sfft.ifft(spectrum, overwrite_x=True)
        if gamma > 0:
            phase = field.real * field.real
            phase += field.imag * field.imag
            phase *= gamma * _effective_length(alpha, h)
            field *= np.cos(phase) + 1j * np.sin(phase)
        if alpha > 0:
            field *= math.exp(-alpha * h / 2.0)
        spectrum = sfft.fft(field, overwrite_x=True)
        following = steps[i + 1] if i + 1 < len(steps) else 0.0
        spectrum *= np.exp(half * (h + following))
    return signal.with_field(sfft.ifft(spectrum, overwrite_x=True), span.beta2 * span.length)


def amplify_noiseless(signal: Signal, gain):
    """Scale the field power by ``gain`` without adding noise."""
    if not gain >= 1:
        raise InvalidParameterError(f"gain must be >= 1, got {gain!r}")
    if gain == 1:
        return signal
    return signal.with_field(signal.field * math.sqrt(gain))
