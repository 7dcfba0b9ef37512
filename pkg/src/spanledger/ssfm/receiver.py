"""Data-aided coherent receiver measuring the EVM-equivalent SNR."""
from __future__ import annotations

import math

import numpy as np
import scipy.fft as sfft

from ..core import ChannelConfig
from ..errors import InvalidParameterError
from .transmitter import Signal, rrc_response

__all__ = ["equalize", "measure_snr", "receive_and_measure"]


def equalize(signal: Signal, roll_off, accumulated_dispersion=None):
    """Ideal CD compensation, matched RRC filter and symbol-rate sampling."""
    if accumulated_dispersion is None:
        accumulated_dispersion = signal.accumulated_dispersion
    freqs = signal.frequencies()
    omega2 = (2.0 * np.pi * freqs) ** 2
    spectrum = sfft.fft(signal.field)
    spectrum *= np.exp(-0.5j * accumulated_dispersion * omega2)
    spectrum *= rrc_response(freqs, signal.symbol_rate, roll_off)
    return sfft.ifft(spectrum, overwrite_x=True)[:: signal.samples_per_symbol]


def measure_snr(received, reference, edge_symbols=0):
    """Linear SNR after a one-tap least-squares fit of ``received`` to ``reference``.

    The tap absorbs amplitude scaling and the common (mean nonlinear) phase.
    """
    received = np.asarray(received)
    reference = np.asarray(reference)
    if received.shape != reference.shape:
        raise InvalidParameterError("received and reference symbol counts differ")
    if edge_symbols:
        if 2 * edge_symbols >= received.size:
            raise InvalidParameterError("edge exclusion removes every symbol")
        received = received[edge_symbols:-edge_symbols]
        reference = reference[edge_symbols:-edge_symbols]
    ref_energy = np.vdot(reference, reference).real
    tap = np.vdot(reference, received) / ref_energy
    error = received - tap * reference
    noise = np.vdot(error, error).real
    if noise == 0:
        return math.inf
    return abs(tap) ** 2 * ref_energy / noise


def receive_and_measure(
    signal: Signal,
    channel: ChannelConfig,
    reference_symbols=None,
    accumulated_dispersion=None,
    edge_symbols=64,
):
    """SNR in dB of the DSP-recovered constellation against the sent symbols."""
    if reference_symbols is None:
        reference_symbols = signal.symbols
    received = equalize(signal, channel.roll_off, accumulated_dispersion)
    snr = measure_snr(received, reference_symbols, edge_symbols)
    return math.inf if snr == math.inf else 10.0 * math.log10(snr)
