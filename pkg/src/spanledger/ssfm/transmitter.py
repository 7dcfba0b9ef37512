"""Pulse-shaped single-channel transmitter."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from ..core import ChannelConfig, Constellation
from ..errors import InvalidParameterError

__all__ = ["Signal", "random_symbols", "rrc_response", "generate_waveform"]


@dataclass(frozen=True)
class Signal:
    """Sampled complex envelope of the channel (periodic over its window).

    ``field`` is in sqrt(W). ``accumulated_dispersion`` is the sum of
    ``beta2 * length`` over every span crossed so far, in s**2.
    """

    field: np.ndarray
    symbols: np.ndarray
    symbol_rate: float
    samples_per_symbol: int
    accumulated_dispersion: float = 0.0

    @property
    def sample_rate(self):
        return self.symbol_rate * self.samples_per_symbol

    @property
    def power(self):
        return float(np.mean(self.field.real**2 + self.field.imag**2))

    @property
    def energy(self):
        """Field energy over the window in J."""
        return self.power * self.field.size / self.sample_rate

    def frequencies(self):
        return sfft.fftfreq(self.field.size, 1.0 / self.sample_rate)

    def with_field(self, field, extra_dispersion=0.0):
        return replace(self, field=field, accumulated_dispersion=self.accumulated_dispersion + extra_dispersion)


def random_symbols(rng, constellation, n):
    """``n`` equiprobable symbols of unit average energy."""
    constellation = Constellation.parse(constellation)
    if constellation is Constellation.GAUSSIAN:
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    if constellation is Constellation.QPSK:
        levels, scale = np.array([-1.0, 1.0]), np.sqrt(2.0)
    else:
        levels, scale = np.array([-3.0, -1.0, 1.0, 3.0]), np.sqrt(10.0)
    i = levels[rng.integers(0, levels.size, n)]
    q = levels[rng.integers(0, levels.size, n)]
    return (i + 1j * q) / scale


def rrc_response(freqs, symbol_rate, roll_off):
    """Root-raised-cosine amplitude response (unit passband gain)."""
    af = np.abs(freqs) / symbol_rate
    lo = (1.0 - roll_off) / 2.0
    hi = (1.0 + roll_off) / 2.0
    h = np.zeros(af.shape)
    h[af <= lo] = 1.0
    if roll_off > 0:
        band = (af > lo) & (af <= hi)
        h[band] = np.sqrt(0.5 * (1.0 + np.cos(np.pi / roll_off * (af[band] - lo))))
    return h


def generate_waveform(seed, channel: ChannelConfig, n_symbols, samples_per_symbol):
    """Random symbols shaped by a root-raised-cosine filter at ``launch_power``.

    Filtering is done in the frequency domain over a periodic window, so the
    waveform has no edge transients and no power outside
    ``symbol_rate * (1 + roll_off) / 2`` on either side of the carrier.
    """
    if int(samples_per_symbol) != samples_per_symbol or samples_per_symbol < 1:
        raise InvalidParameterError("samples_per_symbol must be a positive integer")
    if samples_per_symbol < 1.0 + channel.roll_off:
        raise InvalidParameterError(
            f"{samples_per_symbol} samples per symbol is below Nyquist for roll-off {channel.roll_off}"
        )
    if n_symbols < 2:
        raise InvalidParameterError("need at least two symbols")
    sps = int(samples_per_symbol)
    rng = np.random.default_rng(seed)
    symbols = random_symbols(rng, channel.constellation, int(n_symbols))
    upsampled = np.zeros(symbols.size * sps, dtype=complex)
    upsampled[::sps] = symbols
    freqs = sfft.fftfreq(upsampled.size, 1.0 / (channel.symbol_rate * sps))
    field = sfft.ifft(sfft.fft(upsampled) * rrc_response(freqs, channel.symbol_rate, channel.roll_off))
    field *= np.sqrt(channel.launch_power / np.mean(np.abs(field) ** 2))
    return Signal(field, symbols, channel.symbol_rate, sps)
