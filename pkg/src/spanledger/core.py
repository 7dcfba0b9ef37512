"""Immutable domain records: fiber spans, channel, amplifiers and routes.

All fields are SI. Use the ``from_engineering`` constructors to build records
from datasheet units.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import units
from .errors import InvalidParameterError

__all__ = [
    "Constellation",
    "FiberSpan",
    "ChannelConfig",
    "Amplifier",
    "Route",
]


def _check_finite(obj, *names):
    for name in names:
        value = getattr(obj, name)
        if not math.isfinite(value):
            raise InvalidParameterError(f"{type(obj).__name__}.{name} must be finite, got {value!r}")


class Constellation(str, enum.Enum):
    QPSK = "QPSK"
    QAM16 = "16QAM"
    # circular complex Gaussian symbols; the signal model the analytic coherence law assumes
    GAUSSIAN = "GAUSSIAN"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().upper()
        for member in cls:
            if member.value == key or member.name == key:
                return member
        raise InvalidParameterError(
            f"unknown constellation {text!r}; expected one of {[m.value for m in cls]}"
        )


@dataclass(frozen=True)
class FiberSpan:
    """One fiber span.

    Attributes
    ----------
    length : float
        Span length in m.
    dispersion : float
        Dispersion parameter D in s/m**2.
    attenuation : float
        Power attenuation coefficient in 1/m (natural-log units).
    gamma_nl : float
        Kerr coefficient in 1/(W m). Only the split-step oracle uses it.
    label : str
        Span type name.
    reference_wavelength : float
        Wavelength in m at which ``dispersion`` is converted to beta2.
    """

    length: float
    dispersion: float
    attenuation: float = 0.0
    gamma_nl: float = 0.0
    label: str = ""
    reference_wavelength: float = units.REFERENCE_WAVELENGTH

    def __post_init__(self):
        _check_finite(self, "length", "dispersion", "attenuation", "gamma_nl", "reference_wavelength")
        if self.length <= 0:
            raise InvalidParameterError(f"span length must be positive, got {self.length!r}")
        if self.attenuation < 0:
            raise InvalidParameterError(f"attenuation must be >= 0, got {self.attenuation!r}")
        if self.gamma_nl < 0:
            raise InvalidParameterError(f"gamma_nl must be >= 0, got {self.gamma_nl!r}")
        if self.reference_wavelength <= 0:
            raise InvalidParameterError("reference wavelength must be positive")

    @classmethod
    def from_engineering(
        cls,
        length_km,
        dispersion_ps_nm_km,
        attenuation_db_km=0.0,
        gamma_per_w_km=0.0,
        label="",
        wavelength_nm=1550.0,
    ):
        return cls(
            length=float(length_km) * 1e3,
            dispersion=units.ps_nm_km_to_si(dispersion_ps_nm_km),
            attenuation=units.db_per_km_to_neper_per_m(attenuation_db_km),
            gamma_nl=float(gamma_per_w_km) * 1e-3,
            label=label,
            reference_wavelength=float(wavelength_nm) * 1e-9,
        )

    @property
    def beta2(self):
        """Signed beta2 in s**2/m at the reference wavelength."""
        return units.beta2_from_D(self.dispersion, self.reference_wavelength)

    @property
    def beta2_abs(self):
        return abs(self.beta2)

    @property
    def loss(self):
        """Span power loss as a linear ratio (>= 1)."""
        return math.exp(self.attenuation * self.length)

    @property
    def effective_length(self):
        if self.attenuation == 0:
            return self.length
        return -math.expm1(-self.attenuation * self.length) / self.attenuation

    def at_wavelength(self, wavelength):
        return replace(self, reference_wavelength=float(wavelength))


@dataclass(frozen=True)
class ChannelConfig:
    """The lightpath under test.

    ``carrier_frequency`` defaults to the frequency of 1550 nm.
    """

    symbol_rate: float
    launch_power: float = 1e-3
    carrier_frequency: float = units.frequency_from_wavelength(units.REFERENCE_WAVELENGTH)
    constellation: Constellation = Constellation.GAUSSIAN
    roll_off: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "constellation", Constellation.parse(self.constellation))
        _check_finite(self, "symbol_rate", "launch_power", "carrier_frequency", "roll_off")
        if self.symbol_rate <= 0:
            raise InvalidParameterError(f"symbol rate must be positive, got {self.symbol_rate!r}")
        if self.launch_power <= 0:
            raise InvalidParameterError(f"launch power must be positive, got {self.launch_power!r}")
        if self.carrier_frequency <= 0:
            raise InvalidParameterError("carrier frequency must be positive")
        if not 0.0 <= self.roll_off <= 1.0:
            raise InvalidParameterError(f"roll-off must lie in [0, 1], got {self.roll_off!r}")

    @classmethod
    def from_engineering(
        cls,
        symbol_rate_ghz,
        launch_power_dbm=0.0,
        carrier_frequency_thz=None,
        constellation=Constellation.GAUSSIAN,
        roll_off=0.1,
    ):
        kwargs = {}
        if carrier_frequency_thz is not None:
            kwargs["carrier_frequency"] = float(carrier_frequency_thz) * 1e12
        return cls(
            symbol_rate=float(symbol_rate_ghz) * 1e9,
            launch_power=units.dbm_to_watt(launch_power_dbm),
            constellation=constellation,
            roll_off=roll_off,
            **kwargs,
        )

    @property
    def wavelength(self):
        return units.wavelength_from_frequency(self.carrier_frequency)


@dataclass(frozen=True)
class Amplifier:
    """Lumped amplifier. ``gain`` and ``noise_figure`` are linear ratios."""

    gain: float
    noise_figure: float = 1.0
    reference_bandwidth: float | None = None

    def __post_init__(self):
        _check_finite(self, "gain", "noise_figure")
        if self.gain < 1:
            raise InvalidParameterError(f"amplifier gain must be >= 1, got {self.gain!r}")
        if self.noise_figure < 1:
            raise InvalidParameterError(f"noise figure must be >= 1, got {self.noise_figure!r}")
        if self.reference_bandwidth is not None and not self.reference_bandwidth > 0:
            raise InvalidParameterError("reference bandwidth must be positive")

    @classmethod
    def from_engineering(cls, gain_db, noise_figure_db=0.0, reference_bandwidth_ghz=None):
        bw = None if reference_bandwidth_ghz is None else float(reference_bandwidth_ghz) * 1e9
        return cls(units.db_to_linear(gain_db), units.db_to_linear(noise_figure_db), bw)

    @classmethod
    def compensating(cls, span, noise_figure=1.0, reference_bandwidth=None):
        """Amplifier whose gain exactly restores the loss of ``span``."""
        return cls(span.loss, noise_figure, reference_bandwidth)


@dataclass(frozen=True)
class Route:
    """Ordered spans, each followed by its amplifier, carrying one channel."""

    spans: tuple[FiberSpan, ...]
    amplifiers: tuple[Amplifier, ...]
    channel: ChannelConfig
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        object.__setattr__(self, "amplifiers", tuple(self.amplifiers))
        if not self.spans:
            raise InvalidParameterError("a route needs at least one span")
        if len(self.spans) != len(self.amplifiers):
            raise InvalidParameterError(
                f"{len(self.spans)} spans but {len(self.amplifiers)} amplifiers"
            )

    @classmethod
    def periodic(cls, span: FiberSpan, n_spans: int, channel: ChannelConfig, amplifier: Amplifier | None = None):
        if n_spans < 1:
            raise InvalidParameterError("a route needs at least one span")
        if amplifier is None:
            amplifier = Amplifier.compensating(span)
        return cls((span,) * n_spans, (amplifier,) * n_spans, channel)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[FiberSpan, Amplifier]], channel: ChannelConfig):
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), channel)

    def __len__(self):
        return len(self.spans)

    def __iter__(self):
        return iter(zip(self.spans, self.amplifiers))

    @property
    def is_periodic(self):
        """True when every span and every amplifier is field-wise identical."""
        first_span, first_amp = self.spans[0], self.amplifiers[0]
        return all(s == first_span for s in self.spans) and all(a == first_amp for a in self.amplifiers)

    def with_channel(self, channel):
        return replace(self, channel=channel)

