"""Unit conversions between engineering and SI quantities.

Everything inside the package is SI. The helpers here are the only places
where dB, km, ps/nm/km, GHz and dBm appear.
"""
import math

from scipy.constants import c as SPEED_OF_LIGHT, h as PLANCK

from .errors import DomainError, InvalidParameterError

REFERENCE_WAVELENGTH = 1550e-9  # m

__all__ = [
    "SPEED_OF_LIGHT",
    "PLANCK",
    "REFERENCE_WAVELENGTH",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watt",
    "watt_to_dbm",
    "beta2_from_D",
    "D_from_beta2",
    "db_per_km_to_neper_per_m",
    "neper_per_m_to_db_per_km",
    "ps_nm_km_to_si",
    "si_to_ps_nm_km",
    "wavelength_from_frequency",
    "frequency_from_wavelength",
]

_DB_PER_NEPER = 10.0 / math.log(10.0)


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


def db_to_linear(x):
    """Convert a power ratio in dB to a linear ratio."""
    return 10.0 ** (_finite("dB value", x) / 10.0)


def linear_to_db(x):
    """Convert a linear power ratio to dB. Requires ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"linear_to_db requires a positive ratio, got {x!r}")
    if math.isinf(x):
        return math.inf
    return 10.0 * math.log10(x)


def dbm_to_watt(p_dbm):
    return 1e-3 * db_to_linear(p_dbm)


def watt_to_dbm(p_w):
    return linear_to_db(p_w / 1e-3)


def beta2_from_D(D, wavelength=REFERENCE_WAVELENGTH):
    """Group-velocity dispersion from the dispersion parameter.

    Parameters
    ----------
    D : float
        Dispersion parameter in s/m**2 (1 ps/nm/km = 1e-6 s/m**2).
    wavelength : float
        Wavelength in m.

    Returns
    -------
    float
        beta2 in s**2/m, negative for anomalous dispersion (D > 0).
    """
    D = _finite("dispersion", D)
    wavelength = _finite("wavelength", wavelength)
    if wavelength <= 0:
        raise InvalidParameterError(f"wavelength must be positive, got {wavelength!r}")
    return -D * wavelength**2 / (2.0 * math.pi * SPEED_OF_LIGHT)


def D_from_beta2(beta2, wavelength=REFERENCE_WAVELENGTH):
    """Inverse of :func:`beta2_from_D`."""
    beta2 = _finite("beta2", beta2)
    wavelength = _finite("wavelength", wavelength)
    if wavelength <= 0:
        raise InvalidParameterError(f"wavelength must be positive, got {wavelength!r}")
    return -beta2 * 2.0 * math.pi * SPEED_OF_LIGHT / wavelength**2


def ps_nm_km_to_si(D):
    return _finite("dispersion", D) * 1e-6


def si_to_ps_nm_km(D):
    return _finite("dispersion", D) * 1e6


def db_per_km_to_neper_per_m(a_db_km):
    """Power attenuation in dB/km to the natural-log coefficient in 1/m."""
    return _finite("attenuation", a_db_km) / _DB_PER_NEPER / 1e3


def neper_per_m_to_db_per_km(alpha):
    return _finite("attenuation", alpha) * _DB_PER_NEPER * 1e3


def wavelength_from_frequency(f):
    f = _finite("frequency", f)
    if f <= 0:
        raise InvalidParameterError(f"frequency must be positive, got {f!r}")
    return SPEED_OF_LIGHT / f


def frequency_from_wavelength(wavelength):
    wavelength = _finite("wavelength", wavelength)
    if wavelength <= 0:
        raise InvalidParameterError(f"wavelength must be positive, got {wavelength!r}")
    return SPEED_OF_LIGHT / wavelength
