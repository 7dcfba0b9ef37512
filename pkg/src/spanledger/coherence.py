"""Coherent accumulation of single-channel SPM across identical spans.

For a periodic line of spans with dispersive scale ``theta = pi Rs^2 |beta2| Ls``
the SPM generated in span ``k`` is correlated with the SPM of span ``k + j`` by

    rho_j = (6/5) (2 / sqrt(theta)) * C(sqrt(j theta)) / j**1.5

with ``C`` the Fresnel cosine integral. From these, for an ``n``-span line:

* ``coherent_coefficient(n)``  C(n)  = sum_{k<n} (n - k) rho_k, the excess of the
  total SPM power over ``n`` independent spans, in units of one span's SPM;
* ``per_span_increment(n)``    dC(n) = C(n) - C(n-1) = sum_{k<n} rho_k, the
  coherent excess generated by span ``n`` alone;
* ``asymptotic_coefficient``   C_inf = lim dC(n) = sum_k rho_k, the per-span
  excess of an infinitely long line, used as the local conservative estimate.

C(n) grows without bound while dC(n) converges, so both are exposed.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from .core import ChannelConfig, FiberSpan
from .errors import ConvergenceBudgetError, DomainError

__all__ = [
    "FRESNEL_C_MAX",
    "CINF_MODES",
    "AsymptoticCoefficient",
    "CoherenceProfile",
    "SweepPoint",
    "fresnel_c",
    "theta",
    "theta_for",
    "rho",
    "rho_table",
    "coherent_coefficient",
    "per_span_increment",
    "asymptotic_coefficient",
    "equivalent_coefficient",
    "remainder_bound",
    "partial_sum_tail_bound",
    "build_profile",
    "build_profile_for_theta",
    "theta_sweep",
]

DEFAULT_MAX_TERMS = 10**8
CINF_MODES = ("series_limit", "at_n")


def fresnel_c(xi):
    """Fresnel cosine integral ``int_0^xi cos(pi x^2 / 2) dx``.

    Accepts a scalar or an array of non-negative finite values.
    """
    arr = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("fresnel_c requires finite arguments")
    if np.any(arr < 0):
        raise DomainError("fresnel_c is only defined here for xi >= 0")
    value = special.fresnel(arr)[1]
    if np.ndim(value) == 0:
        return float(value)
    return value


# global maximum of C on [0, inf): attained at the first stationary point xi = 1
FRESNEL_C_MAX = fresnel_c(1.0)


def theta(symbol_rate, beta2_abs, span_length):
    """Dimensionless accumulation scale ``pi * Rs**2 * |beta2| * Ls``.

    Parameters
    ----------
    symbol_rate : float
        Symbol rate in Hz.
    beta2_abs : float
        Magnitude of the group-velocity dispersion in s**2/m.
    span_length : float
        Span length in m.
    """
    for name, value in (("symbol rate", symbol_rate), ("|beta2|", beta2_abs), ("span length", span_length)):
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"theta needs a positive {name}, got {value!r}")
    return math.pi * symbol_rate**2 * beta2_abs * span_length


def theta_for(span: FiberSpan, channel: ChannelConfig):
    if span.beta2_abs == 0:
        raise DomainError(
            f"span {span.label or '?'} has zero dispersion; the coherence law needs "
            "dispersive decorrelation (theta > 0)"
        )
    return theta(channel.symbol_rate, span.beta2_abs, span.length)


def _check_theta(t):
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"theta must be positive and finite, got {t!r}")


def _amplitude(t):
    return 1.2 * 2.0 / math.sqrt(t)


@functools.lru_cache(maxsize=256)
def _cached_rho(t, k_max):
    k = np.arange(1, k_max + 1, dtype=float)
    values = _amplitude(t) * special.fresnel(np.sqrt(k * t))[1] / k**1.5
    values.setflags(write=False)
    return values


def rho_table(theta_value, k_max):
    """Read-only array ``[rho_1, ..., rho_k_max]``."""
    _check_theta(theta_value)
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    return _cached_rho(float(theta_value), int(k_max))


def rho(k, theta_value):
    """Correlation between the SPM of two spans ``k`` positions apart."""
    if int(k) != k or k < 1:
        raise DomainError(f"rho needs an integer k >= 1, got {k!r}")
    _check_theta(theta_value)
    k = int(k)
    return _amplitude(theta_value) * fresnel_c(math.sqrt(k * theta_value)) / k**1.5


def _check_n(n, minimum):
    if int(n) != n or n < minimum:
        raise DomainError(f"n must be an integer >= {minimum}, got {n!r}")
    return int(n)


def coherent_coefficient(n, theta_value):
    """Cumulative coherent excess C(n) of an ``n``-span periodic line."""
    n = _check_n(n, 1)
    _check_theta(theta_value)
    r = rho_table(theta_value, n - 1)
    return math.fsum((n - k) * r[k - 1] for k in range(1, n))


def per_span_increment(n, theta_value):
    """Coherent excess generated by span ``n``: ``C(n) - C(n-1)``."""
    n = _check_n(n, 2)
    _check_theta(theta_value)
    return math.fsum(rho_table(theta_value, n - 1))


def remainder_bound(theta_value, k):
    """Bound on ``|sum_{j>k} rho_j - (A/2) zeta(3/2, k+1)|`` with ``A = 2.4/sqrt(theta)``.

    Writing ``C(x) = 1/2 + f(x) sin(pi x^2/2) - g(x) cos(pi x^2/2)`` with the
    auxiliary functions bounded by ``0 < f <= 1/(pi x)`` and
    ``0 < g <= 1/(pi^2 x^3)``, each term beyond ``k`` deviates from its
    ``1/2`` limit by at most ``A (1/(pi sqrt(theta) j^2) + 1/(pi^2 theta^1.5 j^3))``.
    Summing with ``sum_{j>k} j^-p <= k^(1-p)/(p-1)`` gives the bound.
    """
    _check_theta(theta_value)
    if k < 1:
        raise DomainError("k must be >= 1")
    amp = _amplitude(theta_value)
    return amp * (
        1.0 / (math.pi * math.sqrt(theta_value) * k)
        + 1.0 / (2.0 * math.pi**2 * theta_value**1.5 * k**2)
    )


def _terms_for(theta_value, tolerance):
    # bound(k) <= amp/(pi sqrt(theta) k) * (1 + 1/(2 pi theta k)); solve the leading term, then walk up
    amp = _amplitude(theta_value)
    k = max(1, math.ceil(amp / (math.pi * math.sqrt(theta_value) * tolerance)))
    while remainder_bound(theta_value, k) > tolerance:
        k = math.ceil(k * 1.01) + 1
    return k


def partial_sum_tail_bound(theta_value, k):
    """Bound on the plain remainder ``sum_{j>k} rho_j`` from ``C <= C_max``."""
    _check_theta(theta_value)
    return _amplitude(theta_value) * FRESNEL_C_MAX * 2.0 / math.sqrt(k)


class AsymptoticCoefficient(NamedTuple):
    c_inf: float
    tail_bound: float
    terms_used: int


def _series_estimate(theta_value, k):
    head = float(np.sum(rho_table(theta_value, k))) if k <= 100_000 else _chunked_sum(theta_value, k)
    return head + 0.5 * _amplitude(theta_value) * float(special.zeta(1.5, k + 1))


def _chunked_sum(theta_value, k, chunk=2_000_000):
    amp = _amplitude(theta_value)
    total = 0.0
    for start in range(1, k + 1, chunk):
        j = np.arange(start, min(start + chunk, k + 1), dtype=float)
        total += float(np.sum(amp * special.fresnel(np.sqrt(j * theta_value))[1] / j**1.5))
    return total


def asymptotic_coefficient(theta_value, tolerance=1e-6, max_terms=DEFAULT_MAX_TERMS):
    """Limit of the per-span increment, ``sum_{k>=1} rho_k``.

    The first ``K`` terms are summed directly. Beyond ``K`` the Fresnel integral
    is replaced by its limit 1/2, whose sum is a Hurwitz zeta value; what is
    left is bounded by :func:`remainder_bound`. ``K`` is the smallest count
    for which that bound is within ``tolerance``.

    Returns
    -------
    AsymptoticCoefficient
        ``(c_inf, tail_bound, terms_used)``, with ``|c_inf - true| <= tail_bound``.

    Raises
    ------
    ConvergenceBudgetError
        If the tolerance needs more than ``max_terms`` terms.
    """
    _check_theta(theta_value)
    if not (math.isfinite(tolerance) and tolerance > 0):
        raise DomainError(f"tolerance must be positive, got {tolerance!r}")
    k = _terms_for(theta_value, tolerance)
    if k > max_terms:
        raise ConvergenceBudgetError(
            f"tolerance {tolerance:g} at theta={theta_value:g} needs {k} terms (cap {max_terms})"
        )
    return AsymptoticCoefficient(_series_estimate(theta_value, k), remainder_bound(theta_value, k), k)


@dataclass(frozen=True)
class CoherenceProfile:
    """Tabulated coherence coefficients for one span type.

    ``rho[i]`` is rho_{i+1}, ``c_n[i]`` is C(i+1) and ``delta_c[i]`` is dC(i+2),
    so ``delta_c`` is empty when ``n_max == 1``.
    """

    theta: float
    rho: np.ndarray
    c_n: np.ndarray
    delta_c: np.ndarray
    c_inf: float
    c_inf_tail_bound: float
    terms_used: int
    cinf_mode: str = "series_limit"

    @property
    def n_max(self):
        return len(self.c_n)


def _profile_arrays(t, n_max):
    r = np.array(rho_table(t, n_max))
    delta = np.concatenate(([0.0], np.cumsum(r[: n_max - 1])))
    c_n = np.cumsum(delta)
    for arr in (r, c_n, delta):
        arr.setflags(write=False)
    return r, c_n, delta[1:]


def equivalent_coefficient(t, tolerance=1e-6, cinf_mode="series_limit", cinf_n=20, max_terms=DEFAULT_MAX_TERMS):
    """C_inf by the configured rule: the series limit, or dC at a fixed span count."""
    if cinf_mode == "series_limit":
        return asymptotic_coefficient(t, tolerance, max_terms)
    if cinf_mode == "at_n":
        n = _check_n(cinf_n, 2)
        return AsymptoticCoefficient(
            per_span_increment(n, t),
            # gap to the series limit, plain positive-term remainder
            partial_sum_tail_bound(t, n - 1),
            n - 1,
        )
    raise DomainError(f"unknown cinf_mode {cinf_mode!r}; expected one of {CINF_MODES}")


def build_profile_for_theta(
    theta_value, n_max, tolerance=1e-6, cinf_mode="series_limit", cinf_n=20, max_terms=DEFAULT_MAX_TERMS
):
    _check_theta(theta_value)
    n_max = _check_n(n_max, 1)
    r, c_n, delta = _profile_arrays(float(theta_value), n_max)
    c_inf, bound, used = equivalent_coefficient(float(theta_value), tolerance, cinf_mode, cinf_n, max_terms)
    return CoherenceProfile(float(theta_value), r, c_n, delta, c_inf, bound, used, cinf_mode)


def build_profile(
    span: FiberSpan,
    channel: ChannelConfig,
    n_max: int,
    tolerance=1e-6,
    cinf_mode="series_limit",
    cinf_n=20,
    max_terms=DEFAULT_MAX_TERMS,
):
    """Tabulate rho, C(n), dC(n) and C_inf for a span type carrying ``channel``."""
    return build_profile_for_theta(theta_for(span, channel), n_max, tolerance, cinf_mode, cinf_n, max_terms)


class SweepPoint(NamedTuple):
    theta: float
    c_at_n: float
    delta_c_at_n: float
    c_inf: float


def sweep_point(theta_value, n=20, tolerance=1e-6):
    return SweepPoint(
        float(theta_value),
        coherent_coefficient(n, theta_value),
        per_span_increment(n, theta_value),
        asymptotic_coefficient(theta_value, tolerance).c_inf,
    )


def theta_sweep(thetas: Sequence[float], n=20, tolerance=1e-6, executor=None):
    """C(n), dC(n) and C_inf for each theta; ``executor`` may fan the points out."""
    if executor is None:
        return [sweep_point(t, n, tolerance) for t in thetas]
    return list(executor.map(lambda t: sweep_point(t, n, tolerance), thetas))
