"""Per-span disturbance ledger and GSNR assembly.

Every span ``n`` of a route contributes a disturbance power

    P_dist(n) = P_ASE(n) + P_XPM(n) + P_SPM(n) + COH_SPM(n)

where the last term is the coherent cross-correlation of the SPM of span ``n``
with that of all earlier spans. Three accumulation modes set ``COH_SPM(n)``:

``incoherent``
    zero: every span's SPM adds in power.
``coherent``
    ``sum_{k<n} rho_{n-k} P_SPM(k)``, which for equal inputs is
    ``P_SPM * dC(n)``. Only defined for periodic routes.
``equivalent``
    ``C_inf(theta_n) * P_SPM(n)``, a purely local and conservative value.

The GSNR after ``n`` spans is ``P_ch / sum_{m<=n} P_dist(m)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from . import coherence
from .core import Amplifier, Route
from .errors import DomainError, InvalidParameterError, ModeUnsupportedError
from .units import PLANCK

__all__ = [
    "Mode",
    "LedgerEntry",
    "DisturbanceLedger",
    "GsnrBreakdown",
    "ase_power",
    "equivalent_spm",
    "ledger",
    "gsnr_decomposition",
]


class Mode(str, enum.Enum):
    INCOHERENT = "incoherent"
    COHERENT = "coherent"
    EQUIVALENT = "equivalent"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise InvalidParameterError(
                f"unknown accumulation mode {text!r}; expected one of {[m.value for m in cls]}"
            ) from None


def _db(x):
    if x == math.inf:
        return math.inf
    return 10.0 * math.log10(x)


def _ratio(signal, noise):
    return math.inf if noise == 0 else signal / noise


def ase_power(amp: Amplifier, reference_bandwidth, carrier_frequency):
    """ASE power ``h f NF (G - 1) B`` in W, single polarization."""
    if amp.gain < 1:
        raise DomainError(f"amplifier gain must be >= 1, got {amp.gain!r}")
    if not reference_bandwidth > 0:
        raise InvalidParameterError("reference bandwidth must be positive")
    return PLANCK * carrier_frequency * amp.noise_figure * (amp.gain - 1.0) * reference_bandwidth


def equivalent_spm(p_spm_local, c_inf):
    """Local SPM power inflated to cover coherent accumulation: ``P (1 + C_inf)``."""
    if p_spm_local < 0 or c_inf < 0:
        raise DomainError("equivalent_spm needs non-negative power and coefficient")
    return p_spm_local * (1.0 + c_inf)


@dataclass(frozen=True)
class LedgerEntry:
    """Disturbances generated by one span and the running totals up to it.

    Powers are in W; ``gsnr`` and ``snr_spm`` are linear.
    """

    span_index: int
    p_ase: float
    p_xpm: float
    p_spm_local: float
    p_spm_coherent_correction: float
    p_dist_total: float
    cum_ase: float
    cum_xpm: float
    cum_spm: float
    cum_dist: float
    gsnr: float
    snr_spm: float

    @property
    def gsnr_db(self):
        return _db(self.gsnr)

    @property
    def snr_spm_db(self):
        return _db(self.snr_spm)


@dataclass(frozen=True)
class DisturbanceLedger:
    mode: Mode
    launch_power: float
    entries: tuple[LedgerEntry, ...]
    c_inf: tuple[float, ...] = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def final(self):
        return self.entries[-1]


def _as_powers(name, values, n):
    values = [float(v) for v in values]
    if len(values) != n:
        raise InvalidParameterError(f"{name}: expected {n} per-span values, got {len(values)}")
    for v in values:
        if not (math.isfinite(v) and v >= 0):
            raise InvalidParameterError(f"{name}: powers must be finite and >= 0, got {v!r}")
    return values


def ledger(
    route: Route,
    spm_inputs: Sequence[float],
    xpm_inputs: Sequence[float] | None = None,
    mode=Mode.EQUIVALENT,
    *,
    tolerance=1e-6,
    cinf_mode="series_limit",
    cinf_n=20,
    reference_bandwidth=None,
):
    """Build the disturbance ledger of ``route``.

    Parameters
    ----------
    route : Route
        Spans, amplifiers and the channel under test.
    spm_inputs, xpm_inputs : sequence of float
        Locally generated SPM and XPM power of each span in W.
    mode : Mode or str
        SPM accumulation mode.
    tolerance, cinf_mode, cinf_n
        Passed to the asymptotic coefficient (equivalent mode only).
    reference_bandwidth : float, optional
        Noise bandwidth for ASE in Hz. Defaults to each amplifier's own
        reference bandwidth, then to the symbol rate.

    Raises
    ------
    ModeUnsupportedError
        Coherent mode on a route whose spans are not all identical.
    """
    mode = Mode.parse(mode)
    n = len(route)
    p_spm = _as_powers("spm_inputs", spm_inputs, n)
    p_xpm = _as_powers("xpm_inputs", [0.0] * n if xpm_inputs is None else xpm_inputs, n)
    channel = route.channel
    p_ch = channel.launch_power

    corrections = [0.0] * n
    c_inf = ()
    if mode is Mode.COHERENT:
        if not route.is_periodic:
            raise ModeUnsupportedError(
                "coherent accumulation is only defined for periodic routes of identical spans; "
                "use the equivalent mode, which is local to each span type"
            )
        if any(p > 0 for p in p_spm):
            rho = coherence.rho_table(coherence.theta_for(route.spans[0], channel), n)
            for i in range(n):
                # span i+1 correlates with span k+1 at separation i - k
                corrections[i] = math.fsum(rho[i - k - 1] * p_spm[k] for k in range(i))
    elif mode is Mode.EQUIVALENT:
        cache = {}
        values = []
        for span, p in zip(route.spans, p_spm):
            if p == 0:
                values.append(0.0)
                continue
            t = coherence.theta_for(span, channel)
            if t not in cache:
                cache[t] = coherence.equivalent_coefficient(t, tolerance, cinf_mode, cinf_n).c_inf
            values.append(cache[t])
        c_inf = tuple(values)
        corrections = [c * p for c, p in zip(c_inf, p_spm)]

    entries = []
    cum_ase = cum_xpm = cum_spm = cum_dist = 0.0
    for i, (amp, spm, xpm, corr) in enumerate(zip(route.amplifiers, p_spm, p_xpm, corrections)):
        bw = reference_bandwidth or amp.reference_bandwidth or channel.symbol_rate
        ase = ase_power(amp, bw, channel.carrier_frequency)
        total = ase + xpm + spm + corr
        cum_ase += ase
        cum_xpm += xpm
        cum_spm += spm + corr
        cum_dist += total
        entries.append(
            LedgerEntry(
                span_index=i + 1,
                p_ase=ase,
                p_xpm=xpm,
                p_spm_local=spm,
                p_spm_coherent_correction=corr,
                p_dist_total=total,
                cum_ase=cum_ase,
                cum_xpm=cum_xpm,
                cum_spm=cum_spm,
                cum_dist=cum_dist,
                gsnr=_ratio(p_ch, cum_dist),
                snr_spm=_ratio(p_ch, cum_spm),
            )
        )
    return DisturbanceLedger(mode, p_ch, tuple(entries), c_inf)


@dataclass(frozen=True)
class GsnrBreakdown:
    """Per-effect SNRs after one span, all linear."""

    span_index: int
    snr_ase: float
    snr_xpm: float
    snr_spm: float
    gsnr: float

    @property
    def inverse_sum(self):
        return sum(0.0 if s == math.inf else 1.0 / s for s in (self.snr_ase, self.snr_xpm, self.snr_spm))


def gsnr_decomposition(ledger_: DisturbanceLedger):
    """Split the GSNR of every span into ASE, XPM and SPM contributions.

    ``1/gsnr == 1/snr_ase + 1/snr_xpm + 1/snr_spm`` up to rounding.
    """
    p = ledger_.launch_power
    out = []
    for e in ledger_.entries:
        out.append(
            GsnrBreakdown(
                e.span_index,
                _ratio(p, e.cum_ase),
                _ratio(p, e.cum_xpm),
                _ratio(p, e.cum_spm),
                _ratio(p, e.cum_ase + e.cum_xpm + e.cum_spm),
            )
        )
    return out
