"""Table builders behind each CLI subcommand."""
from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from .. import coherence, qot, units
from ..core import ChannelConfig, FiberSpan, Route
from ..errors import DomainError, InvalidParameterError, ModeUnsupportedError
from ..ssfm import calibrate_single_span_spm, run_averaged
from .config import ScenarioConfig
from .output import Table

__all__ = [
    "max_threads",
    "estimate_tables",
    "coherence_table",
    "sweep_table",
    "parse_sweep",
    "theta_from_span_params",
    "validation_table",
    "calibration",
]

ESTIMATE_COLUMNS = ["span_index", "p_ase_w", "p_xpm_w", "p_spm_w", "coh_spm_w", "p_dist_w", "gsnr_db", "snr_spm_db"]
COHERENCE_COLUMNS = ["n", "c_n", "delta_c_n", "rho_n"]
VALIDATE_COLUMNS = [
    "n",
    "snr_sim_db",
    "snr_incoherent_db",
    "snr_coherent_db",
    "snr_equivalent_db",
    "delta_snr_sim_db",
    "delta_snr_model_db",
    "c_hat_n",
    "c_model_n",
]


def max_threads():
    """Worker cap from ``SPANLEDGER_THREADS`` (default: CPU count)."""
    raw = os.environ.get("SPANLEDGER_THREADS")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise InvalidParameterError(f"SPANLEDGER_THREADS must be an integer, got {raw!r}") from None
        if value < 1:
            raise InvalidParameterError("SPANLEDGER_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


@contextmanager
def _executor(n_tasks):
    workers = min(max_threads(), n_tasks)
    if workers <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield pool


def _db(x):
    if x == 0:
        return -math.inf
    return units.linear_to_db(x)


def estimate_tables(cfg: ScenarioConfig, modes=None):
    """One per-span ledger table for each requested accumulation mode."""
    tables = []
    for mode in modes or cfg.model.modes:
        led = qot.ledger(
            cfg.route,
            cfg.spm_w,
            cfg.xpm_w,
            mode,
            tolerance=cfg.model.tolerance,
            cinf_mode=cfg.model.cinf_mode,
            cinf_n=cfg.model.cinf_n,
            reference_bandwidth=cfg.reference_bandwidth,
        )
        rows = [
            (
                e.span_index,
                e.p_ase,
                e.p_xpm,
                e.p_spm_local,
                e.p_spm_coherent_correction,
                e.p_dist_total,
                e.gsnr_db,
                e.snr_spm_db,
            )
            for e in led
        ]
        meta = {
            "command": "estimate",
            "mode": led.mode.value,
            "launch_power_w": led.launch_power,
            "spans": len(led),
        }
        tables.append(Table(f"estimate_{led.mode.value}", "estimate", list(ESTIMATE_COLUMNS), rows, meta))
    return tables


_SPAN_PARAM_KEYS = {"length_km", "dispersion_ps_nm_km", "symbol_rate_ghz", "wavelength_nm"}


def theta_from_span_params(text):
    """``"length_km=80,dispersion_ps_nm_km=16.7,symbol_rate_ghz=32"`` -> theta."""
    params = {}
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _SPAN_PARAM_KEYS:
            raise InvalidParameterError(
                f"bad span parameter {item.strip()!r}; expected KEY=VALUE with KEY in {sorted(_SPAN_PARAM_KEYS)}"
            )
        try:
            params[key] = float(value)
        except ValueError:
            raise InvalidParameterError(f"span parameter {key} is not a number: {value!r}") from None
    missing = {"length_km", "dispersion_ps_nm_km", "symbol_rate_ghz"} - params.keys()
    if missing:
        raise InvalidParameterError(f"missing span parameters: {', '.join(sorted(missing))}")
    span = FiberSpan.from_engineering(
        params["length_km"], params["dispersion_ps_nm_km"], wavelength_nm=params.get("wavelength_nm", 1550.0)
    )
    channel = ChannelConfig(symbol_rate=params["symbol_rate_ghz"] * 1e9)
    return coherence.theta_for(span, channel)


def coherence_table(theta_value, n_max=20, tolerance=1e-6, cinf_mode="series_limit", cinf_n=20):
    profile = coherence.build_profile_for_theta(theta_value, n_max, tolerance, cinf_mode, cinf_n)
    rows = []
    for i in range(profile.n_max):
        delta = profile.delta_c[i - 1] if i > 0 else 0.0
        rows.append((i + 1, profile.c_n[i], delta, profile.rho[i]))
    meta = {"command": "coherence", "theta": profile.theta, "cinf_mode": cinf_mode}
    footer = {"c_inf": profile.c_inf, "tail_bound": profile.c_inf_tail_bound, "terms_used": profile.terms_used}
    return Table("coherence", "coherence", list(COHERENCE_COLUMNS), rows, meta, footer)


_SWEEP = re.compile(r"^\s*([^:]+):([^:]+):(log|lin)(\d+)\s*$")


def parse_sweep(text):
    """``"0.5:10:log25"`` -> 25 log-spaced values from 0.5 to 10."""
    m = _SWEEP.match(text)
    if not m:
        raise InvalidParameterError(f"bad sweep {text!r}; expected START:STOP:logN or START:STOP:linN")
    try:
        start, stop = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise InvalidParameterError(f"bad sweep bounds in {text!r}") from None
    count = int(m.group(4))
    if count < 1:
        raise InvalidParameterError("sweep needs at least one point")
    if start <= 0 or stop <= 0:
        raise DomainError("theta must be positive")
    if m.group(3) == "log":
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def sweep_table(thetas, n=20, tolerance=1e-6):
    with _executor(len(thetas)) as pool:
        points = coherence.theta_sweep(thetas, n, tolerance, executor=pool)
    columns = ["theta", f"c_at_n{n}", f"delta_c_at_n{n}", "c_inf"]
    rows = [tuple(p) for p in points]
    return Table("coherence_sweep", "coherence_sweep", columns, rows, {"command": "coherence", "n": n})


def validation_table(cfg: ScenarioConfig, seeds=None):
    """Simulated SNR_SPM against the three accumulation models.

    Model curves are anchored on the simulated single-span noise N(1).
    """
    route = cfg.route
    if not route.is_periodic:
        raise ModeUnsupportedError("validate needs a periodic route of identical spans")
    n_seeds = cfg.simulation.seeds if seeds is None else seeds
    seed_list = [cfg.simulation.seed + i for i in range(n_seeds)]
    sim_config = cfg.sim_config()
    with _executor(len(seed_list)) as pool:
        run = run_averaged(sim_config, seed_list, executor=pool)

    span = route.spans[0]
    n_spans = len(route)
    profile = coherence.build_profile(
        span, route.channel, n_spans, cfg.model.tolerance, cfg.model.cinf_mode, cfg.model.cinf_n
    )
    p_ch = route.channel.launch_power
    # the model's single-span SPM scales with gamma^2: none without Kerr effect
    n1 = float(run.noise_power[0]) if span.gamma_nl > 0 else 0.0
    n = np.arange(1, n_spans + 1)
    models = {
        "incoherent": n1 * n,
        "coherent": n1 * (n + profile.c_n),
        "equivalent": n1 * n * (1.0 + profile.c_inf),
    }
    snr_model = {k: [_db(p_ch / v) if v > 0 else math.inf for v in vals] for k, vals in models.items()}
    coherent = snr_model["coherent"]
    rows = []
    for i in range(n_spans):
        if i == 0 or not math.isfinite(coherent[i]):
            delta_model = math.nan
        else:
            delta_model = coherent[i - 1] - coherent[i]
        c_hat = run.extracted_c[i] if n1 > 0 else math.nan
        rows.append(
            (
                i + 1,
                run.snr_per_span[i],
                snr_model["incoherent"][i],
                snr_model["coherent"][i],
                snr_model["equivalent"][i],
                run.delta_snr_per_span[i],
                delta_model,
                c_hat,
                profile.c_n[i],
            )
        )
    meta = {
        "command": "validate",
        "theta": profile.theta,
        "c_inf": profile.c_inf,
        "seeds": ",".join(str(s) for s in seed_list),
        "n_symbols": sim_config.n_symbols,
        "samples_per_symbol": sim_config.samples_per_symbol,
        "launch_power_w": p_ch,
        "constellation": route.channel.constellation.value,
    }
    if run.nonperturbative:
        meta["nonperturbative_spans"] = ",".join(str(s) for s in run.nonperturbative)
    return Table("validate", "validate", list(VALIDATE_COLUMNS), rows, meta), run


def calibration(cfg: ScenarioConfig, step_db=1.0):
    """Single-span SPM of every span type on the route.

    Returns the result table and an INI snippet for the ``[route]`` section.
    """
    rows = []
    snippet = [
        f"# spanledger calibrate: launch_power_dbm={format(units.watt_to_dbm(cfg.channel.launch_power), '.9g')}",
        "[route]",
    ]
    seen = []
    for label, span, amp in zip(cfg.route_labels, cfg.route.spans, cfg.route.amplifiers):
        if label in seen:
            continue
        seen.append(label)
        sim = cfg.sim_config(route=Route((span,), (amp,), cfg.channel))
        cal = calibrate_single_span_spm(sim, step_db)
        rows.append((label, cal.p_spm, cal.eta, cal.scaling_db))
        snippet.append(f"p_spm_w.{label} = {cal.p_spm:.8e}")
    meta = {"command": "calibrate", "launch_power_w": cfg.channel.launch_power, "step_db": step_db}
    table = Table("calibrate", "calibrate", ["span_type", "p_spm_w", "eta_per_w2", "scaling_db"], rows, meta)
    return table, "\n".join(snippet) + "\n"
