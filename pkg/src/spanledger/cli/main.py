"""``spanledger`` command line entry point.

Exit codes: 0 success, 2 configuration or usage error, 3 domain or model
error, 4 nonperturbative spans flagged under ``--strict``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import __version__, units
from ..errors import (
    ConfigError,
    ConvergenceBudgetError,
    DomainError,
    InvalidParameterError,
    ModeUnsupportedError,
    NonPerturbativeError,
)
from ..qot import Mode
from . import commands
from .config import load_config
from .output import render_csv, table_to_json, write_atomic, write_table

logger = logging.getLogger("spanledger")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_NONPERTURBATIVE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage already; keep that but route through main
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _common(p):
    p.add_argument("--out", type=Path, help="output directory (default: stdout)")
    p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    p.add_argument("--figures", action="store_true", help="also write PNG figures (needs --out)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser():
    parser = _Parser(prog="spanledger", description="Span-by-span QoT ledger with coherent SPM accumulation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="per-span GSNR ledger from a scenario file")
    p.add_argument("config", type=Path)
    p.add_argument("--mode", choices=[m.value for m in Mode] + ["all"], help="override [model] mode")
    _common(p)

    p = sub.add_parser("coherence", help="coherence coefficients for one theta or a theta sweep")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--theta", type=float)
    src.add_argument("--span-params", metavar="K=V,...", help="e.g. length_km=80,dispersion_ps_nm_km=16.7,symbol_rate_ghz=32")
    src.add_argument("--sweep-theta", metavar="START:STOP:logN")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--n", type=int, default=20, help="span count reported by --sweep-theta")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--cinf-mode", choices=["series_limit", "at_n"], default="series_limit")
    p.add_argument("--cinf-n", type=int, default=20)
    _common(p)

    p = sub.add_parser("validate", help="compare the models against split-step simulation")
    p.add_argument("config", type=Path)
    p.add_argument("--seeds", type=int, help="number of seeds to average")
    p.add_argument("--gamma", type=float, metavar="1/W/km", help="override every span's gamma")
    p.add_argument("--strict", action="store_true", help="exit 4 when spans leave the perturbative regime")
    _common(p)

    p = sub.add_parser("calibrate", help="simulate single-span SPM power for the [route] section")
    p.add_argument("config", type=Path)
    p.add_argument("--step-db", type=float, default=1.0)
    p.add_argument("--snippet", type=Path, help="write the [route] snippet here (default: with the tables)")
    _common(p)
    return parser


def _emit(tables, args, out_dir, stdout):
    """Write tables to ``out_dir`` or print them."""
    fmt = ("json",) if args.json else ("csv",)
    if out_dir is not None:
        paths = []
        for t in tables:
            paths.extend(write_table(t, out_dir, fmt))
        return paths
    if args.json:
        doc = table_to_json(tables[0]) if len(tables) == 1 else {"tables": [table_to_json(t) for t in tables]}
        stdout.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    else:
        stdout.write("\n".join(render_csv(t) for t in tables))
    return []


def _figures(args, out_dir, draw):
    if not args.figures:
        return
    if out_dir is None:
        logger.warning("--figures needs an output directory; skipped")
        return
    from .. import plotting

    out_dir.mkdir(parents=True, exist_ok=True)
    path = draw(plotting, out_dir)
    logger.info("figure written to %s", path)


def _output_dir(args, cfg=None):
    if args.out is not None:
        return args.out
    if cfg is not None:
        return cfg.output.directory
    return None


def _summary(tables, stream):
    for t in tables:
        last = t.rows[-1]
        gsnr = t.column("gsnr_db")[-1]
        print(
            f"{t.meta['mode']:>11}: {last[0]} spans, final GSNR {gsnr:.2f} dB, "
            f"SNR_SPM {t.column('snr_spm_db')[-1]:.2f} dB",
            file=stream,
        )


def cmd_estimate(args, stdout, stderr):
    cfg = load_config(args.config)
    modes = None
    if args.mode == "all":
        modes = tuple(Mode)
    elif args.mode:
        modes = (Mode.parse(args.mode),)
    tables = commands.estimate_tables(cfg, modes)
    out_dir = _output_dir(args, cfg)
    _emit(tables, args, out_dir, stdout)
    # keep stdout machine-readable when it carries the tables
    _summary(tables, stdout if out_dir is not None else stderr)
    _figures(args, out_dir, lambda plt, d: plt.plot_estimate(tables, d / "estimate.png"))
    return EXIT_OK


def cmd_coherence(args, stdout, stderr):
    if args.n_max < 1 or args.n < 1:
        raise InvalidParameterError("--n-max and --n must be >= 1")
    out_dir = _output_dir(args)
    if args.sweep_theta:
        table = commands.sweep_table(commands.parse_sweep(args.sweep_theta), args.n, args.tolerance)
        _emit([table], args, out_dir, stdout)
        _figures(args, out_dir, lambda plt, d: plt.plot_sweep(table, args.n, d / "coherence_sweep.png"))
        return EXIT_OK
    if args.theta is not None:
        theta_value = args.theta
    else:
        theta_value = commands.theta_from_span_params(args.span_params)
    table = commands.coherence_table(theta_value, args.n_max, args.tolerance, args.cinf_mode, args.cinf_n)
    _emit([table], args, out_dir, stdout)
    _figures(args, out_dir, lambda plt, d: plt.plot_profile(table, d / "coherence.png"))
    return EXIT_OK


def cmd_validate(args, stdout, stderr):
    cfg = load_config(args.config)
    if args.gamma is not None:
        cfg = cfg.with_gamma(args.gamma)
    if args.seeds is not None and args.seeds < 1:
        raise InvalidParameterError("--seeds must be >= 1")
    table, run = commands.validation_table(cfg, args.seeds)
    out_dir = _output_dir(args, cfg)
    _emit([table], args, out_dir, stdout)
    _figures(args, out_dir, lambda plt, d: plt.plot_validation(table, d / "validate.png"))
    if run.nonperturbative:
        print(f"warning: SNR below 0 dB after spans {list(run.nonperturbative)}", file=stderr)
        if args.strict:
            return EXIT_NONPERTURBATIVE
    return EXIT_OK


def cmd_calibrate(args, stdout, stderr):
    cfg = load_config(args.config)
    table, snippet = commands.calibration(cfg, args.step_db)
    out_dir = _output_dir(args, cfg)
    _emit([table], args, out_dir, stdout)
    snippet_path = args.snippet
    if snippet_path is None and out_dir is not None:
        snippet_path = out_dir / "calibrate_route.ini"
    if snippet_path is not None:
        write_atomic(snippet_path, snippet)
    else:
        stderr.write(snippet)
    for row in table.rows:
        print(
            f"{row[0]}: P_SPM = {row[1]:.4e} W at {units.watt_to_dbm(cfg.channel.launch_power):g} dBm",
            file=stderr,
        )
    return EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "coherence": cmd_coherence,
    "validate": cmd_validate,
    "calibrate": cmd_calibrate,
}


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(stderr)
        print(exc, file=stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=stderr)

    try:
        return COMMANDS[args.command](args, stdout, stderr)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (DomainError, ModeUnsupportedError, ConvergenceBudgetError, NonPerturbativeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
