"""Scenario files: strict INI-style sections parsed into domain records.

Example::

    [channel]
    symbol_rate_ghz = 32
    launch_power_dbm = 0

    [span.smf]
    length_km = 80
    dispersion_ps_nm_km = 16.7
    attenuation_db_km = 0.2
    gamma_per_w_km = 1.27

    [route]
    spans = smf*20
    noise_figure_db = 5
    p_spm_w.smf = 3.2e-7

    [model]
    mode = equivalent

Unknown sections and keys are errors, reported with their line and column.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .. import units
from ..coherence import CINF_MODES
from ..core import Amplifier, ChannelConfig, Constellation, FiberSpan, Route
from ..errors import ConfigError, SpanLedgerError
from ..qot import Mode
from ..ssfm import AdaptiveStep, FixedStep, SimConfig

__all__ = [
    "ModelSettings",
    "SimulationSettings",
    "OutputSettings",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "parse_route_spec",
]

MODE_ALL = "all"
_REQUIRED = object()


@dataclass(frozen=True)
class ModelSettings:
    modes: tuple[Mode, ...] = (Mode.EQUIVALENT,)
    n_max: int = 20
    tolerance: float = 1e-6
    cinf_mode: str = "series_limit"
    cinf_n: int = 20


@dataclass(frozen=True)
class SimulationSettings:
    seed: int = 1
    seeds: int = 1
    n_symbols: int = 2**15
    samples_per_symbol: int = 16
    step_control: str = "adaptive"
    max_phase_rad: float = 1e-3
    step_km: float | None = None
    edge_symbols: int = 64

    def step(self):
        if self.step_control == "fixed":
            return FixedStep(self.step_km * 1e3)
        return AdaptiveStep(self.max_phase_rad)


@dataclass(frozen=True)
class OutputSettings:
    directory: Path | None = None
    formats: tuple[str, ...] = ("csv",)
    figures: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    channel: ChannelConfig
    span_types: dict
    route: Route
    route_labels: tuple[str, ...]
    spm_w: tuple[float, ...]
    xpm_w: tuple[float, ...]
    reference_bandwidth: float | None = None
    model: ModelSettings = field(default_factory=ModelSettings)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    source: Path | None = None

    def sim_config(self, route=None, seed=None):
        sim = self.simulation
        return SimConfig(
            route=self.route if route is None else route,
            seed=sim.seed if seed is None else seed,
            n_symbols=sim.n_symbols,
            samples_per_symbol=sim.samples_per_symbol,
            step_control=sim.step(),
            edge_symbols=sim.edge_symbols,
        )

    def with_gamma(self, gamma_per_w_km):
        """Copy with every span's Kerr coefficient replaced."""
        g = float(gamma_per_w_km) * 1e-3
        spans = tuple(replace(s, gamma_nl=g) for s in self.route.spans)
        types = {k: replace(v, gamma_nl=g) for k, v in self.span_types.items()}
        return replace(self, route=replace(self.route, spans=spans), span_types=types)


# ---------------------------------------------------------------- conversions


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError("must be an integer")
    return int(value)


def _bool(text):
    key = text.strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be true or false")


def _choice(*options):
    def convert(text):
        key = text.strip().lower()
        if key not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return key

    return convert


def _list(text):
    return tuple(item.strip() for item in text.split(",") if item.strip())


_ROUTE_ITEM = re.compile(r"^([A-Za-z_][\w\-]*)\s*(?:\*\s*(\d+))?$")


def parse_route_spec(text):
    """``"smf*10, leaf*2, smf"`` -> ``["smf"] * 10 + ["leaf"] * 2 + ["smf"]``."""
    labels = []
    for item in _list(text):
        m = _ROUTE_ITEM.match(item)
        if not m:
            raise ValueError(f"bad route item {item!r}; expected NAME or NAME*COUNT")
        count = int(m.group(2)) if m.group(2) else 1
        labels.extend([m.group(1)] * count)
    if not labels:
        raise ValueError("route is empty")
    return labels


SCHEMA = {
    "channel": {
        "symbol_rate_ghz": (_float, _REQUIRED),
        "launch_power_dbm": (_float, 0.0),
        "carrier_frequency_thz": (_float, None),
        "constellation": (lambda t: Constellation.parse(t), Constellation.GAUSSIAN),
        "roll_off": (_float, 0.1),
    },
    "span": {
        "length_km": (_float, _REQUIRED),
        "dispersion_ps_nm_km": (_float, _REQUIRED),
        "attenuation_db_km": (_float, _REQUIRED),
        "gamma_per_w_km": (_float, _REQUIRED),
    },
    "route": {
        "spans": (parse_route_spec, _REQUIRED),
        "noise_figure_db": (_float, 5.0),
        "gain_db": (_float, None),
        "reference_bandwidth_ghz": (_float, None),
    },
    "model": {
        "mode": (_choice(*(m.value for m in Mode), MODE_ALL), Mode.EQUIVALENT.value),
        "n_max": (_int, 20),
        "tolerance": (_float, 1e-6),
        "cinf_mode": (_choice(*CINF_MODES), "series_limit"),
        "cinf_n": (_int, 20),
    },
    "simulation": {
        "seed": (_int, 1),
        "seeds": (_int, 1),
        "n_symbols": (_int, 2**15),
        "samples_per_symbol": (_int, 16),
        "step_control": (_choice("adaptive", "fixed"), "adaptive"),
        "max_phase_rad": (_float, 1e-3),
        "step_km": (_float, None),
        "edge_symbols": (_int, 64),
    },
    "output": {
        "directory": (str, None),
        "formats": (_list, ("csv",)),
        "figures": (_bool, False),
    },
}

_PER_SPAN_KEYS = re.compile(r"^(p_spm_w|p_xpm_w)\.([A-Za-z_][\w\-]*)$")


class _Locator:
    """Finds the line and column of a section header or key in the raw text."""

    def __init__(self, text):
        self.lines = text.splitlines()

    def section(self, name):
        pattern = re.compile(r"^\s*\[\s*" + re.escape(name) + r"\s*\]")
        for i, line in enumerate(self.lines, start=1):
            if pattern.match(line):
                return i, line.index("[") + 1
        return None, None

    def key(self, section, key):
        start, _ = self.section(section)
        if start is None:
            return None, None
        pattern = re.compile(r"^(\s*)" + re.escape(key) + r"\s*[=:]")
        for i in range(start, len(self.lines)):
            line = self.lines[i]
            if line.lstrip().startswith("["):
                break
            m = pattern.match(line)
            if m:
                return i + 1, len(m.group(1)) + 1
        return start, 1


class _Reader:
    def __init__(self, parser, locator, path):
        self.parser = parser
        self.locate = locator
        self.path = path

    def error(self, message, section=None, key=None):
        if key is not None:
            line, col = self.locate.key(section, key)
        elif section is not None:
            line, col = self.locate.section(section)
        else:
            line = col = None
        return ConfigError(message, line, col, self.path)

    def section(self, name, schema, extra=None):
        """Convert every key of ``[name]`` against ``schema``.

        ``extra`` receives keys outside the schema and returns True when it
        consumed them.
        """
        values = {}
        raw = self.parser[name] if self.parser.has_section(name) else {}
        for key in raw:
            if key in schema:
                convert, _ = schema[key]
                try:
                    values[key] = convert(raw[key])
                except (ValueError, SpanLedgerError) as exc:
                    raise self.error(f"[{name}] {key} = {raw[key]!r}: {exc}", name, key) from None
            elif extra is None or not extra(key, raw[key]):
                raise self.error(f"unknown key {key!r} in section [{name}]", name, key)
        for key, (_, default) in schema.items():
            if key not in values:
                if default is _REQUIRED:
                    raise self.error(f"missing required key {key!r} in section [{name}]", name)
                values[key] = default
        return values


def parse_config(text, path=None):
    """Parse scenario text into a :class:`ScenarioConfig`."""
    parser = configparser.ConfigParser(
        interpolation=None,
        strict=True,
        inline_comment_prefixes=("#", ";"),
        empty_lines_in_values=False,
        default_section="__no_defaults__",
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path) if path else "<scenario>")
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("content before the first [section]", exc.lineno, 1, path) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ConfigError(exc.message.split(": ", 1)[-1], exc.lineno, 1, path) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", lineno, 1, path) from None

    reader = _Reader(parser, _Locator(text), path)
    span_sections = []
    for name in parser.sections():
        kind = name.split(".", 1)[0]
        if kind == "span" and "." in name:
            span_sections.append(name)
        elif name not in SCHEMA or name == "span":
            raise reader.error(f"unknown section [{name}]", name)
    if not parser.has_section("channel"):
        raise ConfigError("missing [channel] section", path=path)
    if not parser.has_section("route"):
        raise ConfigError("missing [route] section", path=path)

    ch = reader.section("channel", SCHEMA["channel"])
    try:
        channel = ChannelConfig.from_engineering(
            ch["symbol_rate_ghz"], ch["launch_power_dbm"], ch["carrier_frequency_thz"], ch["constellation"], ch["roll_off"]
        )
    except SpanLedgerError as exc:
        raise reader.error(str(exc), "channel") from None
    wavelength = channel.wavelength

    span_types = {}
    for name in span_sections:
        label = name.split(".", 1)[1]
        sp = reader.section(name, SCHEMA["span"])
        try:
            span_types[label] = FiberSpan.from_engineering(
                sp["length_km"], sp["dispersion_ps_nm_km"], sp["attenuation_db_km"], sp["gamma_per_w_km"], label
            ).at_wavelength(wavelength)
        except SpanLedgerError as exc:
            raise reader.error(str(exc), name) from None

    per_span = {"p_spm_w": {}, "p_xpm_w": {}}

    def route_extra(key, value):
        m = _PER_SPAN_KEYS.match(key)
        if not m:
            return False
        kind, label = m.groups()
        if label not in span_types:
            raise reader.error(f"{key}: no [span.{label}] section", "route", key)
        try:
            power = _float(value)
            if power < 0:
                raise ValueError("must be >= 0")
        except ValueError as exc:
            raise reader.error(f"[route] {key} = {value!r}: {exc}", "route", key) from None
        per_span[kind][label] = power
        return True

    rt = reader.section("route", SCHEMA["route"], route_extra)
    labels = rt["spans"]
    for label in labels:
        if label not in span_types:
            raise reader.error(f"route references undefined span type {label!r}", "route", "spans")
    spans = tuple(span_types[label] for label in labels)
    nf = units.db_to_linear(rt["noise_figure_db"])
    bw = None if rt["reference_bandwidth_ghz"] is None else rt["reference_bandwidth_ghz"] * 1e9
    try:
        if rt["gain_db"] is None:
            amps = tuple(Amplifier.compensating(s, nf) for s in spans)
        else:
            amps = (Amplifier(units.db_to_linear(rt["gain_db"]), nf),) * len(spans)
    except SpanLedgerError as exc:
        raise reader.error(str(exc), "route") from None
    route = Route(spans, amps, channel)

    md = reader.section("model", SCHEMA["model"])
    modes = tuple(Mode) if md["mode"] == MODE_ALL else (Mode.parse(md["mode"]),)
    for key in ("n_max", "cinf_n"):
        if md[key] < 1:
            raise reader.error(f"{key} must be >= 1", "model", key)
    if not md["tolerance"] > 0:
        raise reader.error("tolerance must be positive", "model", "tolerance")
    model = ModelSettings(modes, md["n_max"], md["tolerance"], md["cinf_mode"], md["cinf_n"])

    sm = reader.section("simulation", SCHEMA["simulation"])
    if sm["step_control"] == "fixed" and sm["step_km"] is None:
        raise reader.error("fixed step control needs step_km", "simulation", "step_control")
    if sm["seeds"] < 1:
        raise reader.error("seeds must be >= 1", "simulation", "seeds")
    simulation = SimulationSettings(**sm)

    out = reader.section("output", SCHEMA["output"])
    for fmt in out["formats"]:
        if fmt not in ("csv", "json"):
            raise reader.error(f"unknown output format {fmt!r}", "output", "formats")
    directory = out["directory"]
    if directory is not None and path is not None and not Path(directory).is_absolute():
        directory = Path(path).parent / directory
    output = OutputSettings(None if directory is None else Path(directory), out["formats"], out["figures"])

    return ScenarioConfig(
        channel=channel,
        span_types=span_types,
        route=route,
        route_labels=tuple(labels),
        spm_w=tuple(per_span["p_spm_w"].get(label, 0.0) for label in labels),
        xpm_w=tuple(per_span["p_xpm_w"].get(label, 0.0) for label in labels),
        reference_bandwidth=bw,
        model=model,
        simulation=simulation,
        output=output,
        source=None if path is None else Path(path),
    )


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc.strerror}", path=path) from None
    return parse_config(text, path)
