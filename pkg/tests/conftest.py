"""Shared fixtures and the per-criterion acceptance summary."""
from collections import OrderedDict
from pathlib import Path

import pytest

from spanledger.core import ChannelConfig, Constellation, FiberSpan, Route
from spanledger.ssfm import SimConfig, run_accumulation

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"

CRITERIA = OrderedDict(
    [
        ("1", "Fresnel kernel vs quadrature oracle"),
        ("2", "theta from engineering units"),
        ("3", "C(n) vs literal double loop"),
        ("4", "second difference, increment monotonicity, n*C_inf >= C(n)"),
        ("5", "C_inf tail bound is a true bound"),
        ("6", "C(20) strictly decreasing over 25 log-spaced theta"),
        ("7", "split-step sanity suite"),
        ("8", "SPM accumulation shape on 20 spans"),
        ("9", "equivalent model conservative vs simulation"),
        ("10", "ledger additivity and inverse-SNR split"),
    ]
)

_outcomes = {}
_details = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion checked by the test")


@pytest.fixture
def record(request):
    """``record(text)`` attaches a measured value to the test's criterion line."""
    marker = request.node.get_closest_marker("criterion")

    def _record(text):
        if marker is not None:
            _details.setdefault(marker.args[0], []).append(text)

    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        ok = rep.passed or (rep.skipped and rep.when == "call")
        _outcomes.setdefault(key, []).append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key, title in CRITERIA.items():
        results = _outcomes.get(key)
        if not results:
            continue
        ok = all(r[1] for r in results)
        failed = [name for name, passed in results if not passed]
        line = f"criterion {key:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if _details.get(key):
            line += "  [" + "; ".join(_details[key]) + "]"
        if failed:
            line += "  failed: " + ", ".join(failed)
        terminalreporter.write_line(line)


# ---------------------------------------------------------------- simulations

LINE_DISPERSION = {"smf": 16.7, "leaf": 5.0}


def line_span(fiber, gamma=1.27):
    return FiberSpan.from_engineering(80.0, LINE_DISPERSION[fiber], 0.2, gamma, fiber)


def line_channel(launch_power_dbm=0.0, constellation=Constellation.GAUSSIAN):
    return ChannelConfig.from_engineering(32.0, launch_power_dbm, constellation=constellation)


def line_config(fiber, n_spans=20, gamma=1.27, launch_power_dbm=0.0, **kwargs):
    route = Route.periodic(line_span(fiber, gamma), n_spans, line_channel(launch_power_dbm))
    return SimConfig(route, **kwargs)


@pytest.fixture(scope="session")
def smf_run():
    return run_accumulation(line_config("smf"))


@pytest.fixture(scope="session")
def leaf_run():
    return run_accumulation(line_config("leaf"))
