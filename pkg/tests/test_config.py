import pytest

from spanledger.cli.config import load_config, parse_config, parse_route_spec
from spanledger.errors import ConfigError
from spanledger.qot import Mode

from conftest import SCENARIOS

BASE = """\
[channel]
symbol_rate_ghz = 32

[span.smf]
length_km = 80
dispersion_ps_nm_km = 16.7
attenuation_db_km = 0.2
gamma_per_w_km = 1.27

[route]
spans = smf*3
"""


def test_minimal_config_defaults():
    cfg = parse_config(BASE)
    assert len(cfg.route) == 3
    assert cfg.route.is_periodic
    assert cfg.model.modes == (Mode.EQUIVALENT,)
    assert cfg.spm_w == (0.0, 0.0, 0.0)
    assert cfg.route.amplifiers[0].gain == pytest.approx(cfg.route.spans[0].loss)
    assert cfg.simulation.n_symbols == 2**15


def test_route_spec():
    assert parse_route_spec("a*2, b ,a") == ["a", "a", "b", "a"]
    for bad in ("", "a*", "*3", "a**2"):
        with pytest.raises(ValueError):
            parse_route_spec(bad)


@pytest.mark.parametrize(
    "extra, line, fragment",
    [
        ("\n[model]\nmod = coherent\n", 14, "mod"),
        ("\n[plots]\nx = 1\n", 13, "plots"),
        ("\n[model]\nmode = sometimes\n", 14, "sometimes"),
        ("p_spm_w.ssmf = 1e-6\n", 12, "ssmf"),
        ("p_spm_w.smf = -1e-6\n", 12, "p_spm_w.smf"),
    ],
)
def test_errors_carry_position(extra, line, fragment):
    with pytest.raises(ConfigError) as err:
        parse_config(BASE + extra, "scenario.ini")
    assert err.value.line == line
    assert fragment in str(err.value)
    assert str(err.value).startswith("scenario.ini, line")


def test_missing_required_key():
    with pytest.raises(ConfigError, match="gamma_per_w_km"):
        parse_config(BASE.replace("gamma_per_w_km = 1.27\n", ""))


def test_empty_route_is_an_error():
    with pytest.raises(ConfigError):
        parse_config(BASE.replace("smf*3", ""))


def test_undefined_span_type():
    with pytest.raises(ConfigError, match="leaf"):
        parse_config(BASE.replace("smf*3", "smf, leaf"))


def test_duplicate_key():
    with pytest.raises(ConfigError):
        parse_config(BASE + "spans = smf\n")


def test_scenarios_load():
    smf = load_config(SCENARIOS / "smf_20x80.ini")
    assert smf.model.modes == tuple(Mode)
    assert smf.spm_w[0] == pytest.approx(6.99e-7)
    mixed = load_config(SCENARIOS / "mixed_route.ini")
    assert mixed.route_labels == ("smf",) * 5 + ("leaf",) * 3 + ("smf",) * 2
    assert not mixed.route.is_periodic


def test_gamma_override():
    cfg = parse_config(BASE).with_gamma(0.0)
    assert all(s.gamma_nl == 0 for s in cfg.route.spans)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.ini")
