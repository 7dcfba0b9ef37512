import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanledger import coherence
from spanledger.core import ChannelConfig, FiberSpan
from spanledger.errors import ConvergenceBudgetError, DomainError

thetas = st.floats(0.05, 50.0, allow_nan=False)


def test_fresnel_known_values():
    assert coherence.fresnel_c(0.0) == 0.0
    assert coherence.FRESNEL_C_MAX == pytest.approx(0.7798934004, abs=1e-10)
    assert coherence.fresnel_c(1e6) == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(DomainError):
        coherence.fresnel_c(-0.7)
    with pytest.raises(DomainError):
        coherence.fresnel_c(math.nan)
    np.testing.assert_allclose(coherence.fresnel_c([0.0, 1.0]), [0.0, coherence.FRESNEL_C_MAX])


def test_theta_smf():
    span = FiberSpan.from_engineering(80, 16.7, 0.2, 1.27)
    t = coherence.theta_for(span, ChannelConfig(32e9))
    assert t == pytest.approx(5.48, rel=0.01)
    assert coherence.theta(32e9, span.beta2_abs, span.length) == t


def test_theta_rejects_zero_dispersion():
    span = FiberSpan.from_engineering(80, 0.0, 0.2, 1.27)
    with pytest.raises(DomainError):
        coherence.theta_for(span, ChannelConfig(32e9))


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_bad_theta(bad):
    with pytest.raises(DomainError):
        coherence.coherent_coefficient(5, bad)


def test_small_n():
    assert coherence.coherent_coefficient(1, 2.0) == 0.0
    assert coherence.coherent_coefficient(2, 2.0) == coherence.rho(1, 2.0)
    assert coherence.per_span_increment(2, 2.0) == coherence.rho(1, 2.0)
    with pytest.raises(DomainError):
        coherence.coherent_coefficient(0, 2.0)
    with pytest.raises(DomainError):
        coherence.per_span_increment(1, 2.0)
    with pytest.raises(DomainError):
        coherence.rho(1.5, 2.0)


def test_rho_table_matches_scalar_and_is_read_only():
    table = coherence.rho_table(3.0, 10)
    assert table[4] == pytest.approx(coherence.rho(5, 3.0), rel=1e-15)
    with pytest.raises(ValueError):
        table[0] = 1.0


@settings(max_examples=60, deadline=None)
@given(thetas, st.integers(2, 120))
def test_increment_is_first_difference(t, n):
    c = coherence.coherent_coefficient
    assert coherence.per_span_increment(n, t) == pytest.approx(c(n, t) - c(n - 1, t), rel=1e-12, abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(thetas)
def test_rho_positive_and_bounded(t):
    r = coherence.rho_table(t, 50)
    assert np.all(r > 0)
    k = np.arange(1, 51)
    assert np.all(r <= 2.4 / math.sqrt(t) * coherence.FRESNEL_C_MAX / k**1.5 * (1 + 1e-15))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 20.0))
def test_asymptotic_brackets_increment(t):
    est = coherence.asymptotic_coefficient(t, 1e-5)
    assert est.tail_bound <= 1e-5
    assert coherence.per_span_increment(200, t) <= est.c_inf + est.tail_bound


def test_remainder_bound_decreases():
    b = [coherence.remainder_bound(2.0, k) for k in (10, 100, 1000)]
    assert b[0] > b[1] > b[2]
    assert coherence.partial_sum_tail_bound(2.0, 100) > coherence.remainder_bound(2.0, 100)


def test_budget_error():
    with pytest.raises(ConvergenceBudgetError):
        coherence.asymptotic_coefficient(0.5, 1e-9, max_terms=1000)
    with pytest.raises(DomainError):
        coherence.asymptotic_coefficient(1.0, 0.0)


def test_equivalent_coefficient_modes():
    series = coherence.equivalent_coefficient(5.48)
    at_n = coherence.equivalent_coefficient(5.48, cinf_mode="at_n", cinf_n=20)
    assert at_n.c_inf == pytest.approx(coherence.per_span_increment(20, 5.48))
    assert at_n.terms_used == 19
    assert at_n.c_inf < series.c_inf
    with pytest.raises(DomainError):
        coherence.equivalent_coefficient(5.48, cinf_mode="nope")


def test_profile():
    span = FiberSpan.from_engineering(80, 16.7, 0.2, 1.27)
    p = coherence.build_profile(span, ChannelConfig(32e9), n_max=20)
    assert p.n_max == 20
    assert len(p.rho) == 20 and len(p.c_n) == 20 and len(p.delta_c) == 19
    assert p.c_n[0] == 0
    assert p.c_n[19] == pytest.approx(coherence.coherent_coefficient(20, p.theta), rel=1e-13)
    assert p.delta_c[18] == pytest.approx(coherence.per_span_increment(20, p.theta), rel=1e-13)
    assert p.c_inf == pytest.approx(1.41877, abs=1e-4)


def test_sweep_with_executor():
    from concurrent.futures import ThreadPoolExecutor

    thetas = [0.5, 2.0, 8.0]
    serial = coherence.theta_sweep(thetas, 20, 1e-4)
    with ThreadPoolExecutor(2) as pool:
        parallel = coherence.theta_sweep(thetas, 20, 1e-4, executor=pool)
    assert serial == parallel
    assert serial[0].theta == 0.5
    assert serial[1].c_at_n == coherence.coherent_coefficient(20, 2.0)
