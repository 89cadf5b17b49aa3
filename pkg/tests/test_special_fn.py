import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zpgd import special_fn as sf
from zpgd.errors import DomainError, RangeError

mpmath.mp.dps = 40


def mp_erfc_integral(z):
    return mpmath.sqrt(mpmath.pi) / 2 * mpmath.erfc(z)


@pytest.mark.parametrize("z", [-5.0, -1.0, 0.0, 0.3, 2.0, 5.5, 7.999, 8.0, 8.001, 12.0, 26.0])
def test_erfc_integral_matches_high_precision(z):
    assert sf.erfc_integral(z) == pytest.approx(float(mp_erfc_integral(z)), rel=1e-13, abs=0)


def test_known_values():
    assert sf.erfc_integral(0.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert sf.erfc_integral(2.0) == pytest.approx(0.0041455346903363334, rel=1e-14)
    assert sf.erfc_scaled(10.0) == pytest.approx(0.4975365939122349, rel=1e-13)


@pytest.mark.parametrize("z", [8.0, 9.5, 15.0, 40.0, 200.0])
def test_log_erfc_asymptotic_branch(z):
    exact = float(mpmath.log(mp_erfc_integral(z)))
    assert sf.log_erfc_integral(z) == pytest.approx(exact, rel=1e-14)


def test_branches_agree_at_switch():
    below = sf.log_erfc_integral(math.nextafter(sf.ASYMPTOTIC_SWITCH, 0.0))
    at = sf.log_erfc_integral(sf.ASYMPTOTIC_SWITCH)
    assert abs(below - at) <= 1e-13 * abs(at)


def test_erfc_underflows_to_zero_but_log_stays_finite():
    assert sf.erfc_integral(40.0) == 0.0 or sf.erfc_integral(40.0) < 1e-300
    assert math.isfinite(sf.log_erfc_integral(1e4))


def test_scaled_rejects_overflow_region():
    with pytest.raises(RangeError):
        sf.erfc_scaled(-41.0)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_input(bad):
    with pytest.raises(DomainError):
        sf.erfc_integral(bad)


@pytest.mark.parametrize("p,q", [(0.0, 1.0), (0.5, 0.5000001), (3.0, 9.0), (9.0, 9.5), (20.0, 21.0), (2.0, math.inf)])
def test_log_erfc_diff(p, q):
    exact = mp_erfc_integral(p) - (0 if math.isinf(q) else mp_erfc_integral(q))
    assert sf.log_erfc_diff(p, q) == pytest.approx(float(mpmath.log(exact)), rel=1e-12, abs=1e-12)


def test_log_erfc_diff_domain():
    with pytest.raises(DomainError):
        sf.log_erfc_diff(1.0, 1.0)
    with pytest.raises(DomainError):
        sf.log_erfc_diff(-1.0, 2.0)


@pytest.mark.parametrize("lo,hi", [(-1.0, 2.0), (-30.0, -29.0), (-0.1, 0.1), (-math.inf, 0.5)])
def test_log_gauss_interval(lo, hi):
    if hi <= 0:  # reflect so the reference subtracts two small tails
        lo, hi = -hi, -lo
    exact = mp_erfc_integral(lo) - mp_erfc_integral(hi)
    assert sf.log_gauss_interval(lo, hi) == pytest.approx(float(mpmath.log(exact)), rel=1e-12, abs=1e-12)


def test_ratio_flags_equidistant_point():
    r = sf.log_erfc_ratio(0.0, 2.0, 1.0, 1.0, 0.01)
    assert r.degenerate and r.value == 0.0
    assert sf.log_erfc_ratio(0.0, 2.0, 0.5, 1.0, 1e-4).value > 10


@settings(max_examples=200, deadline=None)
@given(st.floats(-6, 6))
def test_reflection_identity(z):
    assert abs(sf.erfc_integral(z) + sf.erfc_integral(-z) - math.sqrt(math.pi)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-20, 60), st.floats(1e-6, 5))
def test_log_erfc_decreasing(z, h):
    # saturates at log sqrt(pi) in double precision for very negative z
    if z > -3:
        assert sf.log_erfc_integral(z + h) < sf.log_erfc_integral(z)
    else:
        assert sf.log_erfc_integral(z + h) <= sf.log_erfc_integral(z)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 30), st.floats(1e-9, 10))
def test_diff_not_above_first_term(p, gap):
    assert sf.log_erfc_diff(p, p + gap) <= sf.log_erfc_integral(p) + 1e-12


def test_log1mexp_and_expm1():
    for x in (-1e-12, -0.5, -50.0):
        assert sf.log1mexp(x) == pytest.approx(float(mpmath.log(1 - mpmath.exp(x))), rel=1e-12)
    for y in (1e-12, -3.0, 50.0):
        assert sf.log_abs_expm1(y) == pytest.approx(float(mpmath.log(abs(mpmath.expm1(y)))), rel=1e-12)


def test_vectorised_callers_get_plain_floats():
    vals = [sf.erfc_integral(z) for z in np.linspace(-3, 3, 7)]
    assert all(isinstance(v, float) for v in vals)


def test_scaled_at_zero():
    assert sf.erfc_scaled(0.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(1, 1e6), st.floats(1e-6, 10))
def test_scaled_increases_towards_half(z, h):
    lo, hi = sf.erfc_scaled(z), sf.erfc_scaled(z + h)
    assert 0 < lo <= hi < 0.5
    if z >= 2:
        assert 0.5 - lo <= 1 / (2 * z * z)


def test_scaled_overflow_below_limit_is_a_range_error():
    # finite down to about -26.5, overflowing after that
    assert math.isfinite(sf.erfc_scaled(-26.0))
    with pytest.raises(RangeError):
        sf.erfc_scaled(-30.0)
