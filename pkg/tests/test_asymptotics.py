import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsic.asymptotics import (BOUNDED, LOGARITHMIC, POWER_LAW, FitError, classify,
                              default_h_grid, fit_scaling, singular_gap_integral, sweep)


def test_closed_forms_at_unit_gap():
    assert singular_gap_integral(1, 0, 1, 1.0) == pytest.approx(math.pi / 4, rel=1e-12)
    assert singular_gap_integral(1, 1, 1, 1.0) == pytest.approx(0.5 * math.log(2), rel=1e-12)


@pytest.mark.parametrize("alpha,q,s", [(0.5, 0.0, 1.0), (1.0, 2.0, 2.0), (0.3, 1.5, 1.0)])
def test_quadrature_against_substitution(alpha, q, s):
    # independent route: r = t**k clusters nodes near the origin, plain quad afterwards
    from scipy import integrate
    h = 1e-4
    k = 4.0
    f = lambda t: k * t ** (k - 1) * (t ** k) ** q / (h + (t ** k) ** (1 + alpha)) ** s
    ref = integrate.quad(f, 0, 1, limit=500, epsrel=1e-12,
                         points=[h ** (1 / ((1 + alpha) * k))])[0]
    assert singular_gap_integral(alpha, q, s, h) == pytest.approx(ref, rel=1e-8)


def test_classification_examples():
    assert classify(1, 1, 1).tag == LOGARITHMIC
    assert classify(1, 3, 1).tag == BOUNDED
    c = classify(0.5, 0, 2)
    assert c.tag == POWER_LAW and c.exponent == pytest.approx(-4 / 3)


def test_power_law_slope_on_small_gaps():
    hs = np.geomspace(1e-3, 1e-6, 7)
    vals = [singular_gap_integral(0.5, 0, 2, h) for h in hs]
    fit = fit_scaling(np.column_stack([hs, vals]))
    assert fit.exponent == pytest.approx(-4 / 3, abs=0.01)


def test_fit_on_synthetic_data():
    h = default_h_grid()
    fit = fit_scaling(np.column_stack([h, 1 / h]))
    assert fit.exponent == pytest.approx(-1.0, abs=1e-6)
    fit = fit_scaling(np.column_stack([h, np.abs(np.log(h))]), log_branch=True)
    assert fit.branch == "log" and fit.log_r2 > 0.999


def test_fit_of_model_integral():
    h = default_h_grid()
    vals = [singular_gap_integral(1, 0, 1, x) for x in h]
    assert fit_scaling(np.column_stack([h, vals])).exponent == pytest.approx(-0.5, abs=0.05)


def test_fit_rejects_bad_samples():
    h = default_h_grid()
    with pytest.raises(FitError):
        fit_scaling(np.column_stack([h[::-1], 1 / h[::-1]]))
    with pytest.raises(FitError):
        fit_scaling(np.column_stack([h[:3], h[:3]]))
    with pytest.raises(FitError):
        fit_scaling(np.column_stack([h, -h]))


@given(st.floats(0.1, 1.0), st.floats(0.0, 3.0), st.floats(0.5, 3.0))
@settings(max_examples=25, deadline=None)
def test_monotone_in_h_and_s(alpha, q, s):
    a = singular_gap_integral(alpha, q, s, 1e-3)
    b = singular_gap_integral(alpha, q, s, 1e-2)
    c = singular_gap_integral(alpha, q, s + 0.25, 1e-2)
    assert a > b
    # larger s decreases the integrand wherever h + r^(1+alpha) > 1 fails only at r near r0=1
    assert c != b


@given(st.floats(0.2, 1.0), st.floats(0.5, 2.0))
@settings(max_examples=15, deadline=None)
def test_decreasing_in_s_for_small_denominators(alpha, s):
    # with r0 = 0.5 the denominator stays below one, so raising s increases nothing
    a = singular_gap_integral(alpha, 1.0, s, 1e-3, r0=0.5)
    b = singular_gap_integral(alpha, 1.0, s + 0.5, 1e-3, r0=0.5)
    assert b > a


@pytest.mark.parametrize("triple", [(0.5, 0.0, 2.0), (1.0, 0.0, 1.0), (1.0, 1.0, 2.0),
                                    (1.0, 1.0, 1.0), (0.5, 0.5, 1.0), (1.0, 3.0, 2.0),
                                    (1.0, 3.0, 1.0), (1.0, 2.0, 1.0), (0.5, 2.0, 1.0)])
def test_sweep_matches_classification(triple):
    assert sweep(*triple).matches()


@given(st.floats(0.2, 1.0), st.floats(0.0, 4.0), st.floats(0.5, 2.0))
@settings(max_examples=30, deadline=None)
def test_bounded_regime_plateau(alpha, q, s):
    # the h-correction of a bounded integral is O(h^((q+1-s(1+alpha))/(1+alpha)))
    rate = (q + 1 - s * (1 + alpha)) / (1 + alpha)
    if rate < 0.6:
        return
    a = singular_gap_integral(alpha, q, s, 1e-6)
    b = singular_gap_integral(alpha, q, s, 1e-3)
    assert abs(a - b) / a < 0.05


@pytest.mark.xfail(strict=True, reason="a margin of 0.2 leaves an h^(1/6) correction of ~20%")
def test_bounded_plateau_with_small_margin():
    a = singular_gap_integral(0.5, 0.0, 0.5, 1e-6)
    b = singular_gap_integral(0.5, 0.0, 0.5, 1e-3)
    assert abs(a - b) / a < 0.05


def test_near_critical_flag():
    sw = sweep(1.0, 1.05, 1.0)
    assert sw.fit.slow_converging
    assert not sweep(1.0, 3.0, 1.0).fit.slow_converging


def test_invalid_arguments():
    with pytest.raises(ValueError):
        singular_gap_integral(1, 0, 1, 0.0)
    with pytest.raises(ValueError):
        classify(0, 1, 1)
