from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsic import criteria as cr


def test_alpha_bound_examples():
    b = cr.compressible_alpha_bound(6, 2, 3, True)
    assert float(b) == pytest.approx(1 / 3, abs=1e-15)
    # second fraction (6 gamma - 18)/(8 gamma + 6) at gamma = 6
    assert cr.jedna_fraction(6, 2) == pytest.approx(18 / 54, abs=1e-15)
    assert not cr.compressible_alpha_bound(2, 2, 3, True).feasible
    b2 = cr.compressible_alpha_bound(3, 1.8, 2, False)
    assert float(b2) == pytest.approx(0.2 / 2.6, rel=1e-14)
    assert b2.raw == pytest.approx(min(0.2 / 2.6, 4 * 0.6 / 15), rel=1e-14)


def test_alpha_bound_other_cases():
    b = cr.compressible_alpha_bound(2, 2.5, 3, False)
    assert float(b) == pytest.approx(min(0.5 / 4, cr.aa1_fraction(2, 2.5)))
    assert not cr.compressible_alpha_bound(3, 1.8, 2, True).feasible
    t = cr.compressible_alpha_bound(5, 2, 3, temperature_beta=4)
    assert float(t) == pytest.approx(min(6 / 23, 6 / 38))
    assert not cr.compressible_alpha_bound(2.5, 2, 3, temperature_beta=4).feasible
    with pytest.raises(ValueError):
        float(cr.compressible_alpha_bound(2, 2, 3, True))


def _window(g, p):
    return g >= 1.5 and g / (g - 1) < p < 3


def test_ordering_chain_on_grid():
    count = 0
    for g in np.linspace(1.5, 20, 20):
        for p in np.linspace(1.0, 3.0, 22)[1:-1]:
            if not _window(g, p):
                continue
            count += 1
            chain = [cr.jedna_fraction(g, p), cr.aa1_fraction(g, p),
                     3 * (g - 1) / (g + 1), 3 * (g - 1)]
            assert all(a <= b + 1e-12 for a, b in zip(chain, chain[1:]))
    assert count > 100


@given(st.fractions(0, 1), st.fractions(1, 10), st.sampled_from([2, 3]))
def test_beta_tag_matches_exact_rule(alpha, p, d):
    # exact rational evaluation of beta as an independent oracle
    beta = 2 - (1 + Fraction(d - 1) / p) / (1 + alpha) - 1 / p
    res = cr.starovoitov_beta(float(alpha), float(p), d)
    assert (beta < 1) == (alpha * (p - 1) < d)
    assert res.collision_possible == (alpha * (p - 1) < d)
    assert res.beta == pytest.approx(float(beta), abs=1e-12)


def test_alpha_bound_monotone_in_gamma():
    vals = [cr.compressible_alpha_bound(g, 2, 3, True) for g in np.linspace(3.01, 40, 60)]
    vals = [v.value for v in vals]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_first_fraction_dominance():
    for p in np.linspace(1.85, 2.95, 12):
        thr = 3 * p / (5 * p - 9)
        for g in np.linspace(1.6, 40, 80):
            if not (6 * g / (4 * g - 3) < p or g > 3):
                continue
            first = (3 - p) / (2 * p - 1)
            dominant = first <= cr.jedna_fraction(g, p)
            if abs(g - thr) > 1e-9:
                assert dominant == (g >= thr)


def test_mass_threshold_examples():
    assert cr.mass_threshold(4, 0, 2, 2, 1)
    assert not cr.mass_threshold(0.25, 0, 2, 2, 1)


def test_minimal_mass_by_substitution():
    m = cr.minimal_mass(1.0, 2, 2, 2.0)
    lhs = lambda mm: 2.0 * max(mm ** -0.5, mm ** -1.5) * 2.0
    assert abs(lhs(m) - 1.0) < 1e-10
    assert cr.mass_threshold(m * (1 + 1e-9), 1.0, 2, 2, 2.0)
    assert not cr.mass_threshold(m * (1 - 1e-9), 1.0, 2, 2, 2.0)


def test_starovoitov_examples():
    assert cr.starovoitov_beta(1, 2, 3).beta == pytest.approx(0.5, abs=1e-15)
    assert cr.starovoitov_beta(1, 2, 3).beta == pytest.approx((3 - 1) / (2 * 2), abs=1e-15)
    assert cr.starovoitov_beta(1 / 3, 2, 3).beta == pytest.approx(0.0, abs=1e-15)
    assert cr.starovoitov_beta(1, 2, 2).beta == pytest.approx(0.75, abs=1e-15)
    assert cr.starovoitov_rate(1, 2, 2, 3) == pytest.approx(0.25, abs=1e-15)
    assert cr.starovoitov_rate(0, 2, 2, 2) == pytest.approx(0.5, abs=1e-15)
    assert cr.starovoitov_rate(0.5, 2, 1, 3) == 0.0


@given(st.floats(0, 1), st.sampled_from([2, 3]))
def test_rate_reduces_to_corollary(alpha, d):
    assert cr.starovoitov_rate(alpha, 2, 2, d) == pytest.approx((d - alpha) / (4 * (1 + alpha)))


def test_rate_undefined_without_collision():
    with pytest.raises(ValueError):
        cr.starovoitov_rate(1.0, 4.0, 2, 3)


def test_incompressible_predicate():
    assert cr.incompressible_newtonian_predicate(1, 3, 2, 1) == cr.NO_COLLISION
    assert cr.incompressible_newtonian_predicate(0.4, 2, 2, 1) == cr.COLLISION
    assert cr.incompressible_newtonian_predicate(0.5, 2, 2, 1) == cr.NO_COLLISION
    with pytest.raises(cr.HypothesisError):
        cr.incompressible_newtonian_predicate(0.4, 2, 1, 1)


def test_feedback_examples():
    r = cr.feedback_no_collision(cr.EnergyBudget(), 5.0, (0, 2), (0, 2), 2.0)
    assert r.status == cr.GUARANTEED and r.delta == 0 and r.epsilon == pytest.approx(1.0)
    big = cr.feedback_no_collision(cr.EnergyBudget(fluid_kinetic=1e6), 1.0, 0, 0, 3.0)
    assert big.status == cr.NOT_GUARANTEED and big.epsilon is None
    with pytest.raises(cr.HypothesisError):
        cr.feedback_no_collision(cr.EnergyBudget(), 1.0, 0, 0, 1.0)


def test_feedback_gain_limit():
    budget = cr.EnergyBudget(1.0, 0.5, 0.25, 0.25)
    eps = [cr.feedback_no_collision(budget, k, 0, 0, 3.0).epsilon for k in np.geomspace(10, 1e8, 8)]
    assert all(b > a for a, b in zip(eps, eps[1:]))
    assert eps[-1] == pytest.approx(2.0, abs=1e-3)


def test_energy_budget():
    b = cr.EnergyBudget(1, 2, 3, 4)
    assert b.total == 10
    with pytest.raises(ValueError):
        cr.EnergyBudget(-1)


def test_contact_params_validation():
    with pytest.raises(ValueError):
        cr.ContactParams(gamma=1.0)
    with pytest.raises(ValueError):
        cr.ContactParams(boundary="Sticky")
