import math

import numpy as np
import pytest

from fsic import lubridyn as lub
from fsic import testfield as tf
from fsic.criteria import NO_SLIP, SLIP_BOTH, SLIP_MIXED, ContactParams
from fsic.geometry import ShapeProfile

P = ContactParams()


def test_drag_law_cases():
    ball = lub.drag_law_for(P, ShapeProfile.sphere())
    assert ball.regime == lub.POWER and ball.beta_hat == 1.0 and not ball.allows_contact
    assert lub.drag_law_for(P, ShapeProfile.power_law(0.2)).regime == lub.CONST
    assert lub.drag_law_for(P, ShapeProfile.power_law(1 / 3)).regime == lub.LOG
    mixed = lub.drag_law_for(ContactParams(boundary=SLIP_MIXED), ShapeProfile.sphere())
    assert mixed.regime == lub.POWER and mixed.beta_hat == 1.0
    assert lub.drag_law_for(ContactParams(boundary=SLIP_BOTH), ShapeProfile.sphere()).regime == lub.LOG
    with pytest.raises(lub.UnsupportedCase):
        lub.drag_law_for(ContactParams(boundary=SLIP_BOTH, d=2), ShapeProfile.sphere(d=2))


def test_ball_drag_calibrated_from_test_field():
    spec = tf.TestFieldSpec(ShapeProfile.sphere())
    law = lub.drag_law_for(P, ShapeProfile.sphere(),
                           calibration=lambda h: tf.drag_energy(spec, h).value,
                           h_grid=np.geomspace(1e-4, 1e-6, 5))
    assert law.source == "measured-from-testfield"
    assert law.c == pytest.approx(6 * math.pi, rel=0.2)


def test_constant_drag_contact():
    tr = lub.integrate_fall(lub.drag_law_for(P, ShapeProfile.power_law(0.2)), P, 0.5, 0.0, 100.0)
    assert tr.contact is not None and tr.contact.speed < 0
    assert np.all(tr.h > 0)
    assert lub.fit_contact_rate(tr) == pytest.approx(1.0, abs=0.01)


def test_log_drag_contact():
    law = lub.drag_law_for(ContactParams(boundary=SLIP_BOTH), ShapeProfile.sphere())
    tr = lub.integrate_fall(law, ContactParams(boundary=SLIP_BOTH), 0.5, 0.0, 100.0)
    assert tr.contact is not None and math.isfinite(tr.contact.time)


def test_ball_no_contact_and_exponential_lower_bound():
    law = lub.drag_law_for(P, ShapeProfile.sphere())
    tr = lub.integrate_fall(law, P, 0.5, 0.0, 60.0)
    assert tr.contact is None and np.all(tr.h > 0)
    sel = tr.t > 1.0
    c, a, b, r2 = lub.fit_exp_sqrt(tr.t[sel], tr.h[sel])
    assert r2 > 0.999 and c > 0 and a > 0
    # log h decays at most linearly: the slope of log h settles to a constant
    slope = np.diff(np.log(tr.h[sel])) / np.diff(tr.t[sel])
    assert np.ptp(slope[-20:]) < 1e-3


def test_power_drag_rate_stable_under_refinement():
    law = lub.drag_law_for(P, ShapeProfile.power_law(0.5))
    coarse = lub.integrate_fall(law, P, 0.5, 0.0, 100.0, rtol=1e-9)
    fine = lub.integrate_fall(law, P, 0.5, 0.0, 100.0, rtol=1e-11)
    assert lub.fit_contact_rate(coarse) == pytest.approx(lub.fit_contact_rate(fine), abs=0.02)


def test_contact_rate_on_synthetic_trajectory():
    t_star = 2.0
    s = np.geomspace(1.0, 1e-6, 400)
    t = t_star - s
    h = s ** 2
    traj = lub.GapTrajectory(t, h, -2 * s, np.zeros_like(t), lub.Contact(t_star, 0.0))
    assert lub.fit_contact_rate(traj) == pytest.approx(2.0, abs=1e-3)
    kappa, faster = lub.fit_contact_rate(traj, eta=0.25)
    assert faster


def test_contact_rate_needs_contact():
    law = lub.drag_law_for(P, ShapeProfile.sphere())
    with pytest.raises(ValueError):
        lub.fit_contact_rate(lub.integrate_fall(law, P, 0.5, 0.0, 5.0))


def test_h_beta_transform():
    assert lub.h_beta_transform(2.0, 0.0) == 2.0
    assert lub.h_beta_transform(math.e, 1.0) == pytest.approx(1.0)
    assert lub.h_beta_transform(1e-4, 0.75) == pytest.approx(0.4, rel=1e-12)
    with pytest.raises(ValueError):
        lub.h_beta_transform(0.0, 0.5)


def test_energy_conserved_without_drag():
    tr = lub.integrate_fall(lub.DragLaw(lub.CONST, 0.0), P, 0.5, 0.0, 100.0)
    assert tr.energy_drift < 1e-8
    # free fall under the buoyancy-corrected weight: h0 = W t^2 / (2m)
    w = (P.rho_s - P.rho_f) * P.g * P.m / P.rho_s
    assert tr.contact.time == pytest.approx(math.sqrt(2 * 0.5 * P.m / w), rel=1e-8)


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 1 / 3, 0.5, 0.7, 0.9, 1.0])
def test_contact_iff_drag_exponent_below_one(alpha):
    law = lub.drag_law_for(P, ShapeProfile.power_law(alpha))
    scan = lub.contact_scan(law, P, 0.5, 0.0, 2000.0)
    assert scan.finite_contact == law.allows_contact


@pytest.mark.xfail(strict=True, reason="contact with alpha in [1/3, 1) follows from the drag "
                                       "exponent (3a-1)/(1+a) < 1, so the threshold is not 1/3")
def test_contact_threshold_one_third():
    for alpha in (0.5, 0.7):
        law = lub.drag_law_for(P, ShapeProfile.power_law(alpha))
        assert not lub.contact_scan(law, P, 0.5, 0.0, 2000.0).finite_contact


def test_contact_scan_for_the_ball_has_constant_increments():
    law = lub.drag_law_for(P, ShapeProfile.sphere())
    scan = lub.contact_scan(law, P, 0.5, 0.0, 2000.0)
    assert not scan.finite_contact and scan.contact_time is None
    assert scan.exponent_estimate == pytest.approx(1.0, abs=0.01)


def test_contact_scan_exponent_estimate_for_power_drag():
    law = lub.drag_law_for(P, ShapeProfile.power_law(0.9))
    scan = lub.contact_scan(law, P, 0.5, 0.0, 2000.0)
    assert scan.finite_contact
    assert scan.exponent_estimate == pytest.approx(law.beta_hat, abs=0.02)


# Tresca schedule

def test_tresca_first_time():
    s = lub.tresca_schedule(0.01, 9.81, 0.25, 10.0, 1.0, 1.0)
    assert s.t[0] == pytest.approx(0.25 * math.sqrt(0.01 / 9.81), rel=1e-15)
    assert s.t[0] == pytest.approx(7.982e-3, abs=1e-6)
    assert s.lower[0] <= s.h[0] <= s.upper[0]
    assert not s.admissible


def test_tresca_admissible_bracket_and_summed_bound():
    h0, g, sig = 1e-4, 9.81, 0.25
    s = lub.tresca_schedule(h0, g, sig, 1e6, 0.1, 1.0)
    assert s.admissible and s.bracket_ok
    q = 1 - sig ** 2 / 32
    expected = s.t[0] + sig / (2 * math.sqrt(g * h0)) * 1.5 * h0 / (1 - q)
    assert s.t_star_bound == pytest.approx(expected, rel=1e-14)
    assert np.all(np.diff(s.t) > 0) and s.t[-1] < s.t_star_bound


def test_tresca_parameter_checks():
    with pytest.raises(ValueError):
        lub.tresca_schedule(1e-4, 9.81, 0.6, 1e6, 0.1, 1.0)
    with pytest.raises(ValueError):
        lub.tresca_schedule(-1e-4, 9.81, 0.2, 1e6, 0.1, 1.0)
