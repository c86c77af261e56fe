"""Collision and no-collision predicates.

Each predicate encodes exactly the hypotheses of the corresponding
statement; outside their parameter windows the answer is ``INFEASIBLE``
or ``NOT_GUARANTEED`` rather than a number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize

COLLISION = "Collision"
NO_COLLISION = "NoCollision"
INFEASIBLE = "Infeasible"
NOT_GUARANTEED = "NotGuaranteed"
GUARANTEED = "Guaranteed"

NO_SLIP, SLIP_BOTH, SLIP_MIXED, TRESCA = "NoSlip", "SlipBoth", "SlipMixed", "Tresca"


class HypothesisError(ValueError):
    """Input violates a standing hypothesis of the statement."""


@dataclass(frozen=True)
class ContactParams:
    """Physical constants of a falling-body configuration."""

    mu: float = 1.0
    rho_f: float = 1.0
    rho_s: float = 2.0
    m: float = 1.0
    g: float = 1.0
    gamma: float = 2.0
    p: float = 2.0
    d: int = 3
    includes_convection: bool = True
    boundary: str = NO_SLIP
    beta_s: float = 0.0
    beta_omega: float = 0.0

    def __post_init__(self):
        if self.rho_s <= 0 or self.m <= 0:
            raise ValueError("need rho_s > 0 and m > 0")
        if self.gamma <= 1 or self.p <= 1:
            raise ValueError("need gamma > 1 and p > 1")
        if self.d not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        if self.boundary not in (NO_SLIP, SLIP_BOTH, SLIP_MIXED, TRESCA):
            raise ValueError(f"unknown boundary condition {self.boundary!r}")


@dataclass(frozen=True)
class EnergyBudget:
    """Initial energy split into its non-negative parts."""

    fluid_kinetic: float = 0.0
    pressure_potential: float = 0.0
    solid_kinetic: float = 0.0
    rotational: float = 0.0

    def __post_init__(self):
        if min(self.fluid_kinetic, self.pressure_potential,
               self.solid_kinetic, self.rotational) < 0:
            raise ValueError("energy components must be non-negative")

    @property
    def total(self):
        return (self.fluid_kinetic + self.pressure_potential
                + self.solid_kinetic + self.rotational)


@dataclass(frozen=True)
class AlphaBound:
    """Threshold for the Hoelder exponent: collision is shown for ``alpha < value``.

    ``value`` is capped at 1 (the body is at most C^{1,1}); ``raw`` is the
    uncapped minimum of the branch fractions.
    """

    value: float | None
    raw: float | None
    case: str

    @property
    def feasible(self):
        return self.value is not None

    def __float__(self):
        if self.value is None:
            raise ValueError("infeasible parameter window")
        return self.value


def _infeasible(case):
    return AlphaBound(None, None, case)


def _bound(case, *fractions):
    raw = min(fractions)
    if raw <= 0:
        return _infeasible(case)
    return AlphaBound(min(raw, 1.0), raw, case)


def jedna_fraction(gamma, p):
    """Second fraction of the 3D bound with convection."""
    return 3.0 * (4 * p * gamma - 3 * p - 6 * gamma) / (p * gamma + 3 * p + 6 * gamma)


def aa1_fraction(gamma, p):
    """Second fraction of the 3D bound without convection."""
    return 9.0 * (p * gamma - p - gamma) / (2 * p * gamma + 3 * p + 3 * gamma)


def compressible_alpha_bound(gamma, p, d=3, includes_convection=True,
                             temperature_beta=None) -> AlphaBound:
    """Admissible Hoelder-exponent threshold for compressible collision.

    Cases
    -----
    * 3D with convection: ``3/2 < gamma <= 3`` and ``6 gamma/(4 gamma - 3) < p < 3``,
      or ``gamma > 3`` and ``2 <= p < 3``;
      ``alpha < min{(3-p)/(2p-1), 3(4p gamma-3p-6 gamma)/(p gamma+3p+6 gamma)}``.
    * 3D without convection: ``gamma > 3/2``, ``gamma/(gamma-1) < p < 3``;
      ``alpha < min{(3-p)/(2p-1), 9(p gamma-p-gamma)/(2p gamma+3p+3 gamma)}``.
    * 2D without convection: ``gamma > 2``, ``gamma/(gamma-1) < p < 2``;
      ``alpha < min{(2-p)/(2p-1), 4(p gamma-p-gamma)/(p gamma+2p+2 gamma)}``.
    * temperature-growing viscosity (``temperature_beta`` given, 3D, Newtonian):
      ``gamma > 3``, ``beta > 2``;
      ``alpha < min{3(gamma-3)/(4 gamma+3), 3(beta-2)/(9 beta+2)}``.
    """
    if gamma <= 1 or p <= 1 or d not in (2, 3):
        raise ValueError("need gamma > 1, p > 1, d in {2, 3}")
    if temperature_beta is not None:
        case = "3D heat-conducting"
        b = temperature_beta
        if d != 3 or not (gamma > 3 and b > 2):
            return _infeasible(case)
        return _bound(case, 3 * (gamma - 3) / (4 * gamma + 3), 3 * (b - 2) / (9 * b + 2))
    if d == 3 and includes_convection:
        case = "3D with convection"
        ok = (1.5 < gamma <= 3 and 6 * gamma / (4 * gamma - 3) < p < 3) or \
             (gamma > 3 and 2 <= p < 3)
        if not ok:
            return _infeasible(case)
        return _bound(case, (3 - p) / (2 * p - 1), jedna_fraction(gamma, p))
    if d == 3:
        case = "3D without convection"
        if not (gamma > 1.5 and gamma / (gamma - 1) < p < 3):
            return _infeasible(case)
        return _bound(case, (3 - p) / (2 * p - 1), aa1_fraction(gamma, p))
    if includes_convection:
        # no 2D statement covers the convective term
        return _infeasible("2D with convection")
    case = "2D without convection"
    if not (gamma > 2 and gamma / (gamma - 1) < p < 2):
        return _infeasible(case)
    return _bound(case, (2 - p) / (2 * p - 1),
                  4 * (p * gamma - p - gamma) / (p * gamma + 2 * p + 2 * gamma))


def mass_threshold(m, e0, gamma, p, c0) -> bool:
    """``C0 max{m^-1/2, m^-3/2} (1 + E0^(1/2 + 1/gamma + 1/p)) < 1``.

    ``c0`` is a calibration constant that must be supplied by the caller.
    """
    if m <= 0 or e0 < 0 or gamma <= 0 or p <= 0 or c0 <= 0:
        raise ValueError("arguments must be positive")
    return _mass_lhs(m, e0, gamma, p, c0) < 1.0


def _mass_lhs(m, e0, gamma, p, c0):
    return c0 * max(m ** -0.5, m ** -1.5) * (1.0 + e0 ** (0.5 + 1.0 / gamma + 1.0 / p))


def minimal_mass(e0, gamma, p, c0, xtol=1e-13):
    """Smallest mass at which :func:`mass_threshold` turns true (bisection)."""
    f = lambda m: _mass_lhs(m, e0, gamma, p, c0) - 1.0
    hi = 1.0
    while f(hi) >= 0:
        hi *= 2.0
    lo = hi / 2.0
    while f(lo) < 0 and lo > 1e-300:
        lo /= 2.0
    return optimize.brentq(f, lo, hi, xtol=xtol)


@dataclass(frozen=True)
class StarovoitovBeta:
    beta: float
    tag: str

    @property
    def collision_possible(self):
        return self.tag == COLLISION


def starovoitov_beta(alpha, p, d) -> StarovoitovBeta:
    """``beta = 2 - (1 + (d-1)/p)/(1+alpha) - 1/p``; collision possible iff ``beta < 1``."""
    if not 0 <= alpha <= 1 or p < 1 or d not in (2, 3):
        raise ValueError("need alpha in [0,1], p >= 1, d in {2,3}")
    beta = 2.0 - (1.0 + (d - 1.0) / p) / (1.0 + alpha) - 1.0 / p
    # beta < 1 is equivalent to alpha (p - 1) < d; use the exact form for the tag
    tag = COLLISION if alpha * (p - 1) < d else NO_COLLISION
    return StarovoitovBeta(beta, tag)


def starovoitov_rate(alpha, p, q, d):
    """Contact-rate exponent ``eta = (q-1)/q (d - alpha(p-1)) / ((1+alpha) p)``."""
    if q < 1:
        raise ValueError("need q >= 1")
    if starovoitov_beta(alpha, p, d).tag != COLLISION:
        raise ValueError("rate undefined for beta >= 1")
    return (q - 1.0) / q * (d - alpha * (p - 1.0)) / ((1.0 + alpha) * p)


def incompressible_newtonian_predicate(alpha, d, rho_s, rho_f):
    """Collision iff ``alpha < (d-1)/2`` for a heavier-than-fluid body."""
    if rho_s <= rho_f:
        raise HypothesisError("the body must be denser than the fluid")
    if not 0 <= alpha <= 1 or d not in (2, 3):
        raise ValueError("need alpha in [0,1] and d in {2,3}")
    return COLLISION if 2 * alpha < d - 1 else NO_COLLISION


@dataclass(frozen=True)
class FeedbackResult:
    status: str
    delta: float
    epsilon: float | None


def feedback_no_collision(budget: EnergyBudget, k_p, g0, g1, dist) -> FeedbackResult:
    """Distance margin guaranteed by a proportional position feedback.

    The smallest admissible ``delta`` satisfies
    ``delta^2 = (2/k_p) (E + (k_p/2) |G1 - G0|^2)``; the body then keeps
    ``dist(G(t), wall) >= 1 + eps`` with ``eps = dist - 1 - delta`` when
    ``delta < dist - 1``.
    """
    if dist <= 1:
        raise HypothesisError("the target position must be farther than one radius")
    if k_p <= 0:
        raise ValueError("feedback gain must be positive")
    sep = math.dist(_as_tuple(g0), _as_tuple(g1))
    delta = math.sqrt(2.0 / k_p * (budget.total + 0.5 * k_p * sep ** 2))
    if delta < dist - 1.0:
        return FeedbackResult(GUARANTEED, delta, dist - 1.0 - delta)
    return FeedbackResult(NOT_GUARANTEED, delta, None)


def _as_tuple(x):
    if isinstance(x, (int, float)):
        return (float(x),)
    return tuple(float(v) for v in x)
