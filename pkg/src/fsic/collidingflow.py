"""An explicit colliding flow: a disk pushed into the wall of a larger disk.

The body ``B_r((g, 0))`` moves inside ``B_R(0)`` along the first axis with
``g(t) = sigma(t) (R - r)``.  The map

    F(t, rho, theta) = (rho cos theta + sigma (R - rho), rho sin theta)

sends the concentric annulus onto the eccentric fluid domain, and the
velocity is ``u = grad_perp psi`` with ``psi = g' [rho phi(rho) sin theta] o F^-1``.
Here ``grad_perp psi = (d_2 psi, -d_1 psi)`` so that the solid moves with
``(g', 0)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate


class MapError(ValueError):
    """Raised for sigma >= 1 (contact) or points outside the outer disk."""


@dataclass(frozen=True)
class CutoffPhi:
    """Cubic cutoff: 1 on [0, r), ``(R-r)^-3 (rho-R)^2 (2 rho - 3r + R)`` on [r, R], 0 beyond."""

    r: float
    R: float

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise ValueError("need 0 < r < R")

    def _s(self, rho):
        rho = np.asarray(rho, dtype=float)
        inside = (rho >= self.r) & (rho <= self.R)
        return rho, inside, (self.R - self.r) ** -3

    def __call__(self, rho):
        rho, mid, k = self._s(rho)
        out = np.where(rho < self.r, 1.0, 0.0)
        return np.where(mid, k * (rho - self.R) ** 2 * (2 * rho - 3 * self.r + self.R), out)

    def d1(self, rho):
        rho, mid, k = self._s(rho)
        return np.where(mid, 6 * k * (rho - self.R) * (rho - self.r), 0.0)

    def d2(self, rho):
        rho, mid, k = self._s(rho)
        return np.where(mid, 6 * k * (2 * rho - self.R - self.r), 0.0)


@dataclass(frozen=True)
class EccentricMap:
    """``F`` and its inverse for outer radius ``R`` and body radius ``r``."""

    R: float
    r: float

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise ValueError("need 0 < r < R")

    @property
    def phi(self):
        return CutoffPhi(self.r, self.R)

    def forward(self, sigma, rho, theta):
        _check(sigma)
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return rho * np.cos(theta) + sigma * (self.R - rho), rho * np.sin(theta)

    def jacobian(self, sigma, rho, theta):
        """``J_F = rho (1 - sigma cos theta)``."""
        return np.asarray(rho) * (1.0 - sigma * np.cos(theta))

    def inverse(self, sigma, x1, x2, tol=1e-15, max_iter=60):
        """``(rho, theta)`` with ``F(rho, theta) = x`` by damped Newton iteration.

        With ``xi = (rho cos theta, rho sin theta)`` the map only shifts the
        first coordinate, ``x1 = xi1 + sigma (R - |xi|)``, which is strictly
        increasing in ``xi1``; the closed form serves as starting guess.
        """
        _check(sigma)
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if np.any(np.hypot(x1, x2) > self.R * (1 + 1e-12)):
            raise MapError("point outside the outer disk")
        rho0 = self.closed_form_rho(sigma, x1, x2)
        xi1 = x1 - sigma * (self.R - rho0)
        for _ in range(max_iter):
            rho = np.hypot(xi1, x2)
            f = xi1 + sigma * (self.R - rho) - x1
            safe = np.where(rho > 0, rho, 1.0)
            df = 1.0 - sigma * np.where(rho > 0, xi1 / safe, 0.0)
            step = f / df
            xi1 = xi1 - step
            if np.all(np.abs(step) <= tol * (1.0 + np.abs(xi1))):
                break
        rho = np.hypot(xi1, x2)
        theta = np.mod(np.arctan2(x2, xi1), 2 * np.pi)
        return rho, theta

    def closed_form_rho(self, sigma, x1, x2):
        """Positive root of ``(1-s^2) rho^2 - 2 s X rho - (X^2 + x2^2) = 0``, ``X = x1 - s R``."""
        X = np.asarray(x1, dtype=float) - sigma * self.R
        x2 = np.asarray(x2, dtype=float)
        return (sigma * X + np.sqrt(X * X + (1 - sigma ** 2) * x2 * x2)) / (1 - sigma ** 2)

    def printed_rho(self, sigma, x1, x2):
        """Radical as it appears in the source derivation (kept for comparison)."""
        X = np.asarray(x1, dtype=float) - sigma * self.R
        x2 = np.asarray(x2, dtype=float)
        return (sigma * X + np.sqrt((1 + sigma ** 2) * X * X + x2 * x2)) / (1 - sigma ** 2)

    def printed_theta(self, x2, rho):
        """Two-case arcsin branch as it appears in the source derivation."""
        s = np.arcsin(np.clip(np.asarray(x2) / rho, -1, 1))
        return np.where(np.asarray(x2) >= 0, s, 2 * np.pi - s)


def _check(sigma):
    if not 0 <= sigma < 1:
        raise MapError("sigma must lie in [0, 1)")


def inverse_discrepancy(emap: EccentricMap, sigma, n=200, seed=0):
    """Largest deviation of the printed inverse from the Newton inverse.

    Returns ``(rho_error, theta_error, roundtrip_error)`` over random points
    of the fluid domain; the last entry measures ``|F(F^-1 x) - x|``.
    """
    rng = np.random.default_rng(seed)
    rho = emap.R * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * np.pi, n)
    x1, x2 = emap.forward(sigma, rho, th)
    rn, tn = emap.inverse(sigma, x1, x2)
    y1, y2 = emap.forward(sigma, rn, tn)
    d_rho = np.max(np.abs(emap.printed_rho(sigma, x1, x2) - rn))
    d_th = np.abs(np.angle(np.exp(1j * (emap.printed_theta(x2, rn) - tn))))
    return float(d_rho), float(np.max(d_th)), float(np.max(np.hypot(y1 - x1, y2 - x2)))


def conformal_alternative(R, r, g):
    """``(c, r0, W)`` of the Moebius map onto a concentric annulus ``r0 < |w| < 1``."""
    if not 0 < g < R - r:
        raise ValueError("need 0 < g < R - r")
    W = math.sqrt((R + r + g) * (R + r - g) * (R - r + g) * (R - r - g))
    c = (R * R + g * g - r * r - W) / (2 * g)
    r0 = 2 * R * r / (R * R + r * r - g * g + W)
    return c, r0, W


def conformal_radius_check(R, r, g, n=64):
    """Spread of ``|F~|`` over the inner and outer circles (both should vanish)."""
    c, r0, _ = conformal_alternative(R, r, g)
    f = lambda z: R * (z - c) / (R * R - c * z)
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    inner = np.abs(f(g + r * np.exp(1j * th)))
    outer = np.abs(f(R * np.exp(1j * th)))
    return float(np.max(np.abs(inner - r0))), float(np.max(np.abs(outer - 1.0)))


# pulled-back fields on the reference annulus

def grad_psi_ref(emap: EccentricMap, sigma, gdot, rho, theta):
    """``grad_x psi`` at ``x = F(rho, theta)``."""
    phi = emap.phi
    s, c = np.sin(theta), np.cos(theta)
    q = 1.0 - sigma * c
    rp = rho * phi.d1(rho)
    return gdot / q * rp * s * c, gdot / q * (phi(rho) * q + rp * s * s)


def laplacian_psi_ref(emap: EccentricMap, sigma, gdot, rho, theta):
    """Closed form of ``Delta_x psi`` at ``x = F(rho, theta)``."""
    phi = emap.phi
    s, c = np.sin(theta), np.cos(theta)
    q = 1.0 - sigma * c
    p1, p2 = phi.d1(rho), phi.d2(rho)
    return gdot / q * (rho * p2 * s / q + 3 * p1 * s + sigma ** 2 * p1 * s ** 3 / q ** 2)


@dataclass(frozen=True)
class SigmaFamily:
    """Approach law ``sigma(t)`` on ``[0, T]`` reaching 1 at ``t_star``."""

    name: str
    T: float
    t_star: float
    sigma: Callable
    one_minus: Callable
    dsigma: Callable
    ddsigma: Callable

    @classmethod
    def quartic(cls, T=1.0, t_star=0.5):
        _family_check(T, t_star)
        s = lambda t: (np.asarray(t, float) - t_star) / T
        return cls("quartic", T, t_star, lambda t: 1 - s(t) ** 4, lambda t: s(t) ** 4,
                   lambda t: -4 * s(t) ** 3 / T, lambda t: -12 * s(t) ** 2 / T ** 2)

    @classmethod
    def linear(cls, T=1.0, t_star=0.5):
        _family_check(T, t_star)
        s = lambda t: (np.asarray(t, float) - t_star) / T
        return cls("linear", T, t_star, lambda t: 1 - np.abs(s(t)), lambda t: np.abs(s(t)),
                   lambda t: -np.sign(s(t)) / T, lambda t: 0.0 * s(t))

    def g_dot(self, t, R, r):
        return self.dsigma(t) * (R - r)


def _family_check(T, t_star):
    if not 0 < t_star < T:
        raise ValueError("need 0 < t_star < T")


class CollidingFlow:
    """Velocity field of the colliding construction for a given sigma family."""

    def __init__(self, emap: EccentricMap, family: SigmaFamily):
        self.emap = emap
        self.family = family

    def state(self, t):
        sig = float(self.family.sigma(t))
        _check(sig)
        return sig, float(self.family.g_dot(t, self.emap.R, self.emap.r))

    def stream(self, t, x1, x2):
        sig, gd = self.state(t)
        rho, th = self.emap.inverse(sig, x1, x2)
        return gd * rho * self.emap.phi(rho) * np.sin(th)

    def velocity(self, t, x1, x2):
        sig, gd = self.state(t)
        rho, th = self.emap.inverse(sig, x1, x2)
        p1, p2 = grad_psi_ref(self.emap, sig, gd, rho, th)
        return p2, -p1

    def divergence_fd(self, t, x1, x2, step=1e-5):
        """Central-difference divergence of the velocity."""
        u1p, _ = self.velocity(t, np.asarray(x1) + step, x2)
        u1m, _ = self.velocity(t, np.asarray(x1) - step, x2)
        _, u2p = self.velocity(t, x1, np.asarray(x2) + step)
        _, u2m = self.velocity(t, x1, np.asarray(x2) - step)
        return (u1p - u1m + u2p - u2m) / (2 * step)


# angular integrals and their closed forms

def nu0(sigma):
    """``int_0^{2 pi} dtheta / (1 - sigma cos theta) = 2 pi / sqrt(1 - sigma^2)``."""
    _check(sigma)
    return 2 * math.pi / math.sqrt(1 - sigma ** 2)


def nu1(sigma):
    """``int_0^{2 pi} sin^2 / (1 - sigma cos) = 2 pi / (1 + sqrt(1 - sigma^2))``."""
    _check(sigma)
    return 2 * math.pi / (1 + math.sqrt(1 - sigma ** 2))


def angular_cubic(sigma):
    """``int_0^{2 pi} sin^2 / (1 - sigma cos)^3 = pi / (1 - sigma^2)^(3/2)``."""
    _check(sigma)
    return math.pi / (1 - sigma ** 2) ** 1.5


def angular_quadrature(sigma, power_sin, power_den):
    """Adaptive quadrature of ``int_0^{2 pi} sin^a theta / (1 - sigma cos theta)^b``."""
    f = lambda t: math.sin(t) ** power_sin / (1 - sigma * math.cos(t)) ** power_den
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        # the peak sits at theta = 0; integrate over (0, pi) and double
        w = math.sqrt(max(1 - sigma, 1e-300))
        pts = [p for p in (w, 4 * w, 16 * w) if p < math.pi]
        val, _ = integrate.quad(f, 0, math.pi, points=pts, epsabs=0, epsrel=1e-13, limit=500)
    return 2 * val


def _theta_grid(sigma, n_min=64):
    # trapezoid error decays like exp(-n acosh(1/sigma))
    width = math.acosh(1 / sigma) if sigma > 0 else 10.0
    n = max(n_min, int(math.ceil(80.0 / width)))
    n += n % 2
    return np.arange(n) * 2 * math.pi / n, 2 * math.pi / n


def _rho_nodes(emap, n=12):
    t, w = np.polynomial.legendre.leggauss(n)
    segs = [(0.0, emap.r), (emap.r, emap.R)]
    rho = np.concatenate([a + (b - a) * (t + 1) / 2 for a, b in segs])
    wr = np.concatenate([w * (b - a) / 2 for a, b in segs])
    return rho, wr


def mu1(emap: EccentricMap):
    """``(R - r)^2 int_r^R rho^3 phi'(rho)^2 drho`` (exact Gauss-Legendre)."""
    t, w = np.polynomial.legendre.leggauss(8)
    rho = emap.r + (emap.R - emap.r) * (t + 1) / 2
    val = np.sum(w * rho ** 3 * emap.phi.d1(rho) ** 2) * (emap.R - emap.r) / 2
    return float((emap.R - emap.r) ** 2 * val)


@dataclass(frozen=True)
class L2Identity:
    quadrature: float
    closed_form: float
    terms: tuple

    @property
    def rel_error(self):
        return abs(self.quadrature / self.closed_form - 1.0)

    @property
    def cancellation(self):
        """``|term2 + term3| / total``; vanishes after the radial integration by parts."""
        return abs(self.terms[1] + self.terms[2]) / abs(self.quadrature)


def l2_identity(emap: EccentricMap, sigma, sigma_dot=1.0) -> L2Identity:
    """Quadrature of ``int |grad psi|^2`` on the pulled-back annulus versus ``mu1 nu1 sigma'^2``."""
    _check(sigma)
    gdot = sigma_dot * (emap.R - emap.r)
    rho, wr = _rho_nodes(emap)
    th, wt = _theta_grid(sigma)
    P, T = np.meshgrid(rho, th, indexing="ij")
    W = np.outer(wr, np.full_like(th, wt))
    g1, g2 = grad_psi_ref(emap, sigma, gdot, P, T)
    total = float(np.sum(W * (g1 ** 2 + g2 ** 2) * emap.jacobian(sigma, P, T)))
    # the three printed pieces of the integrand, times J_F
    phi = emap.phi
    s, c = np.sin(T), np.cos(T)
    q = 1 - sigma * c
    pre = gdot ** 2 / q
    t1 = pre * P ** 3 * phi.d1(P) ** 2 * s ** 2
    t2 = pre * P ** 2 * 2 * phi(P) * phi.d1(P) * s ** 2 * q
    t3 = pre * P * phi(P) ** 2 * q ** 2
    terms = tuple(float(np.sum(W * t)) for t in (t1, t2, t3))
    return L2Identity(total, mu1(emap) * nu1(sigma) * sigma_dot ** 2, terms)


def laplacian_norm_squared(emap: EccentricMap, sigma, sigma_dot=1.0):
    """``||Delta psi||^2_{L^2}`` by pulled-back quadrature of the closed form."""
    _check(sigma)
    gdot = sigma_dot * (emap.R - emap.r)
    rho, wr = _rho_nodes(emap)
    th, wt = _theta_grid(sigma)
    P, T = np.meshgrid(rho, th, indexing="ij")
    lap = laplacian_psi_ref(emap, sigma, gdot, P, T)
    return float(np.sum(np.outer(wr, np.full_like(th, wt)) * lap ** 2 * emap.jacobian(sigma, P, T)))


def laplacian_scaling(emap: EccentricMap, eps=None):
    """Log-log slope of ``||Delta psi||^2`` against ``1 - sigma^2``.

    Returns ``(slope, eps, values)``.
    """
    eps = np.geomspace(1e-3, 1e-6, 7) if eps is None else np.asarray(eps, dtype=float)
    sig = np.sqrt(1 - eps)
    vals = np.array([laplacian_norm_squared(emap, s) for s in sig])
    slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
    return float(slope), eps, vals


@dataclass(frozen=True)
class Admissibility:
    sup_dsigma: float
    l1_singular: float
    l2_ddsigma: float
    l1_finite: bool
    l2_finite: bool
    l1_growth: float

    @property
    def admissible(self):
        return math.isfinite(self.sup_dsigma) and self.l1_finite and self.l2_finite


def _excised_integrals(f, T, t_star, deltas):
    # substitute t = t_star -+ exp(u) so each side is smooth in u
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for d in deltas:
            total = 0.0
            for sign, span in ((-1.0, t_star), (1.0, T - t_star)):
                g = lambda u: f(t_star + sign * math.exp(u)) * math.exp(u)
                total += integrate.quad(g, math.log(d), math.log(span), epsrel=1e-12,
                                        epsabs=0, limit=400)[0]
            out.append(total)
    return np.array(out)


def _finite_limit(vals, deltas, rtol=1e-6):
    # a convergent improper integral changes by o(1) as the excision shrinks
    incr = np.abs(np.diff(vals))
    growth = np.polyfit(np.log(deltas[-4:]), np.log(np.maximum(vals[-4:], 1e-300)), 1)[0]
    return bool(incr[-1] <= rtol * max(1.0, abs(vals[-1]))), float(-growth)


def admissibility(family: SigmaFamily, n_sample=20001) -> Admissibility:
    """The three functionals behind the energy, dissipation and time-derivative bounds.

    ``sup |sigma'|`` is sampled, the improper integrals
    ``int (1 - sigma^2)^(-3/2) sigma'^2`` and ``int sigma''^2`` are
    evaluated with a shrinking excision around the contact time; an integral
    is declared finite when the last refinement changes it by less than
    ``1e-6`` relative.  ``l1_growth`` is the fitted blow-up exponent
    ``p`` in ``I(delta) ~ delta^-p`` (zero for convergent integrals).
    """
    T, ts = family.T, family.t_star
    t = np.linspace(0, T, n_sample)
    sup_d = float(np.max(np.abs(family.dsigma(t))))

    def singular(x):
        om = float(family.one_minus(x))
        sig = 1.0 - om
        if om <= 0:
            return 0.0
        return float(family.dsigma(x)) ** 2 / (om * (1 + sig)) ** 1.5

    deltas = np.geomspace(1e-2, 1e-8, 7)
    v1 = _excised_integrals(singular, T, ts, deltas)
    v2 = _excised_integrals(lambda x: float(family.ddsigma(x)) ** 2, T, ts, deltas)
    f1, g1 = _finite_limit(v1, deltas)
    f2, _ = _finite_limit(v2, deltas)
    return Admissibility(sup_d, float(v1[-1]), float(v2[-1]), f1, f2, g1 if not f1 else 0.0)
