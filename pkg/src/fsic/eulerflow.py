"""Potential-flow fall of a disk onto a wall.

The fluid domain outside the unit disk centred at ``(0, 1 + h)`` above the
half plane is sent by ``k(z) = (z - ia)/(z + ia)`` onto the annulus
``sigma < |w| < 1``.  The velocity potential then has the Laurent series

    F(w) = -2a sum_n sigma**(2n) / (1 - sigma**(2n)) (w**n + w**-n),

and the added-mass energy of the unit-speed flow is ``E(sigma)``.  The
Neumann datum on ``|w| = sigma`` carries the factor ``2a`` of the
conformal stretching; an older derivation of the same problem drops this
factor of two.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

E_ZERO_SIGMA = math.pi
E_CONTACT = math.pi ** 3 / 3.0 - math.pi
DAMPING_LIMIT = (math.pi ** 2 / 3.0 - 1.0) ** -0.5

# above this inner radius the alternative series replaces the primary one
_SWITCH_SIGMA = 0.9
_N_MAX = 20_000_000
_CHUNK = 1 << 16


class SeriesNotConverged(ArithmeticError):
    def __init__(self, message, partial, tail):
        super().__init__(f"{message} (partial={partial!r}, tail bound={tail!r})")
        self.partial = partial
        self.tail = tail


@dataclass(frozen=True)
class AnnulusMap:
    """Conformal transplant of the gap-``h`` configuration onto an annulus."""

    h: float
    a: float
    sigma: float

    def k(self, z):
        """Half plane to unit disk; the body boundary goes to ``|w| = sigma``."""
        z = np.asarray(z, dtype=complex)
        return (z - 1j * self.a) / (z + 1j * self.a)

    def k_inv(self, w):
        w = np.asarray(w, dtype=complex)
        return 1j * self.a * (1.0 + w) / (1.0 - w)

    def body_point(self, theta):
        """Point of the body boundary at polar angle ``theta`` about its centre."""
        return 1j * (1.0 + self.h) + np.exp(1j * np.asarray(theta, dtype=float))


def annulus_map(h) -> AnnulusMap:
    if not h > 0:
        raise ValueError("gap must be positive")
    h = float(h)
    # a = sqrt((1+h)^2 - 1) written without cancellation for small h
    a = math.sqrt(h * (2.0 + h))
    return AnnulusMap(h, a, 1.0 / (1.0 + h + a))


def sigma_to_a(sigma):
    return 0.5 * (1.0 / sigma - sigma)


def sigma_to_h(sigma):
    return 0.5 * (1.0 / sigma + sigma) - 1.0


def _check_sigma(sigma):
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")


def beta_hat(n, sigma):
    """Fourier coefficient ``2 a n sigma**n`` of the Neumann datum."""
    _check_sigma(sigma)
    n = np.asarray(n)
    if np.any(n < 1):
        raise ValueError("n must be at least 1")
    return 2.0 * sigma_to_a(sigma) * n * sigma ** n


def beta_theta(theta, sigma):
    """Neumann datum ``Re[F'(w) w]`` on ``|w| = sigma`` as a function of angle."""
    _check_sigma(sigma)
    a = sigma_to_a(sigma)
    c = np.cos(theta)
    return -2 * a * sigma * (2 * sigma - (1 + sigma ** 2) * c) / (1 + sigma ** 2 - 2 * sigma * c) ** 2


def beta_hat_quadrature(n, sigma):
    """``(1/pi) int_0^{2 pi} beta(theta) cos(n theta) dtheta`` by adaptive quadrature."""
    with warnings.catch_warnings():
        # tiny high-order coefficients hit the absolute rounding floor
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda t: beta_theta(t, sigma) * math.cos(n * t), 0.0,
                                2 * math.pi, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val / math.pi


def laurent_coefficient(n, sigma):
    """Coefficient of ``w**n`` (and ``w**-n``) in the potential."""
    _check_sigma(sigma)
    n = np.asarray(n, dtype=float)
    x = sigma * sigma
    return -2.0 * sigma_to_a(sigma) * x ** n / -np.expm1(n * math.log(x))


def potential_derivative(w, sigma, n_terms):
    """Truncated ``F'(w)``."""
    w = np.asarray(w, dtype=complex)
    n = np.arange(1, n_terms + 1, dtype=float)
    c = n * laurent_coefficient(n, sigma)
    # sum_n c_n (w^(n-1) - w^(-n-1))
    wn = w[..., None] ** (n - 1.0)
    return np.sum(c * (wn - 1.0 / (wn * w[..., None] ** 2)), axis=-1)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    order: int
    tail: float
    converged: bool
    form: str = "primary"
    other: float | None = field(default=None, compare=False)


def _primary(sigma, tol):
    x = sigma * sigma
    lead = 4.0 * math.pi * sigma_to_a(sigma) ** 2
    total = 0.0
    start = 1
    while start <= _N_MAX:
        n = np.arange(start, start + _CHUNK, dtype=float)
        xn = np.exp(n * math.log(x))
        terms = n * xn * (1 + xn) / (-np.expm1(n * math.log(x)))
        total += float(np.sum(terms))
        N = start + _CHUNK - 1
        xN1 = x ** (N + 1)
        # sum_{n>N} n x^n, times the largest remaining value of (1+x^n)/(1-x^n)
        tail = lead * xN1 * ((N + 1) - N * x) / (1 - x) ** 2 * (1 + xN1) / (1 - xN1)
        value = lead * total
        if tail < tol * abs(value) and lead * terms[-1] < tol * abs(value):
            return SeriesValue(value, N, tail, True, "primary")
        start = N + 1
    raise SeriesNotConverged("primary series", lead * total, tail)


def _alternative(sigma, tol):
    x = sigma * sigma
    lx = math.log(x)
    total = 0.0
    start = 1
    while start <= _N_MAX:
        n = np.arange(start, start + _CHUNK, dtype=float)
        s = np.exp((n - 1) * lx) * ((1 - x) / -np.expm1(n * lx)) ** 2
        total += float(np.sum(s))
        N = start + _CHUNK - 1
        # s_n <= min(x^(n-1), 1/n^2)
        tail = 2 * math.pi * min(math.exp(N * lx) / (1 - x), 1.0 / N)
        value = 2 * math.pi * total - math.pi
        if tail < tol * abs(value) and 2 * math.pi * s[-1] < tol * abs(value):
            return SeriesValue(value, N, tail, True, "alternative")
        start = N + 1
    raise SeriesNotConverged("alternative series", 2 * math.pi * total - math.pi, tail)


def energy(sigma, tol=1e-12) -> SeriesValue:
    """Added-mass energy ``E(sigma)`` with a rigorous truncation bound.

    Both series are summed and must agree.  The primary value is returned
    for ``sigma <= 0.9``, the alternative one (whose terms tend to
    ``1/n**2``) closer to contact.
    """
    _check_sigma(sigma)
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = _primary(sigma, tol)
    q = _alternative(sigma, tol)
    if abs(p.value - q.value) > 10 * tol * abs(q.value) + p.tail + q.tail:
        raise SeriesNotConverged("series forms disagree", p.value, abs(p.value - q.value))
    best = p if sigma <= _SWITCH_SIGMA else q
    alt = q if best is p else p
    return SeriesValue(best.value, best.order, best.tail, True, best.form, alt.value)


def energy_at_gap(h, tol=1e-12):
    """``E`` as a function of the gap; ``h = 0`` gives the contact value."""
    if h < 0:
        raise ValueError("gap must be non-negative")
    if h == 0:
        return E_CONTACT
    return energy(annulus_map(h).sigma, tol).value


def annulus_quadrature_energy(sigma, n_terms=None, n_theta=None, n_rho=None):
    """``int_{A_sigma} |F'(w)|**2 dw`` on a polar tensor grid.

    The angle uses the periodic trapezoidal rule, the radius Gauss-Legendre
    nodes; ``F'`` is the truncated Laurent series.
    """
    _check_sigma(sigma)
    x = sigma * sigma
    if n_terms is None:
        n_terms = int(math.ceil(40.0 / -math.log(x))) + 5
    n_theta = n_theta or 2 * (2 * n_terms + 8)
    n_rho = n_rho or max(64, 2 * n_terms)
    t, wt = np.polynomial.legendre.leggauss(n_rho)
    rho = sigma + (1 - sigma) * (t + 1) / 2
    wr = wt * (1 - sigma) / 2
    theta = np.arange(n_theta) * 2 * math.pi / n_theta
    n = np.arange(1, n_terms + 1, dtype=float)
    c = n * laurent_coefficient(n, sigma)
    pos = np.exp(1j * np.outer(theta, n - 1))
    neg = np.exp(-1j * np.outer(theta, n + 1))
    total = 0.0
    for r, w in zip(rho, wr):
        fp = pos @ (c * r ** (n - 1)) - neg @ (c * r ** (-n - 1))
        total += w * r * np.sum(np.abs(fp) ** 2) * 2 * math.pi / n_theta
    return float(total)


@dataclass(frozen=True)
class EulerTrajectory:
    t: np.ndarray
    h: np.ndarray
    hdot: np.ndarray
    contact_time: float
    impact_speed: float
    invariant: float

    @property
    def speed_ratio(self):
        return self.impact_speed / self.hdot[0]

    def conservation_error(self, m, rho_f):
        e = np.array([energy_at_gap(x) for x in self.h])
        inv = self.hdot ** 2 * (m + rho_f * e)
        return float(np.max(np.abs(inv / self.invariant - 1.0)))


class NoContact(ValueError):
    """Raised when the body is not moving towards the wall."""


def gap_speed(h, m, rho_f, h0, hdot0, e0=None):
    """``hdot = hdot0 sqrt((m + rho_F E(h0)) / (m + rho_F E(h)))``."""
    e0 = energy_at_gap(h0) if e0 is None else e0
    return hdot0 * math.sqrt((m + rho_f * e0) / (m + rho_f * energy_at_gap(h)))


def fall_ode(m, rho_f, h0, hdot0, n_out=50, rtol=1e-11) -> EulerTrajectory:
    """Gap history from the separable first integral.

    ``t(h) = int_h^{h0} ds / |hdot(s)|`` is evaluated by adaptive
    quadrature on geometric panels towards ``h = 0``.
    """
    if m <= 0 or rho_f < 0 or h0 <= 0:
        raise ValueError("need m > 0, rho_f >= 0, h0 > 0")
    if hdot0 >= 0:
        raise NoContact("the body is not moving towards the wall")
    e0 = energy_at_gap(h0)
    speed = lambda s: abs(gap_speed(s, m, rho_f, h0, hdot0, e0))
    hs = np.concatenate([h0 * np.geomspace(1.0, 1e-8, n_out - 1), [0.0]])
    t = np.zeros_like(hs)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for i in range(1, len(hs)):
            dt, _ = integrate.quad(lambda s: 1.0 / speed(s), hs[i], hs[i - 1],
                                   epsabs=0.0, epsrel=rtol, limit=200)
            t[i] = t[i - 1] + dt
    hdot = np.array([gap_speed(s, m, rho_f, h0, hdot0, e0) for s in hs])
    return EulerTrajectory(t, hs, hdot, float(t[-1]), float(hdot[-1]),
                           hdot0 ** 2 * (m + rho_f * e0))


def damping_bound(m, rho_f, h0):
    """Impact-to-initial speed ratio ``sqrt((m + rho_F E(h0))/(m + rho_F E(0)))``."""
    if m <= 0 or rho_f < 0 or h0 <= 0:
        raise ValueError("need m > 0, rho_f >= 0, h0 > 0")
    return math.sqrt((m + rho_f * energy_at_gap(h0)) / (m + rho_f * E_CONTACT))
