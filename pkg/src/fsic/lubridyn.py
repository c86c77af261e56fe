"""Reduced gap dynamics of a heavy body falling onto a wall.

The lubrication model is

    m h'' = -mu h' D(h) - (rho_S - rho_F) g |S|,        |S| = m / rho_S,

with a drag law ``D`` whose small-gap blow-up decides whether the gap
closes in finite time.  The Tresca part only evaluates the time sequence
and gap brackets of the corresponding contact argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .criteria import NO_SLIP, SLIP_BOTH, SLIP_MIXED, ContactParams
from .geometry import SPHERICAL, ShapeProfile

POWER, LOG, CONST = "PowerLaw", "Log", "Const"
H_CONTACT = 1e-10


class UnsupportedCase(ValueError):
    """No drag law is known for this configuration."""


class IntegrationFailure(RuntimeError):
    def __init__(self, message, state):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class DragLaw:
    """``D(h) = c h^-beta_hat`` (PowerLaw), ``c |log h|`` (Log) or ``c`` (Const)."""

    regime: str
    c: float = 1.0
    beta_hat: float = 0.0
    source: str = "analytic-case"

    def __post_init__(self):
        if self.regime not in (POWER, LOG, CONST):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.c < 0:
            raise ValueError("drag constant must be non-negative")

    def __call__(self, h):
        h = np.asarray(h, float)
        if self.regime == POWER:
            return self.c * h ** -self.beta_hat
        if self.regime == LOG:
            return self.c * np.abs(np.log(h))
        return self.c * np.ones_like(h)

    def shape(self, h):
        """Drag law with unit constant."""
        return DragLaw(self.regime, 1.0, self.beta_hat)(h)

    @property
    def exponent(self):
        """Effective blow-up exponent: contact is possible iff it is below one."""
        return self.beta_hat if self.regime == POWER else 0.0

    @property
    def allows_contact(self):
        return self.exponent < 1.0


def drag_law_for(params: ContactParams, profile: ShapeProfile, calibration=None,
                 h_grid=None) -> DragLaw:
    """Drag law of the covered cases.

    * no-slip, 3D: ``h^-(3a-1)/(1+a)`` for ``a > 1/3`` (ball: ``h^-1``),
      ``|log h|`` at ``a = 1/3``, bounded for ``a < 1/3``;
    * no-slip, 2D: ``h^-3a/(1+a)`` (ball: ``h^-3/2``);
    * slip on both boundaries, 3D ball: ``|log h|``;
    * slip on the body only, 3D ball: ``h^-1`` type gradient bound.

    ``calibration`` is an optional callable ``h -> D(h)`` (for instance the
    test-field drag energy); its samples on ``h_grid`` fix ``c`` by least squares.
    """
    a = profile.alpha
    bc = params.boundary
    ball = profile.kind == SPHERICAL or a == 1.0
    if bc == NO_SLIP and params.d == 3:
        if profile.kind == SPHERICAL:
            law = DragLaw(POWER, 6.0 * math.pi, 1.0)
        elif abs(a - 1.0 / 3.0) < 1e-12:
            law = DragLaw(LOG)
        elif a < 1.0 / 3.0:
            law = DragLaw(CONST)
        else:
            law = DragLaw(POWER, 1.0, (3.0 * a - 1.0) / (1.0 + a))
    elif bc == NO_SLIP:
        law = DragLaw(POWER, 1.0, 3.0 * a / (1.0 + a))
    elif bc == SLIP_BOTH and params.d == 3 and ball:
        law = DragLaw(LOG)
    elif bc == SLIP_MIXED and params.d == 3 and ball:
        law = DragLaw(POWER, 1.0, 1.0)
    else:
        raise UnsupportedCase(f"no drag law for {bc} in {params.d}D with alpha={a}")
    if calibration is None:
        return law
    h = np.geomspace(1e-3, 1e-6, 10) if h_grid is None else np.asarray(h_grid, float)
    vals = np.array([float(calibration(hi)) for hi in h])
    s = law.shape(h)
    c = float(np.dot(s, vals) / np.dot(s, s))
    return DragLaw(law.regime, c, law.beta_hat, "measured-from-testfield")


@dataclass(frozen=True)
class Contact:
    time: float
    speed: float
    kappa: float | None = None


@dataclass
class GapTrajectory:
    t: np.ndarray
    h: np.ndarray
    hdot: np.ndarray
    drag: np.ndarray
    contact: Contact | None = None
    energy_drift: float = 0.0
    status: str = "t_max"
    dense: object = field(default=None, repr=False)


def _weight(params):
    return (params.rho_s - params.rho_f) * params.g * params.m / params.rho_s


def integrate_fall(law: DragLaw, params: ContactParams, h0: float, hdot0: float,
                   t_max: float, h_contact: float = H_CONTACT, rtol: float = 1e-10,
                   n_tail: int = 400) -> GapTrajectory:
    """Integrate the lubrication ODE until contact or ``t_max``.

    The state is ``(log h, h')`` so the gap stays positive by construction;
    the stiff drag near contact is handled by an implicit Radau method.
    Contact is the event ``h = h_contact``.  When contact occurs, the
    trajectory is resampled densely in ``T* - t`` for rate fits.
    """
    if h0 <= 0 or t_max <= 0:
        raise ValueError("need h0 > 0 and t_max > 0")
    m = params.m
    force = _weight(params)
    mu = params.mu

    def rhs(t, y):
        h = math.exp(y[0])
        return [y[1] / h, (-mu * y[1] * float(law(h)) - force) / m]

    def hit(t, y):
        return y[0] - math.log(h_contact)

    hit.terminal = True
    hit.direction = -1
    sol = integrate.solve_ivp(rhs, (0.0, t_max), [math.log(h0), hdot0], method="Radau",
                              rtol=rtol, atol=[1e-12, 1e-12 * max(1.0, abs(hdot0))],
                              events=hit, dense_output=True)
    if sol.status == -1:
        raise IntegrationFailure(sol.message, (sol.t[-1], sol.y[:, -1]))
    t = sol.t
    y = sol.y
    contact = None
    status = "t_max"
    if sol.t_events[0].size:
        t_star = float(sol.t_events[0][0])
        y_star = sol.y_events[0][0]
        status = "contact"
        tau = np.geomspace(1e-9 * max(t_star, 1.0), t_star, n_tail)[::-1]
        extra = t_star - tau
        extra = extra[extra > 0]
        t = np.union1d(t, extra)
        y = sol.sol(t)
        t = np.append(t, t_star)
        y = np.column_stack([y, y_star])
        contact = Contact(t_star, float(y_star[1]))
    h = np.exp(y[0])
    hdot = y[1]
    # energy audit: kinetic + potential + dissipated work
    drag = np.asarray(law(h), float)
    diss = integrate.cumulative_trapezoid(mu * drag * hdot ** 2, t, initial=0.0)
    e = 0.5 * m * hdot ** 2 + force * h + diss
    drift = float(np.max(np.abs(e - e[0])) / max(t[-1], 1e-300))
    return GapTrajectory(t, h, hdot, drag, contact, drift, status, sol.sol)


@dataclass(frozen=True)
class ContactScan:
    """Crossing times of decreasing gap levels.

    Finite-time contact shows up as crossing times that accumulate.  Near
    contact ``h' ~ -c h^b``, so the increment between levels a factor
    ``f`` apart scales like ``f^(b-1)``: geometric shrinking for ``b < 1``,
    constant increments for exponential decay (``b = 1``), and for
    ``b > 1`` the deep levels are never reached before ``t_max``.
    """

    levels: tuple
    times: tuple
    ratios: tuple

    @property
    def exponent_estimate(self):
        """Effective ``b`` from the last increment ratio (``None`` if unreached)."""
        if not self.ratios:
            return None
        f = self.levels[-2] / self.levels[-1]
        r = max(self.ratios[-1], 1e-300)
        return 1.0 + math.log(r) / math.log(f)

    @property
    def finite_contact(self):
        if any(t is None for t in self.times):
            return False
        incr = np.diff(self.times)
        # increments at the integration noise floor count as accumulated
        if incr[-1] < 1e-8 * max(self.times[-1], 1.0):
            return True
        return all(r < 0.97 for r in self.ratios)

    @property
    def contact_time(self):
        return self.times[-1] if self.finite_contact else None


def contact_scan(law: DragLaw, params: ContactParams, h0: float, hdot0: float, t_max: float,
                 levels=(1e-6, 1e-8, 1e-10, 1e-12), rtol=1e-11) -> ContactScan:
    """Integrate once and record when the gap crosses each level."""
    levels = tuple(sorted(levels, reverse=True))
    m, mu, force = params.m, params.mu, _weight(params)

    def rhs(t, y):
        h = math.exp(y[0])
        return [y[1] / h, (-mu * y[1] * float(law(h)) - force) / m]

    events = []
    for k, lev in enumerate(levels):
        ev = (lambda lv: (lambda t, y: y[0] - math.log(lv)))(lev)
        ev.direction = -1
        ev.terminal = k == len(levels) - 1
        events.append(ev)
    sol = integrate.solve_ivp(rhs, (0.0, t_max), [math.log(h0), hdot0], method="Radau",
                              rtol=rtol, atol=[1e-13, 1e-13 * max(1.0, abs(hdot0))],
                              events=events)
    if sol.status == -1:
        raise IntegrationFailure(sol.message, (sol.t[-1], sol.y[:, -1]))
    times = tuple(float(te[0]) if te.size else None for te in sol.t_events)
    ratios = ()
    if all(t is not None for t in times):
        d = np.diff(times)
        ratios = tuple(float(b / a) if a > 0 else 0.0 for a, b in zip(d[:-1], d[1:]))
    return ContactScan(levels, times, ratios)


def fit_contact_rate(traj: GapTrajectory, eta: float | None = None, min_samples=20):
    """Exponent ``kappa`` of ``h ~ (T* - t)^kappa`` near contact.

    The fit uses the samples in one decade of ``h`` just above the contact
    buffer (``10^3`` times the final gap, or the smallest positive gap
    when the trajectory reaches zero).  With ``eta`` given, also returns
    whether ``kappa > eta``.
    """
    if traj.contact is None:
        raise ValueError("trajectory has no contact event")
    t_star = traj.contact.time
    h = np.asarray(traj.h)
    t = np.asarray(traj.t)
    h_end = h[-1]
    lo = 1e3 * h_end if h_end > 0 else h[h > 0].min()
    sel = (h >= lo) & (h <= 10.0 * lo) & (t < t_star)
    if sel.sum() < min_samples:
        raise ValueError("insufficient resolution near contact")
    kappa = float(np.polyfit(np.log(t_star - t[sel]), np.log(h[sel]), 1)[0])
    if eta is None:
        return kappa
    return kappa, kappa > eta


def h_beta_transform(h, beta):
    """``h^(1-beta)/(1-beta)``, or ``log h`` for ``beta = 1``."""
    h = np.asarray(h, float)
    if np.any(h <= 0):
        raise ValueError("h must be positive")
    out = np.log(h) if beta == 1 else h ** (1.0 - beta) / (1.0 - beta)
    return float(out) if out.ndim == 0 else out


def fit_exp_sqrt(t, h):
    """Fit ``log h = log C - a t - b sqrt(t)`` by least squares.

    Returns ``(C, a, b, r2)``.
    """
    t = np.asarray(t, float)
    y = np.log(np.asarray(h, float))
    A = np.column_stack([np.ones_like(t), -t, -np.sqrt(t)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    r2 = 1.0 - float(resid @ resid) / float(((y - y.mean()) ** 2).sum())
    return float(np.exp(coef[0])), float(coef[1]), float(coef[2]), r2


# ---------------------------------------------------------------------------
# Tresca contact sequence

@dataclass(frozen=True)
class TrescaSchedule:
    sigma: float
    h0: float
    g: float
    m: float
    c_sharp: float
    c_flat: float
    t: np.ndarray
    h: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    t_star_bound: float
    small_gap_ok: bool
    large_mass_ok: bool
    small_gap_ok_max: bool = False

    @property
    def admissible(self):
        return self.small_gap_ok and self.large_mass_ok

    @property
    def bracket_ok(self):
        return bool(np.all(self.lower <= self.h) and np.all(self.h <= self.upper))


def _mass_series(sigma, h0, tol=1e-15):
    q = 1.0 - sigma ** 2 / 32.0
    total = 0.0
    k = 0
    while True:
        term = q ** k * abs((k + 1) * math.log1p(-sigma) + math.log(h0 / 2.0))
        total += term
        k += 1
        if term < tol * total and k > 10:
            break
    return total


def _comparison_gap(h0, g, m, c_sharp, c_flat, t_end):
    """Gap from the equality case of the velocity inequality, started at rest.

    ``h' = -g t / 2 + C# g h0 + (C_b/m) int_0^t |log h|``; used as the
    representative value of ``h(t_n)``.  Returns a callable that is zero
    after the comparison gap closes.
    """
    def rhs(t, y):
        h = max(y[0], 1e-300)
        return [-0.5 * g * t + c_sharp * g * h0 + c_flat / m * y[1], abs(math.log(h))]

    def touch(t, y):
        return y[0]

    touch.terminal = True
    sol = integrate.solve_ivp(rhs, (0.0, t_end), [h0, 0.0], rtol=1e-12, atol=1e-16,
                              events=touch, method="DOP853", dense_output=True)
    t_last = sol.t[-1]

    def gap_at(t):
        return float(sol.sol(t)[0]) if t <= t_last else 0.0

    return gap_at


def tresca_schedule(h0, g, sigma, m, c_sharp, c_flat, n_max=50) -> TrescaSchedule:
    """Times ``t_n`` and gap brackets of the Tresca contact sequence.

    ``t_0 = sqrt(h0/g)/4``, ``t_{n+1} = t_n + sigma h(t_n) / (2 sqrt(g h0))``
    with ``h(t_n)`` taken from the comparison gap (equality in the velocity
    inequality).  Brackets ``(h0/2)(1-sigma)^n <= h(t_n) <= (3/2) h0 (1-sigma^2/32)^n``.
    ``t_star_bound`` sums the upper bracket as a geometric series.
    """
    if not 0 < sigma < 0.5:
        raise ValueError("sigma must lie in (0, 1/2)")
    if min(h0, g, m, c_sharp, c_flat) <= 0:
        raise ValueError("h0, g, m and the constants must be positive")
    n = np.arange(n_max + 1)
    q = 1.0 - sigma ** 2 / 32.0
    lower = 0.5 * h0 * (1.0 - sigma) ** n
    upper = 1.5 * h0 * q ** n
    caps = (2.0 / (3.0 * (1.0 + sigma)), 1.0 / ((32.0 * c_sharp) ** 2 * g))
    # both caps are needed for the induction (C# g h0 <= sqrt(g h0)/32);
    # with the maximum the second one would never bind
    small_gap_ok = h0 < min(caps)
    small_gap_ok_max = h0 < max(caps)
    s = _mass_series(sigma, h0)
    lhs = -math.sqrt(g * h0) / 32.0 + 3.0 * c_flat * sigma / (4.0 * m) * math.sqrt(h0 / g) * s
    large_mass_ok = lhs <= -sigma / 16.0 * math.sqrt(g * h0)

    step = sigma / (2.0 * math.sqrt(g * h0))
    t0 = 0.25 * math.sqrt(h0 / g)
    t_star_bound = t0 + step * 1.5 * h0 / (1.0 - q)
    # the schedule is sequential: h(t_n) fixes t_{n+1}
    gap_at = _comparison_gap(h0, g, m, c_sharp, c_flat, t_star_bound)
    ts = [t0]
    hs = []
    for _ in range(n_max + 1):
        hn = gap_at(ts[-1])
        hs.append(hn)
        ts.append(ts[-1] + step * hn)
    return TrescaSchedule(sigma, h0, g, m, c_sharp, c_flat, np.array(ts[:-1]), np.array(hs),
                          lower, upper, t_star_bound, small_gap_ok, large_mass_ok,
                          small_gap_ok_max)
