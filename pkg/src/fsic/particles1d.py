"""Point masses in a one-dimensional viscous Burgers fluid.

The system is

    u_t + kappa (u^2)_x - u_xx = 0    between the particles,
    h_i' = u(t, h_i),    m_i h_i'' = [u_x](t, h_i).

Multiplying by a continuous test function and integrating over the line
turns the jump condition into a point mass, so a P1 finite element method
with the particles as mesh nodes solves the coupled problem with the
augmented mass matrix ``M + diag(m_i)``.  Every fluid interval is mapped
affinely onto a fixed reference grid (ALE).  Diffusion and the ALE flux
are implicit, convection is linearized around the old velocity in skew
form, so the discrete energy

    E = sum_i m_i h_i'^2 / 2 + int u^2 / 2

satisfies ``E^{n+1} = E^n - |U^{n+1}-U^n|^2/2 - dt int |u_x^{n+1}|^2``.
The scheme is first order in time and second order in space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import linalg, optimize


class IncompatibleData(ValueError):
    def __init__(self, index, residual):
        super().__init__(f"u0(h_{index}) differs from the particle velocity by {residual:.3e}")
        self.index = index
        self.residual = residual


class StepUnderflow(RuntimeError):
    def __init__(self, t, dt, gaps):
        super().__init__(f"step size underflow at t={t:.6g} (dt={dt:.3e}, min gap={min(gaps):.3e})")
        self.t = t
        self.dt = dt
        self.gaps = gaps


@dataclass(frozen=True)
class Mesh1D:
    """Reference coordinates of every fluid interval.

    ``ref[i]`` holds increasing values in [0, 1]; interval ``I_i`` is the
    affine image of ``ref[i]``.
    """

    ref: tuple

    def nodes(self, h, L):
        ends = np.concatenate([[-L], h, [L]])
        parts = [ends[i] + (ends[i + 1] - ends[i]) * s[:-1] for i, s in enumerate(self.ref)]
        return np.concatenate(parts + [[L]])

    def particle_index(self):
        sizes = np.array([len(s) - 1 for s in self.ref])
        return np.cumsum(sizes)[:-1]


def _graded(n, first, length):
    """``n`` cells on [0, 1] growing geometrically from ``first/length``."""
    d0 = first / length
    if d0 * n >= 1.0:
        return np.linspace(0.0, 1.0, n + 1)
    # the largest cell alone cannot exceed the interval: q <= d0^(-1/(n-1))
    q = optimize.brentq(lambda q: d0 * (q ** n - 1) / (q - 1) - 1.0, 1.0 + 1e-12,
                        d0 ** (-1.0 / (n - 1)))
    return np.concatenate([[0.0], np.cumsum(d0 * q ** np.arange(n))]) / (d0 * (q ** n - 1) / (q - 1))


def build_mesh(h, L, cells):
    """Uniform cells between particles, geometric grading in the outer intervals."""
    h = np.asarray(h, dtype=float)
    inner = [np.linspace(0.0, 1.0, cells + 1) for _ in range(len(h) - 1)]
    dx = min(np.diff(h)) / cells if len(h) > 1 else 1.0 / cells
    left_len, right_len = h[0] + L, L - h[-1]
    right = _graded(cells, dx, right_len)
    left = 1.0 - _graded(cells, dx, left_len)[::-1]
    return Mesh1D(tuple([left] + inner + [right]))


@dataclass
class State1D:
    t: float
    x: np.ndarray
    u: np.ndarray
    masses: np.ndarray
    kappa: float
    L: float
    mesh: Mesh1D = field(repr=False)

    @property
    def idx(self):
        return self.mesh.particle_index()

    @property
    def h(self):
        return self.x[self.idx]

    @property
    def v(self):
        return self.u[self.idx]

    @property
    def gaps(self):
        return np.diff(self.h)

    def energy(self):
        dx = np.diff(self.x)
        u0, u1 = self.u[:-1], self.u[1:]
        fluid = np.sum(dx * (u0 * u0 + u0 * u1 + u1 * u1)) / 6.0
        return float(fluid + 0.5 * np.sum(self.masses * self.v ** 2))

    def slopes(self):
        return np.diff(self.u) / np.diff(self.x)

    def grad_sup(self):
        return float(np.max(np.abs(self.slopes())))

    def dissipation(self):
        return float(np.sum(self.slopes() ** 2 * np.diff(self.x)))


def init(u0: Callable, h0, v0, masses, kappa=1.0, L=None, cells=64, support=None, tol=1e-12):
    """Discrete state from initial data; checks ``u0(h_i) = v_i``.

    ``L`` defaults to twenty times the support radius of ``u0`` (given by
    ``support``, or the particle extent plus one).
    """
    h0 = np.atleast_1d(np.asarray(h0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    masses = np.broadcast_to(np.asarray(masses, dtype=float), h0.shape).copy()
    if np.any(np.diff(h0) <= 0):
        raise ValueError("particle positions must be strictly increasing")
    if np.any(masses <= 0):
        raise ValueError("masses must be positive")
    for i, (hi, vi) in enumerate(zip(h0, v0)):
        res = abs(float(u0(hi)) - vi)
        if res > tol:
            raise IncompatibleData(i, res)
    if L is None:
        rad = support if support is not None else float(np.max(np.abs(h0))) + 1.0
        L = 20.0 * rad
    if np.any(np.abs(h0) >= L):
        raise ValueError("particles must lie inside (-L, L)")
    mesh = build_mesh(h0, L, cells)
    x = mesh.nodes(h0, L)
    u = np.asarray(u0(x), dtype=float)
    u[0] = u[-1] = 0.0
    u[mesh.particle_index()] = v0
    return State1D(0.0, x, u, masses, float(kappa), float(L), mesh)


def _tridiag(x, masses, idx, u_old, w, dt, kappa):
    """Banded system ``(M + P + dt (K + B(u_old) - G(w)))`` and the matrix ``M + P``."""
    n = len(x)
    ell = np.diff(x)
    a = u_old
    # element contributions, rows = test node, cols = trial node
    m_d, m_o = ell / 3.0, ell / 6.0
    k_d, k_o = 1.0 / ell, -1.0 / ell
    b = kappa * (a[:-1] + a[1:]) / 3.0          # skew convection [[0, b], [-b, 0]]
    w0, w1 = w[:-1], w[1:]
    g00, g01 = (2 * w0 + w1) / 6.0, (w0 + 2 * w1) / 6.0   # ALE flux, row 1 is -row 0

    diag = np.zeros(n)
    upper = np.zeros(n - 1)
    lower = np.zeros(n - 1)
    mass_d = np.zeros(n)
    # local (0,0), (1,1)
    diag[:-1] += m_d + dt * (k_d - g00)
    diag[1:] += m_d + dt * (k_d + g01)
    upper += m_o + dt * (k_o + b - g01)
    lower += m_o + dt * (k_o - b + g00)
    mass_d[:-1] += m_d
    mass_d[1:] += m_d
    diag[idx] += masses
    mass_d[idx] += masses
    return diag, upper, lower, mass_d, m_o


def step(state: State1D, dt: float, dt_min=1e-12) -> tuple[State1D, float]:
    """One ALE step; halves ``dt`` until the particle ordering is kept.

    Returns the new state and the step actually taken.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    idx = state.idx
    while True:
        h_new = state.h + dt * state.v
        if np.all(np.diff(h_new) > 0) and np.all(np.abs(h_new) < state.L):
            break
        dt *= 0.5
        if dt < dt_min:
            raise StepUnderflow(state.t, dt, state.gaps)
    x_new = state.mesh.nodes(h_new, state.L)
    w = (x_new - state.x) / dt
    n = len(x_new)
    diag, up, lo, _, _ = _tridiag(x_new, state.masses, idx, state.u, w, dt, state.kappa)
    # right-hand side (M^n + P) U^n on the old mesh
    ell = np.diff(state.x)
    u = state.u
    rhs = np.zeros(n)
    rhs[:-1] += ell / 3.0 * u[:-1] + ell / 6.0 * u[1:]
    rhs[1:] += ell / 6.0 * u[:-1] + ell / 3.0 * u[1:]
    rhs[idx] += state.masses * u[idx]
    # homogeneous Dirichlet data at +-L: solve on interior nodes
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = up[1:-1]
    ab[1] = diag[1:-1]
    ab[2, :-1] = lo[1:-1]
    u_new = np.zeros(n)
    u_new[1:-1] = linalg.solve_banded((1, 1), ab, rhs[1:-1])
    return replace(state, t=state.t + dt, x=x_new, u=u_new), dt


def gradient_jumps(state: State1D):
    """``[u_x](h_i)`` from one-sided second-order three-point stencils."""
    x, u = state.x, state.u
    out = []
    for j in state.idx:
        right = _one_sided(x[j:j + 3], u[j:j + 3])
        left = _one_sided(x[j - 2:j + 1][::-1], u[j - 2:j + 1][::-1])
        out.append(right - left)
    return np.array(out)


def _one_sided(x, u):
    # derivative at x[0] of the parabola through three points (signed step)
    h1, h2 = x[1] - x[0], x[2] - x[0]
    return (u[1] - u[0]) * h2 / (h1 * (h2 - h1)) - (u[2] - u[0]) * h1 / (h2 * (h2 - h1))


@dataclass
class History:
    t: np.ndarray
    h: np.ndarray
    v: np.ndarray
    energy: np.ndarray
    grad_sup: np.ndarray
    dissipation: np.ndarray
    final: State1D = field(repr=False)

    @property
    def gaps(self):
        return np.diff(self.h, axis=1)

    @property
    def min_gap(self):
        return self.gaps.min(axis=1) if self.h.shape[1] > 1 else np.full(len(self.t), np.inf)


def simulate(state: State1D, T: float, dt: float) -> History:
    """March to ``T`` recording every accepted step."""
    rec = [(state.t, state.h.copy(), state.v.copy(), state.energy(), state.grad_sup(),
            state.dissipation())]
    while state.t < T - 1e-12 * max(1.0, T):
        state, _ = step(state, min(dt, T - state.t))
        rec.append((state.t, state.h.copy(), state.v.copy(), state.energy(), state.grad_sup(),
                    state.dissipation()))
    cols = list(zip(*rec))
    return History(np.array(cols[0]), np.array(cols[1]), np.array(cols[2]), np.array(cols[3]),
                   np.array(cols[4]), np.array(cols[5]), state)


@dataclass(frozen=True)
class Diagnostics:
    min_gap: float
    energy_increase: float
    grad_l2linf: float
    envelope: np.ndarray
    envelope_ok: bool


def diagnostics(hist: History, pair=(0, 1)) -> Diagnostics:
    """Gap, energy audit, ``int ||u_x||_inf^2 dt`` and the backward Groenwall envelope.

    The envelope ``g(T) exp(-sum_{k >= n} dt_k ||u_x^k||_inf)`` uses the
    left-point rule, matching the explicit particle update, for which
    ``g^{k+1} <= g^k (1 + dt_k ||u_x^k||_inf)`` holds exactly.
    """
    if len(hist.t) < 2:
        raise ValueError("need at least two recorded steps")
    dt = np.diff(hist.t)
    gap = hist.h[:, pair[1]] - hist.h[:, pair[0]]
    lk = hist.grad_sup[:-1]
    rev = np.concatenate([np.cumsum((dt * lk)[::-1])[::-1], [0.0]])
    env = gap[-1] * np.exp(-rev)
    ok = bool(np.all(gap >= env * (1 - 1e-12)))
    inc = float(np.max(np.diff(hist.energy)))
    return Diagnostics(float(np.min(hist.min_gap)), inc, float(np.sum(dt * lk ** 2)), env, ok)


@dataclass(frozen=True)
class InterpCheck:
    lhs: float
    rhs: float
    l2: float
    l2_deriv: float
    jump_sum: float

    @property
    def holds(self):
        return self.lhs <= self.rhs * (1 + 1e-12)

    @property
    def margin(self):
        return self.rhs - self.lhs


def interp_inequality_check(pieces) -> InterpCheck:
    """``||f||_inf^2 <= 2 ||f|| ||f'_reg|| + 2 ||f||_inf sum |a_i|``.

    ``pieces`` is a sequence of ``(x, f)`` arrays describing a piecewise
    linear function that vanishes outside their union; the jumps ``a_i``
    include the ones at the two outer ends.  All norms are exact for the
    piecewise linear function.
    """
    l2 = d2 = 0.0
    sup = 0.0
    jumps = []
    prev = 0.0
    for x, f in pieces:
        x = np.asarray(x, dtype=float)
        f = np.asarray(f, dtype=float)
        ell = np.diff(x)
        l2 += float(np.sum(ell * (f[:-1] ** 2 + f[:-1] * f[1:] + f[1:] ** 2)) / 3.0)
        d2 += float(np.sum(np.diff(f) ** 2 / ell))
        sup = max(sup, float(np.max(np.abs(f))))
        jumps.append(f[0] - prev)
        prev = f[-1]
    jumps.append(-prev)
    js = float(np.sum(np.abs(jumps)))
    rhs = 2 * math.sqrt(l2) * math.sqrt(d2) + 2 * sup * js
    return InterpCheck(sup ** 2, rhs, math.sqrt(l2), math.sqrt(d2), js)


def gradient_pieces(state: State1D):
    """Recovered ``u_x`` on every fluid interval (jumps only at particles)."""
    ends = np.concatenate([[0], state.idx, [len(state.x) - 1]])
    out = []
    for a, b in zip(ends[:-1], ends[1:]):
        x, u = state.x[a:b + 1], state.u[a:b + 1]
        s = np.diff(u) / np.diff(x)
        g = np.empty(len(x))
        g[1:-1] = 0.5 * (s[:-1] + s[1:])
        g[0] = _one_sided(x[:3], u[:3]) if len(x) > 2 else s[0]
        g[-1] = _one_sided(x[-3:][::-1], u[-3:][::-1]) if len(x) > 2 else s[-1]
        out.append((x, g))
    return out


# benchmark configuration: two particles approaching each other

def benchmark_u0(gap=0.5, speed=1.0, width=1.0):
    """Odd W^{1,2} profile: linear between the particles, linear decay outside."""
    hh = gap / 2

    def u0(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        inner = -speed * x / hh
        outer = -np.sign(x) * speed * np.clip(1 - (ax - hh) / width, 0.0, None)
        return np.where(ax <= hh, inner, outer)

    return u0, hh + width


def benchmark_state(cells=64, kappa=1.0, mass=1.0, gap=0.5, speed=1.0):
    u0, rad = benchmark_u0(gap, speed)
    return init(u0, [-gap / 2, gap / 2], [speed, -speed], mass, kappa, support=rad, cells=cells)


def l2_difference(a: State1D, b: State1D, n=20001):
    """L^2 distance of two discrete solutions sampled on a common grid."""
    x = np.linspace(-min(a.L, b.L), min(a.L, b.L), n)
    d = np.interp(x, a.x, a.u) - np.interp(x, b.x, b.u)
    return float(math.sqrt(np.trapezoid(d * d, x)))
