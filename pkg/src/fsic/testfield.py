"""Explicit divergence-free test fields for a body close to a wall.

The fields are generated from a stream function ``phi``:

* 3D (axisymmetric, cylindrical ``(r, z)``): ``w = -phi_z e_r + (1/r) d_r(r phi) e_z``
  with ``phi = (r/2) G(r, z)``;
* 2D (``(x, z)``, mirrored in ``x``): ``w = (-phi_z, phi_x)`` with ``phi = x G(x, z)``.

``G = 1`` on the body and ``G = 0`` on the wall.  In the thin film
``r <= r0`` below the body we use ``G = Phi(z / psi_h(r))`` with
``Phi(t) = t^2 (3 - 2t)`` (no-slip) or a cubic slip profile.  On
``r0 <= r <= 1.5 r0`` the film profile is blended by a C^2 radial cutoff
``chi`` into ``S((z - h) / psi_0(r))``, a smoothstep that moves rigidly with
the body; beyond ``1.5 r0`` the field is this rigid translate only, so it
contributes an h-independent amount to every integral and is left out of
the "full" region.

Exact derivatives are obtained symbolically once per configuration and
compiled to numpy functions.
"""
from __future__ import annotations

import functools
import warnings
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy import integrate

from .geometry import SPHERICAL, ShapeProfile

NOSLIP_2D = "NoSlip2D"
NOSLIP_3D = "NoSlip3D"
SLIP_3D = "Slip3D"
VARIANTS = (NOSLIP_2D, NOSLIP_3D, SLIP_3D)

INNER, OUTER, FULL = "inner", "outer", "full"
_PIECES = {INNER: ("inner",), OUTER: ("low", "high"), FULL: ("inner", "low", "high")}

# stay clear of the pole of sqrt(1-r^2)/(1-2r^2) in the slip coefficients
_SLIP_RMAX = 1.0 / np.sqrt(2.0) - 0.05


class ConditioningError(ValueError):
    """Slip coefficients requested too close to r = 1/sqrt(2)."""


@dataclass(frozen=True)
class TestFieldSpec:
    """Configuration of a test field.

    ``profile.h`` is ignored; the gap is passed to every evaluation.
    Slip lengths must be positive for the slip variant.
    """

    __test__ = False

    profile: ShapeProfile
    variant: str = NOSLIP_3D
    beta_s: float = 0.0
    beta_omega: float = 0.0
    mu: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        want_d = 2 if self.variant == NOSLIP_2D else 3
        if self.profile.d != want_d:
            raise ValueError(f"{self.variant} needs a {want_d}D profile")
        if self.mu <= 0:
            raise ValueError("viscosity must be positive")
        if self.variant == SLIP_3D:
            if self.profile.kind != SPHERICAL:
                raise ValueError("the slip field is built for the ball")
            if self.beta_s <= 0 or self.beta_omega <= 0:
                raise ValueError("slip lengths must be positive")
            if self.profile.r_max >= _SLIP_RMAX:
                raise ConditioningError(
                    f"1.5*r0 = {self.profile.r_max} too close to 1/sqrt(2)")

    @property
    def d(self):
        return self.profile.d

    @property
    def r0(self):
        return self.profile.r0

    def _args(self, h):
        return (h, self.profile.alpha, self.r0, self.mu,
                self.beta_s if self.beta_s > 0 else 1.0,
                self.beta_omega if self.beta_omega > 0 else 1.0)


# ---------------------------------------------------------------------------
# symbolic construction

_r, _z, _h, _a, _r0, _mu, _bs, _bo = sp.symbols("r z h alpha r0 mu beta_s beta_o",
                                               positive=True)
_ARGS = (_r, _z, _h, _a, _r0, _mu, _bs, _bo)


def _smoothstep(s):
    return s ** 3 * (10 - 15 * s + 6 * s ** 2)


def _psi_expr(kind, var=_r):
    if kind == SPHERICAL:
        return 1 + _h - sp.sqrt(1 - var ** 2)
    return _h + var ** (1 + _a)


def _slip_polys(psi, var=_r):
    k = sp.sqrt(1 - var ** 2) / (1 - 2 * var ** 2)
    a_o = psi / (_mu * _bo)
    a_s = (2 + 1 / (_mu * _bs)) * k * psi
    den = 12 + 4 * (a_s + a_o) + a_s * a_o
    p1 = 6 * (2 + a_s) / den
    p2 = 3 * (2 + a_s) * a_o / den
    p3 = -2 * (a_s + a_s * a_o + a_o) / den
    return a_s, a_o, p1, p2, p3


def _film_profile(variant, kind):
    psi = _psi_expr(kind)
    t = _z / psi
    if variant == SLIP_3D:
        _, _, p1, p2, p3 = _slip_polys(psi)
        return p1 * t + p2 * t ** 2 + p3 * t ** 3
    return t ** 2 * (3 - 2 * t)


def _stream(variant, kind, piece):
    g_in = _film_profile(variant, kind)
    chi = 1 - _smoothstep((_r - _r0) / (_r0 / 2))
    if piece == "inner":
        g = g_in
    elif piece == "low":
        g = chi * g_in
    else:
        psi0 = _psi_expr(kind) - _h
        g = chi * g_in + (1 - chi) * _smoothstep((_z - _h) / psi0)
    pref = _r if variant == NOSLIP_2D else _r / 2
    return pref * g, pref * g_in, chi


def _velocity(variant, phi):
    if variant == NOSLIP_2D:
        return -sp.diff(phi, _z), sp.diff(phi, _r)
    return -sp.diff(phi, _z), sp.diff(phi, _r) + phi / _r


@functools.lru_cache(maxsize=None)
def _compiled(variant, kind, piece, group):
    """Numpy function ``f(r, z, h, alpha, r0, mu, beta_s, beta_o)`` for a quantity group."""
    phi, phi_in, chi = _stream(variant, kind, piece)
    w1, w2 = _velocity(variant, phi)
    three = variant != NOSLIP_2D
    d = sp.diff
    if group == "w":
        exprs = [w1, w2]
    elif group == "dh":
        exprs = [d(w1, _h), d(w2, _h)]
    elif group == "grad":
        exprs = [d(w1, _r), d(w1, _z), d(w2, _r), d(w2, _z)]
        if three:
            exprs.append(w1 / _r)
    elif group == "div":
        exprs = [d(w1, _r) + d(w2, _z) + (w1 / _r if three else 0)]
    elif group == "phi":
        exprs = [phi, d(phi, _z), d(phi, _z, 2), d(phi, _r, _z)]
    elif group == "qdens":
        # z-independent third film derivative, weighted by the cutoff
        k = sp.diff(phi_in, _z, 3)
        exprs = [k if piece == "inner" else chi * k]
    elif group == "resid":
        k = sp.diff(phi_in, _z, 3)
        if piece != "inner":
            k = chi * k
        lap1 = d(w1, _r, 2) + d(w1, _z, 2)
        lap2 = d(w2, _r, 2) + d(w2, _z, 2)
        if three:
            lap1 += d(w1, _r) / _r - w1 / _r ** 2
            lap2 += d(w2, _r) / _r
        q_r = d(phi, _r, 2, _z) - k
        q_z = d(phi, _r, _z, 2)
        exprs = [lap1 - q_r, lap2 - q_z]
    else:
        raise ValueError(group)
    fn = sp.lambdify(_ARGS, exprs, modules="numpy", cse=True)

    def call(r, z, *params):
        r, z = np.broadcast_arrays(np.asarray(r, float), np.asarray(z, float))
        out = fn(r, z, *params)
        return [np.broadcast_to(np.asarray(o, float), r.shape) for o in out]

    return call


# ---------------------------------------------------------------------------
# point evaluation

@dataclass(frozen=True)
class FieldSample:
    """Field value at one point.

    ``value`` holds the in-plane components ``(w_r, w_z)`` in 3D (the
    azimuthal component vanishes identically) and ``(w_1, w_2)`` in 2D.
    ``gradient[i, j] = d_j w_i`` in the in-plane coordinates; in 3D
    ``hoop = w_r / r`` is the extra azimuthal entry of the gradient.
    """

    position: tuple
    value: np.ndarray
    gradient: np.ndarray
    dh_value: np.ndarray
    hoop: float = 0.0
    in_body: bool = False


def _piece_at(spec, h, r, z):
    if r <= spec.r0:
        return "inner"
    return "low" if z < h else "high"


def evaluate_field(spec: TestFieldSpec, h: float, position) -> FieldSample:
    """Evaluate ``w_h`` at ``(r, z)`` (3D) or ``(x, z)`` (2D).

    Points inside the body return the rigid velocity ``e_z``.  The modelled
    region is ``|x| <= 1.5 r0``, ``z >= 0``.
    """
    if h <= 0:
        raise ValueError("gap must be positive")
    x, z = map(float, position)
    sign = 1.0
    if spec.d == 2 and x < 0:
        sign, x = -1.0, -x
    if x < 0 or z < 0 or x > spec.profile.r_max:
        raise ValueError("position outside the modelled fluid region")
    prof = spec.profile.at(h)
    if z >= float(prof.psi(x)):
        return FieldSample((sign * x, z), np.array([0.0, 1.0]), np.zeros((2, 2)),
                           np.zeros(2), 0.0, True)
    # the axis is a removable singularity of the cylindrical formulas
    xe = max(x, 1e-9 * spec.r0)
    piece = _piece_at(spec, h, xe, z)
    args = spec._args(h)
    w = np.array(_compiled(spec.variant, prof.kind, piece, "w")(xe, z, *args),
                 dtype=float).ravel()
    g = np.array(_compiled(spec.variant, prof.kind, piece, "grad")(xe, z, *args),
                 dtype=float).ravel()
    dh = np.array(_compiled(spec.variant, prof.kind, piece, "dh")(xe, z, *args),
                  dtype=float).ravel()
    grad = np.array([[g[0], g[1]], [g[2], g[3]]])
    hoop = float(g[4]) if spec.d == 3 else 0.0
    if x == 0.0 and spec.d == 3:
        w[0] = 0.0
    if sign < 0:
        # phi is odd in x: w_1 odd, w_2 even
        w = w * np.array([-1.0, 1.0])
        dh = dh * np.array([-1.0, 1.0])
        grad = grad * np.array([[1.0, -1.0], [-1.0, 1.0]])
    return FieldSample((sign * x, z), w, grad, dh, hoop, False)


def divergence(spec, h, r, z):
    """Analytic divergence of the field at fluid points (vectorized)."""
    r = np.asarray(r, float)
    z = np.asarray(z, float)
    out = np.empty(np.broadcast(r, z).shape)
    rr, zz = np.broadcast_arrays(r, z)
    for piece in ("inner", "low", "high"):
        m = _piece_mask(spec, h, rr, zz, piece)
        if np.any(m):
            out[m] = _compiled(spec.variant, spec.profile.kind, piece, "div")(
                rr[m], zz[m], *spec._args(h))[0]
    return out


def _piece_mask(spec, h, r, z, piece):
    if piece == "inner":
        return r <= spec.r0
    if piece == "low":
        return (r > spec.r0) & (z < h)
    return (r > spec.r0) & (z >= h)


# ---------------------------------------------------------------------------
# quadrature

_GL = {n: np.polynomial.legendre.leggauss(n) for n in (6, 8, 10, 12, 16, 20, 24, 32)}


def _gauss(a, b, n):
    x, w = _GL[n]
    a = np.asarray(a, float)[..., None]
    b = np.asarray(b, float)[..., None]
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _radial_edges(spec, h, per_decade):
    r0 = spec.r0
    rc = h ** (1.0 / (1.0 + spec.profile.alpha))
    lo = min(rc, r0) * 1e-6
    n = max(int(np.ceil(per_decade * np.log10(r0 / lo))), 4)
    edges = np.concatenate([[0.0], np.geomspace(lo, r0, n)])
    if rc < r0:
        edges = np.unique(np.append(edges, rc))
    return edges


@dataclass(frozen=True)
class _Nodes:
    piece: str
    r: np.ndarray
    z: np.ndarray
    weight: np.ndarray


def _nodes(spec, h, region, level):
    """Tensor quadrature nodes for the requested region.

    ``level`` 0 is the working resolution, level 1 a coarser companion
    used for the error estimate.
    """
    per_decade, n_r, n_t = ((6, 12, 20), (4, 10, 16))[level]
    prof = spec.profile.at(h)
    measure = (lambda r: 2.0 * np.pi * r) if spec.d == 3 else (lambda r: 2.0 + 0.0 * r)
    out = []
    if "inner" in _PIECES[region]:
        e = _radial_edges(spec, h, per_decade)
        rr, wr = _gauss(e[:-1], e[1:], n_r)
        rr, wr = rr.ravel(), wr.ravel()
        t, wt = _gauss(0.0, 1.0, n_t)
        psi = prof.psi(rr)
        z = psi[:, None] * t.ravel()[None, :]
        w = (wr * psi * measure(rr))[:, None] * wt.ravel()[None, :]
        out.append(_Nodes("inner", np.repeat(rr, n_t), z.ravel(), w.ravel()))
    if region in (OUTER, FULL):
        e = np.linspace(spec.r0, prof.r_max, 5 - level)
        rr, wr = _gauss(e[:-1], e[1:], n_r)
        rr, wr = rr.ravel(), wr.ravel()
        psi = prof.psi(rr)
        base = wr * measure(rr)
        zl, wl = _gauss(np.zeros_like(rr), np.full_like(rr, h), 8)
        out.append(_Nodes("low", np.repeat(rr, 8), zl.ravel(),
                          (base[:, None] * wl).ravel()))
        zh, wh = _gauss(np.full_like(rr, h), psi, n_t)
        out.append(_Nodes("high", np.repeat(rr, n_t), zh.ravel(),
                          (base[:, None] * wh).ravel()))
    return out


def _integrate(spec, h, region, density):
    """Integrate ``density(piece, r, z) -> array`` with an error estimate."""
    vals = []
    for level in (0, 1):
        tot = 0.0
        for nd in _nodes(spec, h, region, level):
            tot += float(np.sum(nd.weight * density(nd.piece, nd.r, nd.z)))
        vals.append(tot)
    return vals[0], abs(vals[0] - vals[1])


def _fields(spec, h, piece, group, r, z):
    return _compiled(spec.variant, spec.profile.kind, piece, group)(r, z, *spec._args(h))


def _grad_sq(spec, h, piece, r, z):
    return sum(c * c for c in _fields(spec, h, piece, "grad", r, z))


def _sym_grad_sq(spec, h, piece, r, z):
    g = _fields(spec, h, piece, "grad", r, z)
    out = g[0] ** 2 + g[3] ** 2 + 0.5 * (g[1] + g[2]) ** 2
    if spec.d == 3:
        out = out + g[4] ** 2
    return out


@dataclass(frozen=True)
class NormValue:
    value: float
    error: float


def lq_norm(spec: TestFieldSpec, h: float, field: str = "w", q: float = 2.0,
            region: str = INNER, power: bool = False) -> NormValue:
    """``L^q`` norm of ``w``, ``grad w`` or ``d_h w`` over a region.

    With ``power=True`` the integral ``int |f|^q`` is returned instead of
    its ``q``-th root.  The error is the difference to a coarser rule.
    """
    if q < 1 or h <= 0:
        raise ValueError("need q >= 1 and h > 0")
    if region not in _PIECES:
        raise ValueError(f"unknown region {region!r}")

    def dens(piece, r, z):
        if field == "w":
            sq = sum(c * c for c in _fields(spec, h, piece, "w", r, z))
        elif field in ("grad_w", "grad", "∇w"):
            sq = _grad_sq(spec, h, piece, r, z)
        elif field in ("dh_w", "dh", "∂_h w"):
            sq = sum(c * c for c in _fields(spec, h, piece, "dh", r, z))
        else:
            raise ValueError(f"unknown field {field!r}")
        return sq ** (0.5 * q)

    val, err = _integrate(spec, h, region, dens)
    if not np.isfinite(val):
        raise FloatingPointError("quadrature produced a non-finite value")
    if power:
        return NormValue(val, err)
    root = val ** (1.0 / q)
    return NormValue(root, root * err / (q * val) if val > 0 else err)


# ---------------------------------------------------------------------------
# drag energy and pressure

@dataclass(frozen=True)
class DragEnergy:
    h: float
    value: float
    bulk: float
    body_boundary: float = 0.0
    wall_boundary: float = 0.0


def _boundary_terms(spec, h):
    """Slip penalties on the body and on the wall (3D slip variant)."""
    prof = spec.profile.at(h)
    e = _radial_edges(spec, h, 6)
    ri, wi = _gauss(e[:-1], e[1:], 12)
    eo = np.linspace(spec.r0, prof.r_max, 5)
    ro, wo = _gauss(eo[:-1], eo[1:], 12)
    body = 0.0
    wall = 0.0
    for piece_b, piece_w, rr, ww in (("inner", "inner", ri, wi), ("high", "low", ro, wo)):
        rr, ww = rr.ravel(), ww.ravel()
        slope = prof.dpsi(rr, 1)
        w1, w2 = _fields(spec, h, piece_b, "w", rr, prof.psi(rr))
        tang = (w1 + (w2 - 1.0) * slope) / np.sqrt(1.0 + slope ** 2)
        ds = 2.0 * np.pi * rr * np.sqrt(1.0 + slope ** 2)
        body += float(np.sum(ww * ds * tang ** 2))
        wr, _ = _fields(spec, h, piece_w, "w", rr, np.zeros_like(rr))
        wall += float(np.sum(ww * 2.0 * np.pi * rr * wr ** 2))
    return (1.0 + 1.0 / spec.beta_s) * body, wall / spec.beta_omega


def drag_energy(spec: TestFieldSpec, h: float) -> DragEnergy:
    """``int |grad w_h|^2`` over the film and transition zone, plus slip penalties.

    For the slip variant the penalties are ``(1 + 1/beta_S) int_{dS} |(w - e_z) x n|^2``
    and ``(1/beta_Omega) int_{wall} |w x n|^2``.
    """
    if h <= 0:
        raise ValueError("gap must be positive")
    bulk, _ = _integrate(spec, h, FULL, lambda p, r, z: _grad_sq(spec, h, p, r, z))
    body = wall = 0.0
    if spec.variant == SLIP_3D:
        body, wall = _boundary_terms(spec, h)
    return DragEnergy(h, bulk + body + wall, bulk, body, wall)


def _pressure_primitive(spec, h, r):
    """``int_0^r chi(t) K(t) dt`` with ``K`` the film's third z-derivative of phi."""
    kind = spec.profile.kind
    args = spec._args(h)

    def k(t):
        piece = "inner" if t <= spec.r0 else "high"
        return float(_compiled(spec.variant, kind, piece, "qdens")(t, 0.0, *args)[0])

    rc = h ** (1.0 / (1.0 + spec.profile.alpha))
    pts = [p for p in (rc, spec.r0) if 0 < p < r]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(k, 0.0, r, points=pts or None, limit=400,
                                epsabs=0.0, epsrel=1e-11)
    return val


def pressure_qh(spec: TestFieldSpec, h: float, position) -> float:
    """Companion pressure ``q_h = d^2_{xz} phi - int_0^x d^3_{zzz} phi``.

    The z-integral's integrand is the cubic film term, which does not
    depend on z, continued by the radial cutoff.  In 2D both terms are
    even in x.
    """
    if h <= 0:
        raise ValueError("gap must be positive")
    x, z = map(float, position)
    if spec.d == 2:
        x = abs(x)
    if x <= 0:
        x = 1e-12 * spec.r0
    prof = spec.profile.at(h)
    if x > prof.r_max or z < 0 or z > float(prof.psi(x)):
        raise ValueError("position outside the fluid region")
    piece = _piece_at(spec, h, x, z)
    phi_xz = float(_fields(spec, h, piece, "phi", x, z)[3])
    return phi_xz - _pressure_primitive(spec, h, x)


def remainder_n(spec: TestFieldSpec, h: float, region: str = FULL) -> float:
    """``n(h) = 2 int |D(w)|^2 + int (Lap w - grad q) . w``."""
    def dens(piece, r, z):
        w1, w2 = _fields(spec, h, piece, "w", r, z)
        r1, r2 = _fields(spec, h, piece, "resid", r, z)
        return 2.0 * _sym_grad_sq(spec, h, piece, r, z) + r1 * w1 + r2 * w2

    return _integrate(spec, h, region, dens)[0]


def residual_pairing(spec: TestFieldSpec, h: float, v, region: str = FULL):
    """``int (Lap w - grad q) . v`` for a vector field ``v(r, z) -> (v1, v2)``."""
    def dens(piece, r, z):
        r1, r2 = _fields(spec, h, piece, "resid", r, z)
        v1, v2 = v(r, z)
        return r1 * v1 + r2 * v2

    return _integrate(spec, h, region, dens)[0]


def residual(spec, h, r, z):
    """``Lap w_h - grad q_h`` at film points (vectorized, inner region)."""
    return _fields(spec, h, "inner", "resid", r, z)


def stream_data(spec, h, r, z):
    """``(phi, phi_z, phi_zz, phi_rz)`` at film points (vectorized, inner region)."""
    return _fields(spec, h, "inner", "phi", r, z)


@dataclass(frozen=True)
class SlipCoefficients:
    alpha_s: float
    alpha_omega: float
    p1: float
    p2: float
    p3: float
    c: float


def slip_polynomials(alpha_s, alpha_omega):
    """``(P1, P2, P3)`` of the slip film profile from the two slip ratios."""
    a_s = np.asarray(alpha_s, float)
    a_o = np.asarray(alpha_omega, float)
    den = 12.0 + 4.0 * (a_s + a_o) + a_s * a_o
    return (6.0 * (2.0 + a_s) / den, 3.0 * (2.0 + a_s) * a_o / den,
            -2.0 * (a_s + a_s * a_o + a_o) / den)


def slip_coefficients(spec: TestFieldSpec, h: float, r: float) -> SlipCoefficients:
    """Slip ratios, profile polynomials and the coefficient ``c(r)``.

    ``phi(r, z) = c (2 mu b_O z + z^2 - (2 mu b_O + psi) z^3 / psi^2) + (r/2)(z/psi)^3``.
    """
    if spec.variant != SLIP_3D:
        raise ValueError("slip coefficients need the Slip3D variant")
    if not 0 < r <= spec.r0:
        raise ValueError("radius outside (0, r0]")
    if 1.0 - 2.0 * r * r < 0.05:
        raise ConditioningError("r too close to 1/sqrt(2)")
    psi = float(spec.profile.at(h).psi(r))
    mbo = spec.mu * spec.beta_omega
    mbs = spec.mu * spec.beta_s
    k = np.sqrt(1.0 - r * r) / (1.0 - 2.0 * r * r)
    a_o = psi / mbo
    a_s = (2.0 + 1.0 / mbs) * k * psi
    p1, p2, p3 = slip_polynomials(a_s, a_o)
    kp = (2.0 * mbs + 1.0) * k * psi
    c = (3.0 * r / (2.0 * psi)) * (2.0 * mbs + kp) / (
        (4.0 * mbo + psi) * (4.0 * mbs + kp) - 4.0 * mbo * mbs)
    return SlipCoefficients(a_s, a_o, float(p1), float(p2), float(p3), float(c))


def slip_residuals(spec: TestFieldSpec, h: float, r):
    """Wall and body slip-condition residuals of the slip film profile.

    Returns ``(mu b_O phi_zz - phi_z)(r, 0)`` and
    ``(phi_zz + (2 + 1/(mu b_S)) K phi_z)(r, psi)`` with
    ``K = sqrt(1 - r^2) / (1 - 2 r^2)``.
    """
    r = np.asarray(r, float)
    psi = spec.profile.at(h).psi(r)
    _, pz0, pzz0, _ = stream_data(spec, h, r, np.zeros_like(r))
    _, pz1, pzz1, _ = stream_data(spec, h, r, psi)
    k = np.sqrt(1.0 - r * r) / (1.0 - 2.0 * r * r)
    wall = spec.mu * spec.beta_omega * pzz0 - pz0
    body = pzz1 + (2.0 + 1.0 / (spec.mu * spec.beta_s)) * k * pz1
    return wall, body
