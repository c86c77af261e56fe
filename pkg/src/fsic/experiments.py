"""Registry of the reproducible acceptance experiments.

Every experiment returns a list of :class:`Check` records (value, target,
tolerance, verdict) and the data tables it produced.  The command line
front end writes the tables as CSV and the checks as a JSON report.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import asymptotics as asy
from . import collidingflow as cf
from . import criteria as cr
from . import eulerflow as eu
from . import lubridyn as lub
from . import particles1d as p1d
from . import testfield as tf
from .geometry import ShapeProfile


@dataclass(frozen=True)
class Check:
    name: str
    value: object
    target: object
    tol: float | None
    passed: bool

    def as_dict(self):
        return {"name": self.name, "value": _plain(self.value), "target": _plain(self.target),
                "tol": self.tol, "passed": bool(self.passed)}


def _plain(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_plain(v) for v in x]
    return x


def close(name, value, target, tol, relative=False):
    """Check ``|value - target| <= tol`` (relative to ``|target|`` if asked)."""
    err = abs(value - target)
    if relative:
        err /= abs(target)
    return Check(name, float(value), float(target), tol, bool(err <= tol))


def holds(name, flag, value=None):
    return Check(name, value if value is not None else bool(flag), True, None, bool(flag))


@dataclass(frozen=True)
class Table:
    name: str
    header: tuple
    rows: list


@dataclass
class Outcome:
    checks: list = field(default_factory=list)
    tables: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class Experiment:
    id: str
    title: str
    anchor: str
    budget: float
    func: Callable[[dict], Outcome]
    defaults: dict = field(default_factory=dict)

    def run(self, overrides=None) -> tuple[Outcome, float]:
        params = dict(self.defaults)
        params.update(overrides or {})
        t0 = time.perf_counter()
        out = self.func(params)
        wall = time.perf_counter() - t0
        out.checks.append(Check("runtime_s", wall, self.budget, None, wall < self.budget))
        return out, wall


REGISTRY: dict[str, Experiment] = {}


def experiment(id, title, anchor, budget, **defaults):
    def deco(f):
        REGISTRY[id] = Experiment(id, title, anchor, budget, f, defaults)
        return f
    return deco


# ---------------------------------------------------------------------------

REGIME_TRIPLES = (
    # power law
    (0.5, 0.0, 2.0), (1.0, 0.0, 1.0), (1.0, 1.0, 2.0),
    # logarithmic
    (1.0, 1.0, 1.0), (0.5, 0.5, 1.0), (1.0, 3.0, 2.0),
    # bounded
    (1.0, 3.0, 1.0), (1.0, 2.0, 1.0), (0.5, 2.0, 1.0),
)


@experiment("regime-table", "Regime table of the model gap integral",
            "lemma on int r^q / (h + r^(1+alpha))^s", 10.0)
def _regime_table(p):
    out = Outcome()
    rows = []
    for a, q, s in REGIME_TRIPLES:
        sw = asy.sweep(a, q, s)
        rows.append((a, q, s, sw.regime.tag, sw.regime.exponent, sw.fit.exponent,
                     sw.fit.branch, sw.fit.r2, sw.fit.log_r2))
        if sw.regime.tag == asy.POWER_LAW:
            out.checks.append(close(f"slope[{a},{q},{s}]", sw.fit.exponent,
                                    sw.regime.exponent, 0.05))
        else:
            out.checks.append(holds(f"{sw.regime.tag}[{a},{q},{s}]", sw.matches(),
                                    sw.fit.branch))
    out.tables.append(Table("regimes", ("alpha", "q", "s", "regime", "predicted_exponent",
                                        "fitted_exponent", "branch", "r2", "log_r2"), rows))
    return out


GRADIENT_CASES = ((3, 1.0), (3, 0.5), (2, 1.0))


def _spec(d, alpha):
    variant = tf.NOSLIP_3D if d == 3 else tf.NOSLIP_2D
    return tf.TestFieldSpec(ShapeProfile.power_law(alpha, d), variant)


@experiment("gradient-scaling", "Test-field gradient scaling",
            "lemma on ||grad w_h||^2 ~ h^-(3 alpha - (d-2))/(1+alpha)", 60.0,
            h_min=1e-10, h_max=1e-6, count=13)
def _gradient_scaling(p):
    out = Outcome()
    hs = np.geomspace(p["h_max"], p["h_min"], int(p["count"]))
    rows = []
    for d, a in GRADIENT_CASES:
        spec = _spec(d, a)
        vals = np.array([tf.lq_norm(spec, h, "grad_w", 2, tf.FULL, power=True).value for h in hs])
        slope = asy.fit_scaling(np.column_stack([hs, vals])).exponent
        target = -(3 * a - (d - 2)) / (1 + a)
        out.checks.append(close(f"slope[d={d},alpha={a}]", slope, target, 0.05))
        rows += [(d, a, h, v) for h, v in zip(hs, vals)]
    out.tables.append(Table("gradient_norms", ("d", "alpha", "h", "grad_w_l2_squared"), rows))
    return out


def increment_exponent(spec, q, hs):
    """Slope of ``log |I(h_k) - I(h_{k-1})|`` against ``log h`` for ``I = ||w_h||_q^q``.

    Positive slopes mean summable increments (a bounded norm), negative
    slopes a divergent one.
    """
    v = np.array([tf.lq_norm(spec, h, "w", q, tf.INNER, power=True).value for h in hs])
    dv = np.abs(np.diff(v))
    return float(np.polyfit(np.log(hs[1:]), np.log(dv), 1)[0]), v


@experiment("norm-threshold", "Sharpness of the L^q threshold q = 4 at alpha = 1",
            "lemma on bounds of w_h in L^q; remark: no collision for q >= 4", 60.0,
            samples=6, seed=7, h_min=1e-14, h_max=1e-2, count=25)
def _norm_threshold(p):
    out = Outcome()
    spec = _spec(3, 1.0)
    hs = np.geomspace(p["h_max"], p["h_min"], int(p["count"]))
    rng = np.random.default_rng(int(p["seed"]))
    k = int(p["samples"]) // 2
    qs = [3.9, 4.1] + list(rng.uniform(3.5, 3.95, k)) + list(rng.uniform(4.05, 4.5, k))
    rows = []
    for q in qs:
        e, v = increment_exponent(spec, q, hs)
        # predicted increment exponent (q+2)/(1+alpha) - (q-1) at alpha = 1
        target = 2.0 - q / 2.0
        bounded = e > 0
        out.checks.append(holds(f"{'bounded' if q < 4 else 'divergent'}[q={q:.4f}]",
                                bounded == (q < 4), e))
        rows.append((q, e, target, bool(bounded), v[-1]))
    out.tables.append(Table("increments", ("q", "increment_exponent", "predicted",
                                           "bounded", "norm_at_h_min"), rows))
    return out


@experiment("slip-algebra", "Slip film-profile algebra",
            "slip test field: P1 + P2 + P3 = 1, c(r) limit, slip boundary residuals", 5.0,
            samples=1000, seed=11)
def _slip_algebra(p):
    out = Outcome()
    rng = np.random.default_rng(int(p["seed"]))
    n = int(p["samples"])
    a_s = 10.0 ** rng.uniform(-6, 6, n)
    a_o = 10.0 ** rng.uniform(-6, 6, n)
    dev = float(np.max(np.abs(np.sum(tf.slip_polynomials(a_s, a_o), axis=0) - 1)))
    out.checks.append(Check("max|P1+P2+P3-1|", dev, 0.0, 1e-12, dev <= 1e-12))
    rows = []
    tiny = tf.TestFieldSpec(ShapeProfile.sphere(r0=0.4), tf.SLIP_3D, 1e-10, 1e-10)
    h = 1e-3
    worst = 0.0
    for r in np.linspace(0.02, 0.4, 12):
        c = tf.slip_coefficients(tiny, h, r).c
        psi = float(tiny.profile.at(h).psi(r))
        lim = 3 * r / (2 * psi ** 2)
        worst = max(worst, abs(c / lim - 1))
        rows.append((r, c, lim))
    out.checks.append(Check("c(r) vs 3r/(2 psi^2)", worst, 0.0, 1e-6, worst < 1e-6))
    spec = tf.TestFieldSpec(ShapeProfile.sphere(r0=0.4), tf.SLIP_3D, 1.0, 1.0)
    r = np.linspace(0.01, 0.4, 40)
    res = []
    # at smaller gaps the terms grow like 1/psi and rounding alone exceeds 1e-10
    for hh in (1e-1, 1e-2, 1e-3, 1e-4):
        wall, body = tf.slip_residuals(spec, hh, r)
        res.append(max(np.max(np.abs(wall)), np.max(np.abs(body))))
    out.checks.append(Check("slip residuals", float(max(res)), 0.0, 1e-10, max(res) < 1e-10))
    out.tables.append(Table("slip_limit", ("r", "c", "limit"), rows))
    return out


@experiment("drag-dichotomy", "Drag blow-up: ball no-slip, ball slip, flat cusp",
            "drag estimates for no-slip and Navier slip test fields", 120.0)
def _drag_dichotomy(p):
    out = Outcome()
    rows = []
    ball = tf.TestFieldSpec(ShapeProfile.sphere())
    hs = np.geomspace(1e-2, 1e-6, 9)
    d = np.array([tf.drag_energy(ball, h).value for h in hs])
    slope = asy.fit_scaling(np.column_stack([hs, d])).exponent
    out.checks.append(close("ball no-slip slope", slope, -1.0, 0.05))
    const = d[-1] * hs[-1] / (6 * math.pi)
    out.checks.append(close("ball no-slip h*D/(6 pi)", const, 1.0, 0.2))
    rows += [("ball-noslip", h, v) for h, v in zip(hs, d)]

    slip = tf.TestFieldSpec(ShapeProfile.sphere(r0=0.4), tf.SLIP_3D, 1.0, 1.0)
    hs2 = np.geomspace(1e-2, 1e-6, 13)
    d2 = np.array([tf.drag_energy(slip, h).value for h in hs2])
    fit = asy.fit_scaling(np.column_stack([hs2, d2]), log_branch=True)
    out.checks.append(Check("slip-both log R^2", fit.log_r2, 0.99, None, fit.log_r2 > 0.99))
    rows += [("ball-slip", h, v) for h, v in zip(hs2, d2)]

    cusp = _spec(3, 0.2)
    hs3 = np.geomspace(1e-6, 1e-8, 5)
    d3 = np.array([tf.drag_energy(cusp, h).value for h in hs3])
    var = float((d3.max() - d3.min()) / d3.min())
    out.checks.append(Check("alpha=0.2 variation", var, 0.0, 0.1, var < 0.1))
    rows += [("alpha0.2-noslip", h, v) for h, v in zip(hs3, d3)]
    out.tables.append(Table("drag", ("case", "h", "drag"), rows))
    return out


LUBRICATION_CASES = (
    ("noslip alpha=0.2", cr.NO_SLIP, 0.2),
    ("noslip alpha=1/3", cr.NO_SLIP, 1.0 / 3.0),
    ("noslip alpha=0.7", cr.NO_SLIP, 0.7),
    ("noslip alpha=0.9", cr.NO_SLIP, 0.9),
    ("noslip ball", cr.NO_SLIP, None),
    ("slip-both ball", cr.SLIP_BOTH, None),
    ("slip-mixed ball", cr.SLIP_MIXED, None),
)


@experiment("lubrication-dichotomy", "Finite-time contact iff the drag exponent is below one",
            "gap ODE m h'' + mu h' D(h) = -F; lower bound C exp(-a t - b sqrt t)", 60.0,
            h0=0.5, t_max=2000.0)
def _lubrication(p):
    out = Outcome()
    rows = []
    for name, bc, a in LUBRICATION_CASES:
        params = cr.ContactParams(boundary=bc)
        prof = ShapeProfile.sphere() if a is None else ShapeProfile.power_law(a)
        law = lub.drag_law_for(params, prof)
        scan = lub.contact_scan(law, params, p["h0"], 0.0, p["t_max"])
        expect = law.allows_contact
        out.checks.append(holds(f"{name}: contact={expect}", scan.finite_contact == expect,
                                scan.finite_contact))
        rows.append((name, law.regime, law.beta_hat, expect, scan.finite_contact,
                     scan.contact_time, scan.exponent_estimate))
    params = cr.ContactParams()
    law = lub.drag_law_for(params, ShapeProfile.sphere())
    traj = lub.integrate_fall(law, params, p["h0"], 0.0, 60.0)
    sel = traj.t > 1.0
    c, a, b, r2 = lub.fit_exp_sqrt(traj.t[sel], traj.h[sel])
    out.checks.append(Check("ball exp(-a t - b sqrt t) fit R^2", r2, 0.999, None,
                            r2 > 0.999 and c > 0 and a > 0))
    out.checks.append(holds("ball gap stays positive", bool(np.all(traj.h > 0))))
    rows.append(("ball exp-sqrt fit", "C,a,b", c, a, b, r2, None))
    out.tables.append(Table("lubrication", ("case", "regime", "beta_hat", "predicted_contact",
                                            "observed_contact", "contact_time",
                                            "exponent_estimate"), rows))
    return out


@experiment("starovoitov-rates", "Contact-rate algebra",
            "beta = 2 - (1+(d-1)/p)/(1+alpha) - 1/p and eta = (q-1)/q (d-alpha(p-1))/((1+alpha)p)",
            1.0)
def _starovoitov(p):
    out = Outcome()
    out.checks.append(close("beta(d=3,p=2,alpha=1)", cr.starovoitov_beta(1.0, 2, 3).beta, 0.5, 1e-12))
    out.checks.append(close("beta(d=3,p=2,alpha=1/3)", cr.starovoitov_beta(1 / 3, 2, 3).beta,
                            0.0, 1e-12))
    below = cr.starovoitov_beta(1 / 3 - 1e-6, 2, 3).beta
    above = cr.starovoitov_beta(1 / 3 + 1e-6, 2, 3).beta
    out.checks.append(holds("beta changes sign at alpha=1/3", below < 0 < above))
    out.checks.append(close("eta(d=3,p=2,q=2,alpha=1)", cr.starovoitov_rate(1.0, 2, 2, 3),
                            0.25, 1e-12))
    rows = [(a, cr.starovoitov_beta(a, 2, 3).beta, cr.starovoitov_rate(a, 2, 2, 3))
            for a in np.linspace(0, 1, 11)]
    out.tables.append(Table("rates", ("alpha", "beta", "eta"), rows))
    return out


@experiment("compressible-bounds", "Compressible collision window",
            "alpha < min{(3-p)/(2p-1), 3(4p gamma-3p-6 gamma)/(p gamma+3p+6 gamma)}", 5.0)
def _compressible(p):
    out = Outcome()
    b = cr.compressible_alpha_bound(6.0, 2.0, 3, True)
    out.checks.append(close("bound(gamma=6,p=2)", float(b), 1 / 3, 1e-15))
    out.checks.append(holds("infeasible(gamma=2,p=2)",
                            not cr.compressible_alpha_bound(2.0, 2.0, 3, True).feasible))
    rows = []
    ok = True
    for g in np.linspace(1.5, 12.0, 20):
        lo = g / (g - 1)
        for pp in np.linspace(lo, 3.0, 22)[1:-1]:
            f1 = cr.jedna_fraction(g, pp)
            f2 = cr.aa1_fraction(g, pp)
            f3 = 3 * (g - 1) / (g + 1)
            f4 = 3 * (g - 1)
            good = f1 <= f2 + 1e-12 and f2 <= f3 + 1e-12 and f3 <= f4 + 1e-12
            ok &= good
            rows.append((g, pp, f1, f2, f3, f4, good))
    out.checks.append(holds("ordering chain on 20x20 grid", ok, len(rows)))
    out.tables.append(Table("ordering", ("gamma", "p", "jedna", "aa1", "3(g-1)/(g+1)",
                                         "3(g-1)", "ordered"), rows))
    return out


@experiment("euler-energy", "Added-mass energy of the disk above a wall",
            "E(0) = pi, E(1) = pi^3/3 - pi, damping (pi^2/3 - 1)^(-1/2)", 30.0)
def _euler_energy(p):
    out = Outcome()
    e0 = eu.energy(1e-8).value
    out.checks.append(close("E(sigma->0)", e0, math.pi, 1e-6))
    e1 = eu.energy(0.999).value
    out.checks.append(close("E(0.999) vs pi^3/3 - pi", e1, eu.E_CONTACT, 0.01, relative=True))
    rows = [(1e-8, e0, None), (0.999, e1, None)]
    for s in (0.3, 0.6, 0.9):
        ser = eu.energy(s).value
        quad = eu.annulus_quadrature_energy(s)
        out.checks.append(close(f"series vs quadrature sigma={s}", quad, ser, 1e-6, relative=True))
        rows.append((s, ser, quad))
    ratio = eu.damping_bound(math.pi, 1e8, 1e6)
    out.checks.append(close("damping ratio", ratio, 0.66084, 1e-3))
    out.tables.append(Table("energies", ("sigma", "series", "quadrature"), rows))
    return out


@experiment("euler-collision", "Inviscid fall reaches the wall",
            "|h'|^2 (m + rho_F E(h)) conserved; impact speed ratio", 5.0,
            m=math.pi, rho_f=1.0, h0=1.0, hdot0=-1.0)
def _euler_collision(p):
    out = Outcome()
    m, rf, h0, v0 = p["m"], p["rho_f"], p["h0"], p["hdot0"]
    traj = eu.fall_ode(m, rf, h0, v0, n_out=30)
    out.checks.append(holds("finite contact time", math.isfinite(traj.contact_time)
                            and traj.contact_time > 0, traj.contact_time))
    out.checks.append(close("impact speed ratio", traj.speed_ratio,
                            eu.damping_bound(m, rf, h0), 1e-8))
    err = traj.conservation_error(m, rf)
    out.checks.append(Check("conservation", err, 0.0, 1e-8, err < 1e-8))
    out.tables.append(Table("trajectory", ("t", "h", "hdot"),
                            list(zip(traj.t, traj.h, traj.hdot))))
    return out


@experiment("colliding-flow", "Colliding viscous flow construction",
            "eccentric-annulus stream function, L^2 identity and admissible sigma(t)", 120.0,
            R=3.0, r=1.0)
def _colliding(p):
    out = Outcome()
    emap = cf.EccentricMap(p["R"], p["r"])
    rows = []
    for s in (0.1, 0.5, 0.9, 0.99):
        q = cf.angular_quadrature(s, 2, 1)
        out.checks.append(close(f"nu1 sigma={s}", q, cf.nu1(s), 1e-10, relative=True))
        q3 = cf.angular_quadrature(s, 2, 3)
        out.checks.append(close(f"sin^2/(1-s cos)^3 sigma={s}", q3, cf.angular_cubic(s),
                                1e-8, relative=True))
        rows.append(("angular", s, q, cf.nu1(s), q3, cf.angular_cubic(s)))
    for s in (0.2, 0.5, 0.8, 0.95):
        ident = cf.l2_identity(emap, s)
        out.checks.append(Check(f"L2 identity sigma={s}", ident.rel_error, 0.0, 1e-4,
                                ident.rel_error < 1e-4))
        rows.append(("l2", s, ident.quadrature, ident.closed_form, ident.terms[1],
                     ident.terms[2]))
    slope, eps, vals = cf.laplacian_scaling(emap)
    out.checks.append(close("||Delta psi||^2 exponent", slope, -1.5, 0.05))
    rows += [("laplacian", 1 - e, v, None, None, None) for e, v in zip(eps, vals)]
    quart = cf.admissibility(cf.SigmaFamily.quartic())
    lin = cf.admissibility(cf.SigmaFamily.linear())
    out.checks.append(holds("quartic family admissible", quart.admissible))
    out.checks.append(holds("linear family fails the singular integral",
                            not lin.l1_finite, lin.l1_growth))
    rows.append(("admissibility-quartic", None, quart.sup_dsigma, quart.l1_singular,
                 quart.l2_ddsigma, quart.admissible))
    rows.append(("admissibility-linear", None, lin.sup_dsigma, lin.l1_singular,
                 lin.l2_ddsigma, lin.admissible))
    out.tables.append(Table("colliding", ("kind", "sigma", "a", "b", "c", "d"), rows))
    return out


@experiment("particles-benchmark", "Two particles in viscous Burgers flow do not collide",
            "1D fluid-particle system: energy identity and gap lower bound", 300.0,
            T=10.0, cells="32,64,128,256", kappa=1.0, mass=1.0)
def _particles(p):
    out = Outcome()
    cells = [int(c) for c in str(p["cells"]).split(",")]
    rows = []
    l2s = []
    for n in cells:
        st = p1d.benchmark_state(n, p["kappa"], p["mass"])
        hist = p1d.simulate(st, p["T"], 0.64 / n)
        dg = p1d.diagnostics(hist)
        e0 = hist.energy[0]
        out.checks.append(holds(f"min gap > 0 [cells={n}]", dg.min_gap > 0, dg.min_gap))
        out.checks.append(holds(f"energy non-increasing [cells={n}]",
                                dg.energy_increase <= 1e-8 * e0, dg.energy_increase))
        out.checks.append(holds(f"gap above Groenwall envelope [cells={n}]", dg.envelope_ok))
        l2s.append(dg.grad_l2linf)
        rows.append((n, dg.min_gap, dg.energy_increase, dg.grad_l2linf, hist.energy[-1] / e0))
    drift = abs(l2s[-1] / l2s[-2] - 1)
    out.checks.append(Check("int ||u_x||_inf^2 mesh stability", drift, 0.0, 0.05, drift < 0.05))
    out.tables.append(Table("benchmark", ("cells", "min_gap", "max_energy_increase",
                                          "grad_l2linf", "energy_ratio"), rows))
    return out


@experiment("tresca-schedule", "Tresca contact sequence",
            "t_0 = sqrt(h0/g)/4, bracket (h0/2)(1-s)^n <= h(t_n) <= (3/2) h0 (1-s^2/32)^n",
            1.0, h0=1e-4, g=9.81, sigma=0.25, m=1e6, c_sharp=0.1, c_flat=1.0, n_max=50)
def _tresca(p):
    out = Outcome()
    s = lub.tresca_schedule(p["h0"], p["g"], p["sigma"], p["m"], p["c_sharp"], p["c_flat"],
                            int(p["n_max"]))
    out.checks.append(holds("admissible parameters", s.admissible))
    out.checks.append(holds("bracket for n <= 50", s.bracket_ok))
    out.checks.append(close("t0 = sqrt(h0/g)/4", s.t[0], 0.25 * math.sqrt(p["h0"] / p["g"]),
                            0.0))
    # geometric summation of the upper bracket against a long partial sum
    step = p["sigma"] / (2 * math.sqrt(p["g"] * p["h0"]))
    q = 1 - p["sigma"] ** 2 / 32
    partial = s.t[0] + step * np.sum(1.5 * p["h0"] * q ** np.arange(200000))
    out.checks.append(close("T* bound (geometric sum)", s.t_star_bound, partial, 1e-9,
                            relative=True))
    out.checks.append(holds("T* bound finite and above t_50", math.isfinite(s.t_star_bound)
                            and s.t[-1] <= s.t_star_bound))
    out.tables.append(Table("schedule", ("n", "t_n", "h_n", "lower", "upper"),
                            list(zip(range(len(s.t)), s.t, s.h, s.lower, s.upper))))
    return out


def run_experiment(exp_id, overrides=None):
    return REGISTRY[exp_id].run(overrides)
