"""Command line front end: module subcommands and the experiment registry.

Outputs go to ``$FSIC_OUT`` (default ``./fsic_out``) or ``--out``.  Every
command writes CSV tables (one timestamp comment line, then a header row)
and a JSON report with ``"schema": 1``.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from . import collidingflow as cf
from . import criteria as cr
from . import eulerflow as eu
from . import lubridyn as lub
from . import particles1d as p1d
from . import testfield as tf
from .experiments import REGISTRY, Check, Outcome, Table, close, holds
from .geometry import ShapeProfile

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

NUMERICAL_ERRORS = (ArithmeticError, RuntimeError, asy.FitError, np.linalg.LinAlgError)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# value parsing

def parse_grid(text):
    """``{lin|log}:start:stop:count``, a comma list, or a single number."""
    text = str(text).strip()
    if text.startswith(("lin:", "log:")):
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"malformed grid {text!r}; use lin|log:start:stop:count")
        kind, a, b, n = parts
        try:
            a, b, n = float(a), float(b), int(n)
        except ValueError as exc:
            raise UsageError(f"malformed grid {text!r}: {exc}") from None
        if n < 1:
            raise UsageError(f"grid {text!r} needs a positive count")
        if kind == "log":
            if a <= 0 or b <= 0:
                raise UsageError(f"log grid {text!r} needs positive bounds")
            return np.geomspace(a, b, n)
        return np.linspace(a, b, n)
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot read {text!r} as a number, list or grid") from None


def _grid(text):
    try:
        return parse_grid(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _scalar(text):
    text = text.strip()
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _bool(text):
    v = _scalar(str(text))
    if not isinstance(v, bool):
        raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")
    return v


# ---------------------------------------------------------------------------
# output

def out_dir(args):
    root = Path(args.out or os.environ.get("FSIC_OUT", "fsic_out"))
    root.mkdir(parents=True, exist_ok=True)
    return root


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_report(root: Path, name, outcome: Outcome, wall, extra=None):
    files = []
    for t in outcome.tables:
        p = root / f"{name}_{t.name}.csv"
        write_csv(p, t.header, t.rows)
        files.append(p.name)
    report = {
        "schema": SCHEMA,
        "experiment": name,
        "wall_time_s": wall,
        "passed": outcome.passed,
        "checks": [c.as_dict() for c in outcome.checks],
        "artifacts": files,
    }
    if extra:
        report.update(extra)
    p = root / f"{name}.json"
    p.write_text(json.dumps(report, indent=2, default=_json_default) + "\n")
    return report


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x).__name__)


def _finish(args, name, outcome, wall, extra=None):
    report = write_report(out_dir(args), name, outcome, wall, extra)
    for c in outcome.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {_fmt(c.value)}")
    if extra:
        print(json.dumps(extra, default=_json_default))
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# module subcommands

def _descending(h):
    # the scaling fits walk towards contact
    return np.unique(h)[::-1]


def cmd_asymptotics(args):
    t0 = time.perf_counter()
    h = _descending(args.h) if args.h is not None else asy.default_h_grid()
    sw = asy.sweep(args.alpha, args.q, args.s, h, r0=args.r0)
    out = Outcome()
    out.tables.append(Table("samples", ("h", "integral"), list(zip(sw.h, sw.values))))
    out.checks.append(holds("fit matches classification", sw.matches(), sw.fit.exponent))
    extra = {"tag": sw.regime.tag, "exponent": sw.regime.exponent,
             "fitted_exponent": sw.fit.exponent, "branch": sw.fit.branch,
             "r2": sw.fit.r2, "log_r2": sw.fit.log_r2}
    return _finish(args, "asymptotics", out, time.perf_counter() - t0, extra)


def cmd_testfield(args):
    t0 = time.perf_counter()
    prof = ShapeProfile.sphere(args.d) if args.sphere else ShapeProfile.power_law(args.alpha, args.d)
    variant = args.variant or (tf.NOSLIP_3D if args.d == 3 else tf.NOSLIP_2D)
    if variant == tf.SLIP_3D:
        prof = ShapeProfile.sphere(r0=args.r0)
    spec = tf.TestFieldSpec(prof, variant, args.beta_s, args.beta_omega, args.mu)
    h = _descending(args.h) if args.h is not None else np.geomspace(1e-2, 1e-6, 9)
    rows = []
    for hi in h:
        if args.quantity == "drag":
            v = tf.drag_energy(spec, hi).value
        elif args.quantity == "remainder":
            v = tf.remainder_n(spec, hi)
        else:
            v = tf.lq_norm(spec, hi, args.quantity, args.q, args.region, power=True).value
        rows.append((hi, v))
    out = Outcome([], [Table("values", ("h", args.quantity), rows)])
    vals = np.array(rows)
    extra = {}
    if len(vals) >= 3:
        fit = asy.fit_scaling(vals, log_branch=True, min_decades=0.0)
        extra = {"fitted_exponent": fit.exponent, "r2": fit.r2, "log_r2": fit.log_r2,
                 "branch": fit.branch}
    return _finish(args, "testfield", out, time.perf_counter() - t0, extra)


def cmd_criteria(args):
    t0 = time.perf_counter()
    out = Outcome()
    extra = {}
    if args.action == "alpha-bound":
        b = cr.compressible_alpha_bound(args.gamma, args.p, args.d, args.convection,
                                        args.temperature_beta)
        extra = {"case": b.case, "feasible": b.feasible, "bound": b.value, "raw": b.raw}
        print(b.value if b.feasible else cr.INFEASIBLE)
        gammas = np.linspace(1.6, 12.0, 27)
        ps = np.linspace(1.05, 2.95, 20)
        rows = [(g, pp, cr.compressible_alpha_bound(g, pp, args.d, args.convection).value)
                for g in gammas for pp in ps]
        out.tables.append(Table("alpha_map", ("gamma", "p", "alpha_threshold"), rows))
    elif args.action == "starovoitov":
        b = cr.starovoitov_beta(args.alpha, args.p, args.d)
        extra = {"beta": b.beta, "tag": b.tag}
        if b.collision_possible:
            extra["eta"] = cr.starovoitov_rate(args.alpha, args.p, args.q, args.d)
    elif args.action == "mass":
        ok = cr.mass_threshold(args.m, args.e0, args.gamma, args.p, args.c0)
        extra = {"satisfied": ok, "minimal_mass": cr.minimal_mass(args.e0, args.gamma, args.p,
                                                                  args.c0),
                 "note": "conditional on the supplied calibration constant C0"}
    elif args.action == "incompressible":
        extra = {"verdict": cr.incompressible_newtonian_predicate(args.alpha, args.d,
                                                                  args.rho_s, args.rho_f)}
    return _finish(args, f"criteria_{args.action}", out, time.perf_counter() - t0, extra)


def _contact_params(args):
    return cr.ContactParams(mu=args.mu, rho_f=args.rho_f, rho_s=args.rho_s, m=args.m, g=args.g,
                            d=args.d, boundary=args.boundary)


def cmd_lubridyn(args):
    t0 = time.perf_counter()
    out = Outcome()
    extra = {}
    if args.action == "fall":
        params = _contact_params(args)
        prof = ShapeProfile.sphere(args.d) if args.sphere else ShapeProfile.power_law(args.alpha,
                                                                                    args.d)
        law = lub.drag_law_for(params, prof)
        traj = lub.integrate_fall(law, params, args.h0, args.hdot0, args.t_max)
        scan = lub.contact_scan(law, params, args.h0, args.hdot0, args.t_max)
        out.tables.append(Table("trajectory", ("t", "h", "hdot", "drag"),
                                list(zip(traj.t, traj.h, traj.hdot, traj.drag))))
        out.checks.append(holds("contact iff drag exponent < 1",
                                scan.finite_contact == law.allows_contact, scan.finite_contact))
        extra = {"regime": law.regime, "beta_hat": law.beta_hat,
                 "finite_contact": scan.finite_contact, "contact_time": scan.contact_time,
                 "level_times": list(scan.times), "exponent_estimate": scan.exponent_estimate}
    else:
        s = lub.tresca_schedule(args.h0, args.g, args.sigma, args.m, args.c_sharp, args.c_flat,
                                args.n_max)
        out.tables.append(Table("schedule", ("n", "t_n", "h_n", "lower", "upper"),
                                list(zip(range(len(s.t)), s.t, s.h, s.lower, s.upper))))
        out.checks.append(holds("bracket", s.bracket_ok))
        extra = {"admissible": s.admissible, "small_gap_ok": s.small_gap_ok,
                 "large_mass_ok": s.large_mass_ok, "t_star_bound": s.t_star_bound}
    return _finish(args, f"lubridyn_{args.action}", out, time.perf_counter() - t0, extra)


def cmd_euler(args):
    t0 = time.perf_counter()
    out = Outcome()
    extra = {}
    if args.action == "energy":
        rows = []
        for s in args.sigma:
            v = eu.energy(s, args.tol)
            rows.append((s, eu.sigma_to_h(s), v.value, v.other, v.order, v.tail))
        out.tables.append(Table("energy", ("sigma", "h", "E", "E_other_series", "terms",
                                           "tail_bound"), rows))
        extra = {"E": [r[2] for r in rows], "E_contact": eu.E_CONTACT}
        for r in rows:
            print(repr(r[2]))
    elif args.action == "fall":
        traj = eu.fall_ode(args.m, args.rho_f, args.h0, args.hdot0)
        bound = eu.damping_bound(args.m, args.rho_f, args.h0)
        out.tables.append(Table("trajectory", ("t", "h", "hdot"),
                                list(zip(traj.t, traj.h, traj.hdot))))
        out.checks.append(close("impact speed ratio", traj.speed_ratio, bound, 1e-8))
        extra = {"contact_time": traj.contact_time, "impact_speed": traj.impact_speed,
                 "speed_ratio": traj.speed_ratio}
    else:
        bound = eu.damping_bound(args.m, args.rho_f, args.h0)
        extra = {"speed_ratio": bound, "limit": eu.DAMPING_LIMIT}
        print(repr(bound))
    return _finish(args, f"euler_{args.action}", out, time.perf_counter() - t0, extra)


def cmd_colliding(args):
    t0 = time.perf_counter()
    out = Outcome()
    extra = {}
    if args.action == "identities":
        emap = cf.EccentricMap(args.R, args.r)
        rows = []
        for s in args.sigma:
            ident = cf.l2_identity(emap, s)
            rows.append((s, ident.quadrature, ident.closed_form, ident.rel_error,
                         cf.laplacian_norm_squared(emap, s)))
            out.checks.append(Check(f"L2 identity sigma={s}", ident.rel_error, 0.0, 1e-4,
                                    ident.rel_error < 1e-4))
        slope, _, _ = cf.laplacian_scaling(emap)
        extra = {"laplacian_exponent": slope}
        out.tables.append(Table("identities", ("sigma", "quadrature", "mu1_nu1",
                                               "rel_error", "laplacian_sq"), rows))
    else:
        fam = getattr(cf.SigmaFamily, args.family)(args.T, args.t_star)
        a = cf.admissibility(fam)
        extra = {"family": args.family, "sup_dsigma": a.sup_dsigma,
                 "singular_integral": a.l1_singular, "l2_ddsigma": a.l2_ddsigma,
                 "singular_finite": a.l1_finite, "growth": a.l1_growth,
                 "admissible": a.admissible}
    return _finish(args, f"colliding_{args.action}", out, time.perf_counter() - t0, extra)


def cmd_particles(args):
    t0 = time.perf_counter()
    st = p1d.benchmark_state(args.cells, args.kappa, args.mass, args.gap, args.speed)
    hist = p1d.simulate(st, args.T, args.dt or 0.64 / args.cells)
    dg = p1d.diagnostics(hist)
    out = Outcome()
    out.tables.append(Table("history", ("t", "gap", "energy", "grad_sup", "envelope"),
                            list(zip(hist.t, hist.gaps[:, 0], hist.energy, hist.grad_sup,
                                     dg.envelope))))
    out.checks.append(holds("min gap positive", dg.min_gap > 0, dg.min_gap))
    out.checks.append(holds("energy non-increasing", dg.energy_increase <= 1e-8 * hist.energy[0],
                            dg.energy_increase))
    out.checks.append(holds("gap above envelope", dg.envelope_ok))
    extra = {"min_gap": dg.min_gap, "grad_l2linf": dg.grad_l2linf}
    return _finish(args, "particles", out, time.perf_counter() - t0, extra)


# ---------------------------------------------------------------------------
# registry commands

def cmd_list(args):
    for e in REGISTRY.values():
        params = ", ".join(f"{k}={v}" for k, v in e.defaults.items()) or "-"
        print(f"{e.id:24s} budget {e.budget:6.1f} s  {e.title}")
        print(f"{'':24s} anchor: {e.anchor}")
        print(f"{'':24s} params: {params}")
    return EXIT_OK


def _overrides(exp, pairs):
    over = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"override {item!r} is not key=value")
        k, v = item.split("=", 1)
        k = k.strip()
        if k not in exp.defaults:
            raise UsageError(f"unknown parameter {k!r} for experiment {exp.id}")
        over[k] = _scalar(v)
    return over


def _run_one(exp_id, overrides, root):
    exp = REGISTRY[exp_id]
    try:
        outcome, wall = exp.run(overrides)
    except NUMERICAL_ERRORS as exc:
        return {"schema": SCHEMA, "experiment": exp_id, "passed": False,
                "error": f"{type(exc).__name__}: {exc}", "status": EXIT_NUMERIC}
    report = write_report(Path(root), exp_id, outcome, wall, {"anchor": exp.anchor})
    report["status"] = EXIT_OK if report["passed"] else EXIT_FAIL
    return report


def _print_line(rep):
    tag = "PASS" if rep["passed"] else "FAIL"
    extra = f" ({rep['error']})" if "error" in rep else f" {rep.get('wall_time_s', 0):.2f} s"
    print(f"{tag}  {rep['experiment']}{extra}")
    for c in rep.get("checks", []):
        if not c["passed"]:
            print(f"      failed: {c['name']} = {c['value']}")


def cmd_run(args):
    if args.id not in REGISTRY:
        raise UsageError(f"unknown experiment {args.id!r}; see `fsic list`")
    over = _overrides(REGISTRY[args.id], args.set)
    rep = _run_one(args.id, over, out_dir(args))
    _print_line(rep)
    return rep["status"]


def cmd_run_all(args):
    root = out_dir(args)
    ids = list(REGISTRY)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            reps = list(pool.map(_run_one, ids, [None] * len(ids), [str(root)] * len(ids)))
    else:
        reps = [_run_one(i, None, root) for i in ids]
    for rep in reps:
        _print_line(rep)
    summary = {"schema": SCHEMA, "passed": all(r["passed"] for r in reps),
               "experiments": {r["experiment"]: r["passed"] for r in reps}}
    (root / "run_all.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"{sum(r['passed'] for r in reps)}/{len(reps)} experiments passed")
    if any(r["status"] == EXIT_NUMERIC for r in reps):
        return EXIT_NUMERIC
    return EXIT_OK if summary["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser

def _physical(p):
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--rho-f", type=float, default=1.0)
    p.add_argument("--rho-s", type=float, default=2.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--d", type=int, default=3, choices=(2, 3))


def build_parser():
    ap = argparse.ArgumentParser(prog="fsic", description=__doc__.split("\n")[0])
    ap.add_argument("--out", help="output directory (default $FSIC_OUT or ./fsic_out)")
    ap.add_argument("--config", help="INI file; the section named after the command sets defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("asymptotics", help="scaling of int r^q/(h + r^(1+alpha))^s")
    p.add_argument("--alpha", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--h", type=_grid, default=None)
    p.add_argument("--r0", type=float, default=1.0)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("testfield", help="norms and drag of the explicit test field")
    p.add_argument("--d", type=int, default=3, choices=(2, 3))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--sphere", action="store_true")
    p.add_argument("--variant", choices=tf.VARIANTS, default=None)
    p.add_argument("--quantity", default="grad_w",
                   choices=("w", "grad_w", "dh_w", "drag", "remainder"))
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--region", choices=(tf.INNER, tf.OUTER, tf.FULL), default=tf.FULL)
    p.add_argument("--beta-s", type=float, default=0.0)
    p.add_argument("--beta-omega", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=0.4)
    p.add_argument("--h", type=_grid, default=None)
    p.set_defaults(func=cmd_testfield)

    p = sub.add_parser("criteria", help="collision predicates")
    p.add_argument("action", choices=("alpha-bound", "starovoitov", "mass", "incompressible"))
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--d", type=int, default=3, choices=(2, 3))
    p.add_argument("--convection", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--temperature-beta", type=float, default=None)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--e0", type=float, default=0.0)
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--rho-s", type=float, default=2.0)
    p.add_argument("--rho-f", type=float, default=1.0)
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("lubridyn", help="reduced gap dynamics")
    p.add_argument("action", choices=("fall", "tresca"))
    _physical(p)
    p.add_argument("--boundary", default=cr.NO_SLIP,
                   choices=(cr.NO_SLIP, cr.SLIP_BOTH, cr.SLIP_MIXED))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--sphere", action="store_true")
    p.add_argument("--h0", type=float, default=0.5)
    p.add_argument("--hdot0", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=2000.0)
    p.add_argument("--sigma", type=float, default=0.25)
    p.add_argument("--c-sharp", type=float, default=0.1)
    p.add_argument("--c-flat", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=50)
    p.set_defaults(func=cmd_lubridyn)

    p = sub.add_parser("euler", help="inviscid disk above a wall")
    p.add_argument("action", choices=("energy", "fall", "damping"))
    p.add_argument("--sigma", type=_grid, default=np.array([0.5]))
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--m", type=float, default=math.pi)
    p.add_argument("--rho-f", type=float, default=1.0)
    p.add_argument("--h0", type=float, default=1.0)
    p.add_argument("--hdot0", type=float, default=-1.0)
    p.set_defaults(func=cmd_euler)

    p = sub.add_parser("colliding", help="colliding viscous flow construction")
    p.add_argument("action", choices=("identities", "admissibility"))
    p.add_argument("--R", type=float, default=3.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--sigma", type=_grid, default=np.array([0.2, 0.5, 0.8, 0.95]))
    p.add_argument("--family", choices=("quartic", "linear"), default="quartic")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--t-star", type=float, default=0.5)
    p.set_defaults(func=cmd_colliding)

    p = sub.add_parser("particles", help="1D viscous fluid with point particles")
    p.add_argument("action", choices=("benchmark",))
    p.add_argument("--cells", type=int, default=64)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--gap", type=float, default=0.5)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=None)
    p.set_defaults(func=cmd_particles)

    p = sub.add_parser("list", help="list the registered experiments")
    p.set_defaults(func=cmd_list)
    p = sub.add_parser("run", help="run one registered experiment")
    p.add_argument("id")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("run-all", help="run every registered experiment")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run_all)
    return ap


def _subparser(ap, name):
    for act in ap._actions:
        if isinstance(act, argparse._SubParsersAction):
            return act.choices[name]
    raise KeyError(name)


def apply_config(ap, args, argv):
    """Fill options not given on the command line from the config section."""
    cfg = configparser.ConfigParser()
    if not cfg.read(args.config):
        raise UsageError(f"cannot read config file {args.config!r}")
    section = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
    names = [s for s in (section, args.command) if cfg.has_section(s)]
    if not names:
        return args
    sp = _subparser(ap, args.command)
    actions = {a.dest: a for a in sp._actions if a.option_strings}
    given = {a.dest for a in sp._actions for o in a.option_strings
             if any(t == o or t.startswith(o + "=") for t in argv)}
    for name in reversed(names):
        for key, raw in cfg.items(name):
            dest = key.replace("-", "_")
            if dest not in actions:
                raise UsageError(f"unknown config key {key!r} in section [{name}]")
            if dest in given:
                continue
            act = actions[dest]
            try:
                if act.type is not None:
                    val = act.type(raw)
                elif isinstance(act, (argparse._StoreTrueAction, argparse.BooleanOptionalAction)):
                    val = _bool(raw)
                else:
                    val = raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"bad value for config key {key!r}: {exc}") from None
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"config key {key!r} must be one of {list(act.choices)}")
            setattr(args, dest, val)
    return args


# options that may come from either the command line or a config file
REQUIRED = {"asymptotics": ("alpha", "q", "s")}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.config:
            args = apply_config(ap, args, argv)
        missing = [k for k in REQUIRED.get(args.command, ()) if getattr(args, k) is None]
        if missing:
            raise UsageError("missing option(s) " + ", ".join("--" + k for k in missing))
        return args.func(args)
    except UsageError as exc:
        print(f"fsic: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"fsic: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"fsic: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
