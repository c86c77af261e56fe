"""Singular gap integrals and their small-gap behaviour.

The model integral is

    I(h) = int_0^{r0} r**q / (h + r**(1+alpha))**s dr,

which blows up like a power of ``h``, like ``|log h|`` or stays bounded
as ``h -> 0`` depending on the sign of ``q + 1 - s (1 + alpha)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

POWER_LAW = "PowerLaw"
LOGARITHMIC = "Logarithmic"
BOUNDED = "Bounded"

# |q + 1 - s(1 + alpha)| below this is reported as slow to converge
NEAR_CRITICAL = 0.1


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, value, error):
        super().__init__(f"{message} (value={value!r}, error estimate={error!r})")
        self.value = value
        self.error = error


class FitError(ValueError):
    """Samples are unusable for a scaling fit."""


@dataclass(frozen=True)
class AsymptoticClass:
    tag: str
    exponent: float | None = None

    def __post_init__(self):
        if (self.tag == POWER_LAW) != (self.exponent is not None):
            raise ValueError("exponent is present exactly for the PowerLaw tag")


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares description of ``value(h)`` over a decreasing h-grid.

    ``exponent`` and ``r2`` come from the log-log regression.  When the
    log branch was requested, ``log_slope``/``log_r2`` describe the linear
    regression of ``value`` on ``|log h|`` and ``branch`` names the better fit.
    """

    exponent: float
    intercept: float
    r2: float
    h: np.ndarray = field(repr=False)
    log_slope: float | None = None
    log_intercept: float | None = None
    log_r2: float | None = None
    branch: str = "power"
    slow_converging: bool = False

    @property
    def best_r2(self):
        return self.log_r2 if self.branch == "log" else self.r2

    @property
    def decades(self):
        return float(np.log10(self.h[0] / self.h[-1]))


def default_h_grid(start=1e-6, stop=1e-2, num=25):
    """Log-spaced gaps, largest first."""
    return np.geomspace(stop, start, num)


def singular_gap_integral(alpha, q, s, h, r0=1.0, rtol=1e-10, limit=400):
    """Adaptive quadrature of ``int_0^r0 r**q / (h + r**(1+alpha))**s dr``.

    The interval is split at the crossover radius ``h**(1/(1+alpha))``
    where the denominator changes from its plateau to the power-law tail.
    Raises :class:`QuadratureError` carrying the achieved error if the
    relative tolerance is not met.
    """
    if alpha <= 0 or q < 0 or s <= 0 or h <= 0 or r0 <= 0:
        raise ValueError("need alpha > 0, q >= 0, s > 0, h > 0, r0 > 0")
    p = 1.0 + alpha

    def f(r):
        return r ** q / (h + r ** p) ** s

    rc = h ** (1.0 / p)
    edges = [0.0, rc, r0] if rc < r0 else [0.0, r0]
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            val, e, info = integrate.quad(f, a, b, epsabs=0.0, epsrel=rtol,
                                          limit=limit, full_output=1)[:3]
            total += val
            err += e
    if err > max(rtol * abs(total), 1e-300) * 10:
        raise QuadratureError("tolerance not met", total, err)
    return total


def classify(alpha, q, s):
    """Small-gap regime of the model integral."""
    if alpha <= 0 or q < 0 or s <= 0:
        raise ValueError("need alpha > 0, q >= 0, s > 0")
    gap = q + 1.0 - s * (1.0 + alpha)
    if abs(gap) <= 1e-12 * max(1.0, q + 1.0):
        return AsymptoticClass(LOGARITHMIC)
    if gap > 0:
        return AsymptoticClass(BOUNDED)
    return AsymptoticClass(POWER_LAW, (q + 1.0) / (1.0 + alpha) - s)


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        # constant data: a flat line is an exact fit
        return float(slope), float(icpt), 1.0
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return float(slope), float(icpt), min(max(r2, 0.0), 1.0)


def fit_scaling(samples, log_branch=False, min_decades=3.0, slow_converging=False):
    """Fit ``value ~ C h**exponent`` (and optionally ``A |log h| + B``).

    Parameters
    ----------
    samples : sequence of (h, value)
        At least five pairs with ``h`` strictly decreasing and positive values.
    log_branch : bool
        Also regress ``value`` on ``|log h|`` and pick the branch with the
        larger R^2.
    min_decades : float
        Minimal span of the h-grid in decades.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 5:
        raise FitError("need at least five (h, value) pairs")
    h, v = arr[:, 0], arr[:, 1]
    if np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise FitError("h must be positive and strictly decreasing")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise FitError("values must be finite and positive")
    if np.log10(h[0] / h[-1]) < min_decades - 1e-9:
        raise FitError(f"h-grid spans fewer than {min_decades} decades")
    lh = np.log(h)
    slope, icpt, r2 = _linfit(lh, np.log(v))
    kw = {}
    branch = "power"
    if log_branch:
        ls, li, lr2 = _linfit(-lh, v)
        kw = dict(log_slope=ls, log_intercept=li, log_r2=lr2)
        if lr2 > r2:
            branch = "log"
    return ScalingFit(slope, icpt, r2, h.copy(), branch=branch,
                      slow_converging=slow_converging, **kw)


@dataclass(frozen=True)
class Sweep:
    alpha: float
    q: float
    s: float
    h: np.ndarray
    values: np.ndarray
    regime: AsymptoticClass
    fit: ScalingFit

    @property
    def prefactors(self):
        """``value / h**exponent`` for power laws, ``value / |log h|`` for logs."""
        if self.regime.tag == POWER_LAW:
            return self.values / self.h ** self.regime.exponent
        if self.regime.tag == LOGARITHMIC:
            return self.values / np.abs(np.log(self.h))
        return self.values.copy()

    def matches(self, slope_tol=0.05, r2_min=0.99, bounded_tol=0.05):
        """Whether the fitted behaviour agrees with the classification."""
        tag = self.regime.tag
        if tag == POWER_LAW:
            return abs(self.fit.exponent - self.regime.exponent) <= slope_tol
        if tag == LOGARITHMIC:
            return self.fit.branch == "log" and self.fit.log_r2 > r2_min
        return abs(self.fit.exponent) <= bounded_tol


def sweep(alpha, q, s, h=None, r0=1.0):
    """Evaluate the model integral on an h-grid and fit its scaling."""
    h = default_h_grid() if h is None else np.asarray(h, dtype=float)
    vals = np.array([singular_gap_integral(alpha, q, s, hi, r0) for hi in h])
    regime = classify(alpha, q, s)
    slow = abs(q + 1.0 - s * (1.0 + alpha)) < NEAR_CRITICAL
    fit = fit_scaling(np.column_stack([h, vals]), log_branch=True,
                      slow_converging=slow)
    return Sweep(alpha, q, s, h, vals, regime, fit)
