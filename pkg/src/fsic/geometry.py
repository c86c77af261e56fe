"""Gap profiles of bodies hovering over a flat wall.

Lengths are dimensionless with the ball radius set to one.  A profile
describes the lower boundary of the solid near its lowest point as the
graph ``x_d = psi_h(r)`` over the wall ``x_d = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class DomainError(ValueError):
    """Raised when a radius lies outside the profile's validity range."""


POWER_LAW = "power"
SPHERICAL = "sphere"


@dataclass(frozen=True)
class ShapeProfile:
    """Lower boundary of a body at gap ``h`` above the wall.

    Parameters
    ----------
    kind : {"power", "sphere"}
        ``"power"`` gives ``psi_h(r) = h + r**(1+alpha)``, ``"sphere"`` the
        unit ball ``psi_h(r) = 1 + h - sqrt(1 - r**2)``.
    alpha : float
        Hoelder exponent of the power-law profile, in (0, 1].  Ignored (and
        reported as 1) for the sphere.
    d : int
        Space dimension, 2 or 3.
    r0 : float or None
        Radius of the inner region.  Defaults to 0.5 for the sphere and 1.0
        for the power law.
    h : float
        Gap between the lowest body point and the wall.
    """

    kind: str = POWER_LAW
    alpha: float = 1.0
    d: int = 3
    r0: float | None = None
    h: float = 0.0

    def __post_init__(self):
        if self.kind not in (POWER_LAW, SPHERICAL):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.d not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        if self.kind == SPHERICAL:
            object.__setattr__(self, "alpha", 1.0)
        elif not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.r0 is None:
            object.__setattr__(self, "r0", 0.5 if self.kind == SPHERICAL else 1.0)
        if self.r0 <= 0.0:
            raise ValueError("r0 must be positive")
        if self.kind == SPHERICAL and self.r0 >= 1.0:
            raise ValueError("spherical profiles need r0 < 1")
        if self.h < 0.0:
            raise ValueError("gap h must be non-negative")

    @classmethod
    def power_law(cls, alpha, d=3, r0=None, h=0.0):
        return cls(POWER_LAW, alpha, d, r0, h)

    @classmethod
    def sphere(cls, d=3, r0=None, h=0.0):
        return cls(SPHERICAL, 1.0, d, r0, h)

    def at(self, h):
        """Same body placed at gap ``h``."""
        return replace(self, h=float(h))

    @property
    def r_max(self):
        """Largest radius at which the profile formula is evaluated."""
        return 1.5 * self.r0

    # unchecked vectorized evaluation, shared with the test-field module
    def psi(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == SPHERICAL:
            return 1.0 + self.h - np.sqrt(1.0 - r * r)
        return self.h + r ** (1.0 + self.alpha)

    def dpsi(self, r, order=1):
        r = np.asarray(r, dtype=float)
        if self.kind == SPHERICAL:
            s = 1.0 - r * r
            if order == 1:
                return r / np.sqrt(s)
            if order == 2:
                return s ** -1.5
            return 3.0 * r * s ** -2.5
        a = self.alpha
        if order == 1:
            return (1.0 + a) * r ** a
        if order == 2:
            return (1.0 + a) * a * r ** (a - 1.0)
        if a == 1.0:
            return np.zeros_like(r)
        return (1.0 + a) * a * (a - 1.0) * r ** (a - 2.0)


@dataclass(frozen=True)
class BoundaryNormal:
    """Unit normal on the body boundary, directed from the fluid into the solid."""

    radial: float
    vertical: float

    def as_array(self):
        return np.array([self.radial, self.vertical])


def _check_radius(profile, r, open_left=False):
    r = np.asarray(r, dtype=float)
    lo_bad = r <= 0.0 if open_left else r < 0.0
    if np.any(lo_bad) or np.any(r > profile.r0):
        lo = "(0" if open_left else "[0"
        raise DomainError(f"radius outside {lo}, {profile.r0}]")
    return r


def gap(profile: ShapeProfile, r):
    """Gap ``psi_h(r)`` between body and wall at radius ``r``."""
    r = _check_radius(profile, r)
    out = profile.psi(r)
    return float(out) if out.ndim == 0 else out


def gap_derivatives(profile: ShapeProfile, r, order: int = 1):
    """Analytic ``order``-th radial derivative of the gap profile."""
    if order not in (1, 2, 3):
        raise ValueError("only derivative orders 1, 2, 3 are supported")
    r = np.asarray(r, dtype=float)
    if profile.kind == SPHERICAL:
        r = _check_radius(profile, r)
    else:
        # r**(alpha-1) is singular at 0 for alpha < 1, so the origin is excluded
        r = _check_radius(profile, r, open_left=order > 1 and profile.alpha < 1)
    out = profile.dpsi(r, order)
    return float(out) if out.ndim == 0 else out


def body_normal(profile: ShapeProfile, r) -> BoundaryNormal:
    """Unit normal ``(-psi', 1) / sqrt(1 + psi'**2)`` at ``(r, psi_h(r))``.

    It is the outer normal of the fluid film.  For the sphere this is
    ``(-r, sqrt(1 - r**2))``, which is already unit.
    """
    r = float(_check_radius(profile, r))
    if profile.kind == SPHERICAL:
        return BoundaryNormal(-r, float(np.sqrt(1.0 - r * r)))
    slope = float(profile.dpsi(r, 1))
    n = np.hypot(slope, 1.0)
    return BoundaryNormal(-slope / n, 1.0 / n)
