"""Relative Monge-Ampere capacity of balls and sublevel sets.

Under the normalization used throughout the package, the capacity of the
closed ball of radius r inside the unit ball is (log(1/r))^{-n}: it is the
total mass of the relative extremal profile max(x/log(1/r), -1), and the
supremum over competitors with values in [-1, 0] is attained there.  Since
sublevel sets of radial functions are balls, their capacities are closed
form as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .profiles import (
    RadialProfile,
    SUBLEVEL_BALL,
    SUBLEVEL_EMPTY,
    SUBLEVEL_WHOLE,
    extremal_profile,
    sublevel_boundary,
    sublevel_boundary_vec,
)

__all__ = [
    "cap_ball",
    "extremal_profile",
    "cap_sublevel",
    "cap_sublevel_vec",
    "capacity_curve",
    "CapacityCurve",
    "DEFAULT_S_GRID",
]

DEFAULT_S_GRID = np.geomspace(1e-3, 1e3, 96)


def cap_ball(r: float, n: int) -> float:
    """Capacity of the closed ball of radius r relative to the unit ball."""
    r = float(r)
    if not 0 < r < 1:
        raise ValueError("radius out of range")
    return math.log(1.0 / r) ** (-n)


def cap_sublevel(p: RadialProfile, s: float, n: int) -> float:
    """Capacity of the open sublevel set {u < -s}.

    Empty sublevel sets (bounded profiles with s too large) get capacity 0;
    a sublevel set filling the whole ball gets +inf.
    """
    kind, x = sublevel_boundary(p, s)
    if kind == SUBLEVEL_EMPTY:
        return 0.0
    if kind == SUBLEVEL_WHOLE:
        return math.inf
    if x >= 0.0:
        return math.inf
    return (-x) ** (-n)


def cap_sublevel_vec(p: RadialProfile, s: np.ndarray, n: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    x, empty, whole = sublevel_boundary_vec(p, s)
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.power(-x, -float(n))
    vals = np.where(empty, 0.0, vals)
    vals = np.where(whole, math.inf, vals)
    return vals


@dataclass(frozen=True)
class CapacityCurve:
    """Sampled s -> Cap({u < -s}) with its log transform.

    f(s) = -(1/n) log Cap({u < -s}); +inf where the capacity vanishes.
    The profile is kept so consumers can re-evaluate f at arbitrary levels
    instead of interpolating.
    """

    n: int
    s: np.ndarray
    cap: np.ndarray
    f: np.ndarray
    profile: Optional[RadialProfile] = field(default=None, repr=False)
    closed_form: str = ""

    def f_of(self, s):
        """Evaluate f at arbitrary positive levels from the profile."""
        if self.profile is None:
            raise ValueError("curve has no generating profile")
        s_arr = np.asarray(s, dtype=float)
        caps = cap_sublevel_vec(self.profile, s_arr, self.n)
        with np.errstate(divide="ignore"):
            vals = np.where(caps > 0, -np.log(caps) / self.n, math.inf)
        return float(vals) if np.ndim(s) == 0 else vals

    @property
    def total_mass_estimate(self) -> float:
        """sup over the sample grid of s^n Cap({u < -s})."""
        vals = (self.s ** self.n) * self.cap
        vals = vals[np.isfinite(vals)]
        return float(np.max(vals)) if len(vals) else 0.0

    def to_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            fh.write("s,cap,f\n")
            for s, c, f in zip(self.s, self.cap, self.f):
                c_txt = "inf" if math.isinf(c) else repr(float(c))
                f_txt = "inf" if math.isinf(f) else repr(float(f))
                fh.write(f"{float(s)!r},{c_txt},{f_txt}\n")


_CLOSED_FORM_TAGS = {
    "LinearProfile": "f(s) = log(s/a)",
    "Log1mProfile": "f(s) = log(expm1(s/c))",
    "PowerProfile": "f(s) = (1/alpha) log s",
}


def capacity_curve(p: RadialProfile, n: int, s_grid=None) -> CapacityCurve:
    """Sample the capacity of sublevel sets on a positive increasing grid."""
    s = DEFAULT_S_GRID if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any(s <= 0) or np.any(np.diff(s) <= 0):
        raise ValueError("level grid must be positive and increasing")
    cap = cap_sublevel_vec(p, s, n)
    with np.errstate(divide="ignore"):
        f = np.where(cap > 0, -np.log(cap) / n, math.inf)
    return CapacityCurve(n=n, s=s, cap=cap, f=f, profile=p,
                         closed_form=_CLOSED_FORM_TAGS.get(type(p).__name__, ""))
