"""Monge-Ampere measures of radial profiles.

With the normalization (dd^c log|z|)^n = delta_0, the measure of a radial
function with profile g is rotation invariant and fully described by the
closed-ball mass m(r) = (g'_+(log r))^n together with an atom at the origin
dirac0 = lim_{x -> -inf} (g'_+(x))^n.  Right derivatives make m
right-continuous, so kinks of g produce sphere atoms at the correct radius.
Open sublevel sets {u < -s} take the left limit of m and so exclude the
sphere atom sitting on their boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .numerics import _panel, integrate
from .profiles import _geom_quad
from .profiles import (
    RadialProfile,
    SUBLEVEL_BALL,
    SUBLEVEL_EMPTY,
    SUBLEVEL_WHOLE,
    pointwise_max,
    sign_change_points,
    sublevel_boundary,
    sublevel_boundary_vec,
)

__all__ = [
    "RadialMeasure",
    "ma_measure",
    "nonpluripolar_part",
    "sublevel_mass",
    "sublevel_mass_vec",
    "approximant_convergence_check",
    "comparison_identity_check",
    "mass_comparison_check",
    "capacity_sandwich_check",
    "total_mass_via_capacity",
]


@dataclass(frozen=True)
class RadialMeasure:
    """A rotation-invariant positive measure on the unit ball.

    ball_mass_x(x) is the mass of the closed ball of radius e^x including
    the origin atom; it is nondecreasing and right-continuous with
    lim_{x -> -inf} ball_mass_x = dirac0.  atoms lists sphere masses as
    (x-location, jump) pairs.  total may be +inf.
    """

    n: int
    dirac0: float
    ball_mass_x: Callable = field(repr=False)
    atoms: tuple[tuple[float, float], ...] = ()
    density: Optional[Callable] = field(default=None, repr=False)
    density_breakpoints: tuple[float, ...] = ()
    total: float = math.inf
    tag: str = ""

    def ball_mass(self, r):
        """Mass of the closed ball of radius r (0 < r <= 1)."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0) or np.any(r > 1):
            raise ValueError("radius out of range")
        out = self.ball_mass_x(np.log(r))
        return float(out) if np.ndim(r) == 0 else out

    def jump_at(self, x: float) -> float:
        for loc, jump in self.atoms:
            if abs(x - loc) <= 1e-12 * (1.0 + abs(loc)):
                return jump
        return 0.0

    def ball_mass_left_x(self, x: float) -> float:
        """Left limit of the ball mass at e^x (excludes a sphere atom at x)."""
        return float(self.ball_mass_x(np.asarray(x, dtype=float))) - self.jump_at(x)

    def interval_mass(self, x1: float, x2: float, *, include_left: bool = False,
                      include_right: bool = True) -> float:
        """Mass of the annulus e^{x1} .. e^{x2} with endpoint-atom control.

        x1 = -inf gives the open ball of radius e^{x2} (origin atom included).
        """
        if x2 < x1:
            raise ValueError("empty interval")
        hi = (float(self.ball_mass_x(np.asarray(min(x2, 0.0), dtype=float)))
              if include_right else self.ball_mass_left_x(min(x2, 0.0)))
        if math.isinf(x1):
            return hi
        lo = (self.ball_mass_left_x(x1) if include_left
              else float(self.ball_mass_x(np.asarray(x1, dtype=float))))
        return max(hi - lo, 0.0)

    def open_ball_mass(self, r: float) -> float:
        if not 0 < r <= 1:
            raise ValueError("radius out of range")
        return self.ball_mass_left_x(math.log(r))

    def scaled(self, c: float) -> "RadialMeasure":
        if not c > 0:
            raise ValueError("scale must be positive")
        base_mass = self.ball_mass_x
        dens = self.density
        return replace(
            self,
            dirac0=c * self.dirac0,
            ball_mass_x=lambda x, c=c, f=base_mass: c * np.asarray(f(x), dtype=float),
            atoms=tuple((loc, c * j) for loc, j in self.atoms),
            density=(None if dens is None
                     else (lambda x, c=c, d=dens: c * np.asarray(d(x), dtype=float))),
            total=c * self.total,
            tag=f"{c!r}*{self.tag}",
        )

    def with_density(self, g: Callable, tag: str = "") -> "RadialMeasure":
        """Measure with Radon-Nikodym density g(x) against this one.

        Requires dirac0 = 0; the new ball-mass distribution is accumulated by
        panel quadrature over a knot table, so g should be piecewise smooth.
        """
        if self.dirac0 != 0:
            raise ValueError("density scaling requires a measure with no origin atom")
        dens = self.density
        new_density = None
        if dens is not None:
            def new_density(x, g=g, d=dens):
                x = np.asarray(x, dtype=float)
                return np.asarray(g(x), dtype=float) * np.asarray(d(x), dtype=float)
        new_atoms = tuple((loc, float(g(np.asarray(loc))) * j) for loc, j in self.atoms)
        knot_pts = set(self.density_breakpoints) | {loc for loc, _ in self.atoms}
        knots = np.unique(np.concatenate([
            np.array(sorted(p for p in knot_pts if p < 0), dtype=float),
            -np.geomspace(1e-8, 1e7, 512),
            np.array([0.0]),
        ]))
        pieces = np.zeros(len(knots) - 1)
        if new_density is not None:
            for i in range(len(knots) - 1):
                pieces[i], _ = _panel(new_density, knots[i], knots[i + 1])
        below = 0.0
        if new_density is not None:
            tail = integrate(new_density, -math.inf, float(knots[0]))
            below = tail.value if tail.converged else 0.0
        cum_at_knots = below + np.concatenate([[0.0], np.cumsum(pieces)])
        atom_locs = np.array([loc for loc, _ in new_atoms], dtype=float)
        atom_jumps = np.array([j for _, j in new_atoms], dtype=float)

        def ball_mass_x(x, knots=knots, cum=cum_at_knots, dens=new_density,
                        atom_locs=atom_locs, atom_jumps=atom_jumps, below=below):
            x = np.asarray(x, dtype=float)
            flat = np.atleast_1d(x).ravel().astype(float)
            out = np.empty_like(flat)
            idx = np.searchsorted(knots, flat, side="right") - 1
            for pos, (xi, i) in enumerate(zip(flat, idx)):
                if i < 0:
                    tail_piece = 0.0
                    if dens is not None:
                        tail_piece = _geom_quad(dens, xi, knots[0])
                    out[pos] = max(below - tail_piece, 0.0)
                else:
                    i = min(i, len(knots) - 2) if xi < knots[-1] else len(knots) - 2
                    base = cum[i]
                    piece = 0.0
                    if dens is not None and xi > knots[i]:
                        piece, _ = _panel(dens, knots[i], min(xi, knots[-1]))
                    out[pos] = base + piece
            if len(atom_locs):
                out += (flat[:, None] >= atom_locs[None, :] - 1e-15) @ atom_jumps
            return out.reshape(np.shape(x)) if np.shape(x) else float(out[0])

        total = float(ball_mass_x(np.asarray(0.0)))
        return RadialMeasure(
            n=self.n, dirac0=0.0, ball_mass_x=ball_mass_x, atoms=new_atoms,
            density=new_density,
            density_breakpoints=tuple(sorted(knot_pts)),
            total=total, tag=tag or f"density*{self.tag}",
        )

    def to_csv(self, path: str, r_grid: Optional[np.ndarray] = None):
        """Write `r,m,atom_jump` rows plus a header comment with the metadata."""
        if r_grid is None:
            r_grid = np.geomspace(1e-6, 1.0, 256)
        rs = np.unique(np.concatenate([
            np.asarray(r_grid, dtype=float),
            np.array([math.exp(loc) for loc, _ in self.atoms]),
        ]))
        total_txt = "inf" if math.isinf(self.total) else repr(self.total)
        with open(path, "w", newline="") as fh:
            fh.write(f"# dirac0={self.dirac0!r} n={self.n} total={total_txt}\n")
            fh.write("r,m,atom_jump\n")
            for r in rs:
                m = float(self.ball_mass_x(np.asarray(math.log(r))))
                jump = self.jump_at(math.log(r))
                m_txt = "inf" if math.isinf(m) else repr(m)
                fh.write(f"{r!r},{m_txt},{jump!r}\n")

    @classmethod
    def from_csv(cls, path: str) -> "RadialMeasure":
        import csv as _csv

        dirac0, n, total = 0.0, 1, math.inf
        rows = []
        with open(path, newline="") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    for piece in line[1:].split():
                        key, _, val = piece.partition("=")
                        if key == "dirac0":
                            dirac0 = float(val)
                        elif key == "n":
                            n = int(val)
                        elif key == "total":
                            total = math.inf if val == "inf" else float(val)
                    continue
                if line.startswith("r,"):
                    continue
                parts = line.split(",")
                rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
        if not rows:
            raise ValueError("empty measure CSV")
        rows.sort()
        xs = np.log(np.array([r for r, _, _ in rows]))
        ms = np.array([m for _, m, _ in rows])
        atoms = tuple((float(x), j) for x, (_, _, j) in zip(xs, rows) if j > 0)

        def ball_mass_x(x, xs=xs, ms=ms, dirac0=dirac0):
            x = np.asarray(x, dtype=float)
            idx = np.searchsorted(xs, x, side="right") - 1
            out = np.where(idx >= 0, ms[np.clip(idx, 0, len(ms) - 1)], dirac0)
            return out

        return cls(n=n, dirac0=dirac0, ball_mass_x=ball_mass_x, atoms=atoms,
                   density=None, total=total if math.isfinite(total) else float(ms[-1]),
                   tag=f"csv:{path}")


def ma_measure(p: RadialProfile, n: int) -> RadialMeasure:
    """Monge-Ampere measure of the radial function with profile p.

    Closed-ball mass (g'_+(log r))^n; origin atom (slope at -inf)^n; one
    sphere atom per kink of g.
    """
    if n < 1 or int(n) != n:
        raise ValueError("dimension must be a positive integer")
    n = int(n)

    def ball_mass_x(x, p=p, n=n):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return np.asarray(p._right_derivative(np.minimum(x, 0.0)), dtype=float) ** n

    atoms = []
    for k in p.kinks:
        jump = float(p.right_derivative(k)) ** n - float(p.left_derivative(k)) ** n
        if jump > 0:
            atoms.append((k, jump))
    total = float(p.boundary_slope) ** n if math.isfinite(p.boundary_slope) else math.inf
    return RadialMeasure(
        n=n,
        dirac0=float(p.slope_at_minus_inf) ** n,
        ball_mass_x=ball_mass_x,
        atoms=tuple(atoms),
        density=p.ma_density(n),
        density_breakpoints=tuple(p.density_breakpoints()),
        total=total,
        tag=f"ma({p.tag}, n={n})",
    )


def nonpluripolar_part(p: RadialProfile, n: int) -> RadialMeasure:
    """The measure of p with the origin atom removed.

    In the radial model the only pluripolar piece of the measure is the atom
    at 0, so the nonpluripolar part just forces dirac0 = 0.
    """
    mu = ma_measure(p, n)
    if mu.dirac0 == 0:
        return mu
    d0 = mu.dirac0
    base = mu.ball_mass_x
    return replace(
        mu,
        dirac0=0.0,
        ball_mass_x=lambda x, f=base, d0=d0: np.maximum(np.asarray(f(x), dtype=float) - d0, 0.0),
        total=mu.total - d0 if math.isfinite(mu.total) else mu.total,
        tag=f"nonpluripolar({mu.tag})",
    )


def sublevel_mass(p: RadialProfile, s: float, n: int) -> float:
    """Mass of the open sublevel set {u < -s} under (dd^c u)^n.

    The set is an open ball, so the left limit of the ball-mass distribution
    applies: the origin atom is included, a sphere atom on the boundary of
    the sublevel set is not.
    """
    kind, x = sublevel_boundary(p, s)
    if kind == SUBLEVEL_EMPTY:
        return 0.0
    mu_total = float(p.boundary_slope) ** n if math.isfinite(p.boundary_slope) else math.inf
    if kind == SUBLEVEL_WHOLE:
        return mu_total
    return float(p.left_derivative(x)) ** n


def sublevel_mass_vec(p: RadialProfile, s: np.ndarray, n: int) -> np.ndarray:
    """Vectorized sublevel mass, using the right-continuous distribution.

    Differs from `sublevel_mass` only on the measure-zero set of levels whose
    sublevel boundary carries a sphere atom, which is immaterial inside
    integrals.
    """
    s = np.asarray(s, dtype=float)
    x, empty, whole = sublevel_boundary_vec(p, s)
    with np.errstate(over="ignore"):
        vals = np.asarray(p._left_derivative(x), dtype=float) ** n
    total = float(p.boundary_slope) ** n if math.isfinite(p.boundary_slope) else math.inf
    vals = np.where(empty, 0.0, vals)
    vals = np.where(whole, total, vals)
    return vals


def measure_of_sublevel(mu: RadialMeasure, p: RadialProfile, s) -> np.ndarray:
    """mu({u < -s}) for a general radial measure mu and profile p."""
    s_arr = np.asarray(s, dtype=float)
    x, empty, whole = sublevel_boundary_vec(p, s_arr)
    vals = np.asarray(mu.ball_mass_x(x), dtype=float)
    vals = np.where(empty, 0.0, vals)
    vals = np.where(whole, mu.total, vals)
    return float(vals) if np.ndim(s) == 0 else vals


# -- verification reports ----------------------------------------------------

@dataclass(frozen=True)
class ApproximantReport:
    """Convergence of the clipped-approximant masses on annuli off the pole."""

    j_values: tuple[float, ...]
    deviations: tuple[tuple[float, ...], ...]  # one tuple per annulus
    targets: tuple[float, ...]
    nonincreasing: bool
    final_deviation: float

    @property
    def passed(self) -> bool:
        return self.nonincreasing and self.final_deviation < 1e-10


def approximant_convergence_check(p: RadialProfile, n: int,
                                  j_list: Sequence[float],
                                  annuli: Sequence[tuple[float, float]]) -> ApproximantReport:
    """Compare clipped-approximant masses with the limit measure on annuli.

    For each annulus B = (r1, r2] avoiding the origin and each clip level j,
    computes the mass of (dd^c max(u,-j))^n restricted to B intersected with
    {u > -j} and its deviation from the mass of (dd^c u)^n on B minus the
    origin atom.  Deviations must be nonincreasing in j and tend to zero.
    """
    j_list = sorted(float(j) for j in j_list)
    mu = ma_measure(p, n)
    deviations = []
    targets = []
    for (r1, r2) in annuli:
        if not 0 < r1 < r2 <= 1:
            raise ValueError("Borel set must avoid the pole")
        x1, x2 = math.log(r1), math.log(r2)
        target = mu.interval_mass(x1, x2)
        targets.append(target)
        devs = []
        for j in j_list:
            pj = p.clip(j)
            muj = ma_measure(pj, n)
            # {u > -j} is the open region strictly outside the clip kink
            cut = p.inverse(-j) if -j >= p.inf_value else -math.inf
            lo = max(x1, cut) if math.isfinite(cut) else x1
            if lo >= x2:
                approx = 0.0
            else:
                approx = muj.interval_mass(lo, x2)
            devs.append(abs(target - approx))
        deviations.append(tuple(devs))
    flat = [list(d) for d in deviations]
    nonincr = all(
        all(d[i + 1] <= d[i] + 1e-12 for i in range(len(d) - 1)) for d in flat
    )
    final = max(d[-1] for d in flat) if flat else 0.0
    return ApproximantReport(tuple(j_list), tuple(deviations), tuple(targets),
                             nonincr, final)


def _positive_intervals(p1: RadialProfile, p2: RadialProfile) -> list[tuple[float, float]]:
    """Maximal open x-intervals where g1 > g2, as (lo, hi) with lo possibly -inf."""
    roots = list(sign_change_points(p1, p2))
    edges = [-math.inf] + roots + [0.0]
    intervals = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        probe = hi - 0.25 * (hi - lo) if math.isfinite(lo) else hi - max(1.0, abs(hi))
        probe = min(probe, -1e-12)
        d = float(p1._value(np.asarray(probe))) - float(p2._value(np.asarray(probe)))
        if d > 0:
            intervals.append((lo, hi))
    return intervals


@dataclass(frozen=True)
class ComparisonIdentityReport:
    intervals: tuple[tuple[float, float], ...]
    mass_u: tuple[float, ...]
    mass_max: tuple[float, ...]
    max_relative_gap: float

    @property
    def passed(self) -> bool:
        return self.max_relative_gap <= 1e-8


def comparison_identity_check(p1: RadialProfile, p2: RadialProfile, n: int) -> ComparisonIdentityReport:
    """On {u > v} the measures of u and of max(u, v) agree, interval by interval."""
    intervals = _positive_intervals(p1, p2)
    mu = ma_measure(p1, n)
    mu_max = ma_measure(pointwise_max(p1, p2), n)
    masses_u, masses_m = [], []
    worst = 0.0
    for lo, hi in intervals:
        m_u = mu.interval_mass(lo, hi, include_right=False)
        m_m = mu_max.interval_mass(lo, hi, include_right=False)
        masses_u.append(m_u)
        masses_m.append(m_m)
        worst = max(worst, abs(m_u - m_m) / max(m_u, m_m, 1.0))
    return ComparisonIdentityReport(tuple(intervals), tuple(masses_u),
                                    tuple(masses_m), worst)


@dataclass(frozen=True)
class MassComparisonReport:
    lhs: float
    rhs: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.slack >= -1e-10


def mass_comparison_check(phi: RadialProfile, u: RadialProfile, n: int) -> MassComparisonReport:
    """Check that the u-mass of {phi < u} is at most the phi-mass of
    {phi < u} union the polar set of phi.

    Intervals reaching x = -inf are read as open balls about the origin, so
    they carry the origin atoms of both measures; the polar set of phi
    contributes phi's origin atom when not already covered.
    """
    if u.boundary_value > 1e-12:
        raise ValueError("comparison function must be nonpositive")
    mu_phi = ma_measure(phi, n)
    if not math.isfinite(mu_phi.total):
        raise ValueError("not in the finite-mass class")
    mu_u = ma_measure(u, n)
    intervals = _positive_intervals(u, phi)  # {phi < u} = {u - phi > 0}
    lhs = 0.0
    rhs = 0.0
    covers_origin = False
    for lo, hi in intervals:
        lhs += mu_u.interval_mass(lo, hi, include_right=False)
        rhs += mu_phi.interval_mass(lo, hi, include_right=False)
        if math.isinf(lo):
            covers_origin = True
    if not covers_origin:
        rhs += mu_phi.dirac0
    return MassComparisonReport(lhs, rhs, rhs - lhs)


@dataclass(frozen=True)
class CapacitySandwichReport:
    lower: float
    mass: float
    upper: float

    @property
    def passed(self) -> bool:
        return (self.mass - self.lower) >= -1e-9 and (self.upper - self.mass) >= -1e-9


def capacity_sandwich_check(p: RadialProfile, s: float, t: float, n: int) -> CapacitySandwichReport:
    """Two-sided capacity bounds for the open sublevel mass:

        t^n Cap({u < -s-t})  <=  mass({u < -s})  <=  s^n Cap({u < -s}).
    """
    from .capacity import cap_sublevel

    if not (s > 0 and t > 0):
        raise ValueError("levels must be positive")
    total = float(p.boundary_slope) ** n if math.isfinite(p.boundary_slope) else math.inf
    if not math.isfinite(total):
        raise ValueError("not in the finite-mass class")
    lower = (t ** n) * cap_sublevel(p, s + t, n)
    mid = sublevel_mass(p, s, n)
    upper = (s ** n) * cap_sublevel(p, s, n)
    return CapacitySandwichReport(lower, mid, upper)


def total_mass_via_capacity(p: RadialProfile, n: int, rel_tol: float = 1e-9) -> float:
    """sup_s s^n Cap({u < -s}) over a log-spaced grid extended until stable.

    For finite-mass profiles this recovers the total Monge-Ampere mass.
    """
    from .capacity import cap_sublevel

    lo_exp, hi_exp = -3.0, 3.0
    best = -math.inf
    for _ in range(10):
        s = np.geomspace(10.0 ** lo_exp, 10.0 ** hi_exp, 96 * int(hi_exp - lo_exp) // 6 + 96)
        caps = np.array([cap_sublevel(p, float(si), n) for si in s])
        vals = (s ** n) * caps
        vals = vals[np.isfinite(vals)]
        new_best = float(np.max(vals)) if len(vals) else 0.0
        if best > 0 and abs(new_best - best) <= rel_tol * best:
            return max(new_best, best)
        best = max(new_best, best)
        lo_exp -= 2.0
        hi_exp += 2.0
        if lo_exp < -12:
            break
    return best
