"""Radial model functions on the unit ball.

A negative radial plurisubharmonic function u(z) = g(log|z|) is described by
its profile g: a convex nondecreasing function of x = log|z| on (-inf, 0]
with boundary value g(0-) <= 0.  Convexity in x is exactly plurisubharmonicity
of the radial function, so all checks reduce to one-dimensional calculus.

Conventions:
  * kinks carry the RIGHT derivative, so closed-ball masses downstream are
    right-continuous and sphere atoms sit at the correct radius;
  * `inverse` returns inf{x : g(x) > y}; on strictly increasing segments this
    is the leftmost preimage, and at the bottom plateau of a clipped profile
    it is the plateau's right edge (the value -j maps to the clip kink);
  * grid profiles interpolate linearly and extrapolate with the first/last
    secant slope.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .numerics import _eval_vectorized, _panel, integrate

_VALIDATION_GRID = -np.logspace(6.0, -6.0, 1024)  # x from -1e6 up to -1e-6


def _geom_quad(f, a: float, b: float) -> float:
    """Integrate f over [a, b] with a <= b < 0, splitting geometrically.

    One Gauss panel per factor-of-two in |x| keeps slowly varying slopes
    (1/x-like) accurate over arbitrarily many decades.
    """
    if a == b:
        return 0.0
    ratio = a / b  # >= 1
    n_panels = max(1, int(np.ceil(4.0 * np.log2(ratio))) if ratio > 1 else 1)
    n_panels = min(n_panels, 512)
    edges = -np.geomspace(-b, -a, n_panels + 1)[::-1]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece, _ = _panel(f, lo, hi)
        total += piece
    return total


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _check_domain(x: np.ndarray):
    if np.any(x > 0):
        raise ValueError("outside domain")


class RadialProfile:
    """Base class for profiles.  Subclasses implement the closed forms."""

    # -- evaluation ---------------------------------------------------------
    def value(self, x):
        arr, scalar = _as_float_array(x)
        _check_domain(arr)
        out = self._value(arr)
        return float(out) if scalar else out

    def __call__(self, x):
        return self.value(x)

    def right_derivative(self, x):
        arr, scalar = _as_float_array(x)
        _check_domain(arr)
        out = self._right_derivative(arr)
        return float(out) if scalar else out

    def left_derivative(self, x):
        arr, scalar = _as_float_array(x)
        _check_domain(arr)
        out = self._left_derivative(arr)
        return float(out) if scalar else out

    def inverse(self, y: float) -> float:
        """inf{x <= 0 : g(x) > y}; -inf when y is below the infimum of g."""
        y = float(y)
        if y > self.boundary_value + 1e-12 * (1 + abs(y)):
            raise ValueError("above boundary value")
        if y < self.inf_value:
            return -math.inf
        out = self._inverse(np.asarray(y))
        return float(out)

    def inverse_vec(self, y):
        arr, scalar = _as_float_array(y)
        out = self._inverse(arr)
        return float(out) if scalar else out

    # -- structure ----------------------------------------------------------
    @property
    def boundary_value(self) -> float:
        """g(0-)."""
        raise NotImplementedError

    @property
    def inf_value(self) -> float:
        """inf g = g(-inf); -inf for unbounded profiles."""
        raise NotImplementedError

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.inf_value)

    @property
    def slope_at_minus_inf(self) -> float:
        """lim of the right derivative as x -> -inf."""
        raise NotImplementedError

    @property
    def boundary_slope(self) -> float:
        """Left derivative at 0 (may be +inf)."""
        return self.left_derivative(0.0)

    @property
    def kinks(self) -> tuple[float, ...]:
        """Locations where the derivative jumps (sphere atoms downstream)."""
        return ()

    def clip(self, j: float) -> "RadialProfile":
        """max(g, -j), the canonical bounded approximant."""
        if not j > 0:
            raise ValueError("clip level must be positive")
        return ClippedProfile.of(self, float(j))

    def ma_density(self, n: int) -> Optional[Callable]:
        """d/dx of (right derivative)^n between kinks, or None when atomic."""
        return None

    def density_breakpoints(self) -> tuple[float, ...]:
        return self.kinks

    @property
    def tag(self) -> str:
        raise NotImplementedError

    # subclass hooks
    def _value(self, x: np.ndarray):
        raise NotImplementedError

    def _right_derivative(self, x: np.ndarray):
        raise NotImplementedError

    def _left_derivative(self, x: np.ndarray):
        raise NotImplementedError

    def _inverse(self, y: np.ndarray):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.tag}>"


@dataclass(frozen=True, repr=False)
class LinearProfile(RadialProfile):
    """g(x) = a*x: the profile of a*log|z|, a pure logarithmic pole."""

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("slope must be positive")

    def _value(self, x):
        return self.a * x

    def _right_derivative(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.a)

    _left_derivative = _right_derivative

    def _inverse(self, y):
        return np.asarray(y, dtype=float) / self.a

    boundary_value = property(lambda self: 0.0)
    inf_value = property(lambda self: -math.inf)
    slope_at_minus_inf = property(lambda self: self.a)

    @property
    def tag(self) -> str:
        return f"linear {self.a!r}"


@dataclass(frozen=True, repr=False)
class PowerProfile(RadialProfile):
    """g(x) = -(-x)^alpha with 0 < alpha < 1: a pole milder than logarithmic.

    The slope blows up at the boundary, so the total Monge-Ampere mass is
    infinite; these profiles sit outside the finite-mass class.
    """

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("exponent must lie in (0, 1)")

    def _value(self, x):
        return -np.power(-x, self.alpha)

    def _right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = self.alpha * np.power(-x, self.alpha - 1.0)
        return out

    _left_derivative = _right_derivative

    def _inverse(self, y):
        return -np.power(-np.asarray(y, dtype=float), 1.0 / self.alpha)

    boundary_value = property(lambda self: 0.0)
    inf_value = property(lambda self: -math.inf)
    slope_at_minus_inf = property(lambda self: 0.0)

    def ma_density(self, n: int):
        a = self.alpha

        def density(x, a=a, n=n):
            x = np.asarray(x, dtype=float)
            return (a ** n) * n * (1.0 - a) * np.power(-x, n * (a - 1.0) - 1.0)

        return density

    @property
    def tag(self) -> str:
        return f"power {self.alpha!r}"


@dataclass(frozen=True, repr=False)
class Log1mProfile(RadialProfile):
    """g(x) = -c*log(1-x): a pole at the origin with finite total mass."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("coefficient must be positive")

    def _value(self, x):
        return -self.c * np.log1p(-np.asarray(x, dtype=float))

    def _right_derivative(self, x):
        return self.c / (1.0 - np.asarray(x, dtype=float))

    _left_derivative = _right_derivative

    def _inverse(self, y):
        return 1.0 - np.exp(-np.asarray(y, dtype=float) / self.c)

    boundary_value = property(lambda self: 0.0)
    inf_value = property(lambda self: -math.inf)
    slope_at_minus_inf = property(lambda self: 0.0)

    def ma_density(self, n: int):
        c = self.c

        def density(x, c=c, n=n):
            x = np.asarray(x, dtype=float)
            return n * (c ** n) * np.power(1.0 - x, -(n + 1.0))

        return density

    @property
    def tag(self) -> str:
        return f"log1m {self.c!r}"


@dataclass(frozen=True, repr=False)
class ClippedProfile(RadialProfile):
    """max(base, -j): constant -j below the kink, equal to base above it."""

    base: RadialProfile
    j: float
    # kink location, or None when the clip never binds (base stays above -j)
    kink_x: Optional[float] = field(default=None)

    @classmethod
    def of(cls, base: RadialProfile, j: float) -> "ClippedProfile":
        if isinstance(base, ClippedProfile):
            # max(max(g,-j1),-j2) = max(g, -min(j1,j2))
            return cls.of(base.base, min(base.j, j))
        kink = base.inverse(-j) if -j >= base.inf_value else None
        if kink is not None and math.isinf(kink):
            kink = None
        return cls(base=base, j=j, kink_x=kink)

    def _active(self, x):
        if self.kink_x is None:
            return np.ones_like(np.asarray(x, dtype=float), dtype=bool)
        return np.asarray(x, dtype=float) >= self.kink_x

    def _value(self, x):
        return np.maximum(self.base._value(x), -self.j)

    def _right_derivative(self, x):
        return np.where(self._active(x), self.base._right_derivative(x), 0.0)

    def _left_derivative(self, x):
        if self.kink_x is None:
            return self.base._left_derivative(x)
        x = np.asarray(x, dtype=float)
        return np.where(x > self.kink_x, self.base._left_derivative(x), 0.0)

    def _inverse(self, y):
        y = np.asarray(y, dtype=float)
        base_inv = self.base._inverse(np.maximum(y, -self.j))
        if self.kink_x is None:
            return base_inv
        return np.where(y > -self.j, base_inv, self.kink_x)

    @property
    def boundary_value(self) -> float:
        return max(self.base.boundary_value, -self.j)

    @property
    def inf_value(self) -> float:
        return max(self.base.inf_value, -self.j)

    @property
    def slope_at_minus_inf(self) -> float:
        return 0.0 if self.kink_x is not None else self.base.slope_at_minus_inf

    @property
    def kinks(self) -> tuple[float, ...]:
        above = tuple(k for k in self.base.kinks
                      if self.kink_x is None or k > self.kink_x)
        if self.kink_x is None:
            return above
        return (self.kink_x,) + above

    def ma_density(self, n: int):
        base_density = self.base.ma_density(n)
        if base_density is None:
            return None
        kink = self.kink_x

        def density(x, base_density=base_density, kink=kink):
            x = np.asarray(x, dtype=float)
            vals = base_density(x)
            if kink is None:
                return vals
            return np.where(x >= kink, vals, 0.0)

        return density

    @property
    def tag(self) -> str:
        return f"clip({self.base.tag}, {self.j!r})"


@dataclass(frozen=True, repr=False)
class GridProfile(RadialProfile):
    """Piecewise-linear profile through knots (x_i, g_i), x_i <= 0 increasing.

    Below the first knot the first secant slope extends the profile; above
    the last knot the last slope continues up to x = 0.  The Monge-Ampere
    measure of a grid profile is purely atomic.
    """

    xs: np.ndarray
    ys: np.ndarray
    slopes: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("grid needs two matching 1-d arrays with >= 2 knots")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("grid knots must be strictly increasing")
        if xs[-1] > 0:
            raise ValueError("grid knots must satisfy x <= 0")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "slopes", np.diff(ys) / np.diff(xs))

    def _segment_index(self, x):
        # index i such that x belongs to [xs[i], xs[i+1]); clamped at the ends
        return np.clip(np.searchsorted(self.xs, x, side="right") - 1,
                       0, len(self.slopes) - 1)

    def _value(self, x):
        x = np.asarray(x, dtype=float)
        idx = self._segment_index(x)
        return self.ys[idx] + self.slopes[idx] * (x - self.xs[idx])

    def _right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1,
                      0, len(self.slopes) - 1)
        return self.slopes[idx]

    def _left_derivative(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.xs, x, side="left") - 1,
                      0, len(self.slopes) - 1)
        return self.slopes[idx]

    def _inverse(self, y):
        y = np.asarray(y, dtype=float)
        node_vals = self.ys
        idx = np.clip(np.searchsorted(node_vals, y, side="left") - 1,
                      0, len(self.slopes) - 1)
        slope = self.slopes[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = self.xs[idx] + (y - self.ys[idx]) / slope
        # plateau segments: leftmost knot of the plateau
        x = np.where(slope == 0.0, self.xs[idx], x)
        # exact knot hits: snap to the knot (leftmost preimage)
        exact = np.isin(y, node_vals)
        if np.any(exact):
            knot_idx = np.searchsorted(node_vals, y, side="left")
            knot_idx = np.clip(knot_idx, 0, len(self.xs) - 1)
            x = np.where(exact, self.xs[knot_idx], x)
        return x

    @property
    def boundary_value(self) -> float:
        return float(self.ys[-1] + self.slopes[-1] * (0.0 - self.xs[-1]))

    @property
    def inf_value(self) -> float:
        return -math.inf if self.slopes[0] > 0 else float(self.ys[0])

    @property
    def slope_at_minus_inf(self) -> float:
        return float(self.slopes[0])

    @property
    def kinks(self) -> tuple[float, ...]:
        jumps = np.nonzero(np.abs(np.diff(self.slopes)) > 0)[0]
        return tuple(float(self.xs[i + 1]) for i in jumps)

    @property
    def tag(self) -> str:
        return f"grid[{len(self.xs)}]"

    @classmethod
    def from_csv(cls, path: str) -> "GridProfile":
        xs, ys = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["x", "gamma"]:
                raise ValueError("profile CSV must have header 'x,gamma'")
            for row in reader:
                if not row:
                    continue
                xs.append(float(row[0]))
                ys.append(float(row[1]))
        return cls(np.asarray(xs), np.asarray(ys))


@dataclass(frozen=True, repr=False)
class MaxProfile(RadialProfile):
    """Pointwise maximum of two profiles (convex as a max of convex)."""

    p1: RadialProfile
    p2: RadialProfile
    crossings: tuple[float, ...] = field(default=None, repr=False)

    def __post_init__(self):
        if self.crossings is None:
            object.__setattr__(self, "crossings",
                               sign_change_points(self.p1, self.p2))

    def _diff(self, x):
        return self.p1._value(np.asarray(x, dtype=float)) - self.p2._value(np.asarray(x, dtype=float))

    def _value(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(self.p1._value(x), self.p2._value(x))

    def _right_derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = self._diff(x)
        d1 = self.p1._right_derivative(x)
        d2 = self.p2._right_derivative(x)
        tol = 1e-12 * (1.0 + np.abs(self.p1._value(x)))
        out = np.where(d > tol, d1, np.where(d < -tol, d2, np.maximum(d1, d2)))
        return out

    def _left_derivative(self, x):
        x = np.asarray(x, dtype=float)
        d = self._diff(x)
        tol = 1e-12 * (1.0 + np.abs(self.p1._value(x)))
        # on ties probe slightly to the left to find the active branch
        probe = x - 1e-9 * (1.0 + np.abs(x))
        probe = np.minimum(probe, 0.0)
        d_probe = self._diff(probe)
        use_p1 = np.where(np.abs(d) > tol, d > 0, d_probe > 0)
        return np.where(use_p1, self.p1._left_derivative(x), self.p2._left_derivative(x))

    def _inverse(self, y):
        return _bisect_inverse(self, np.asarray(y, dtype=float))

    @property
    def boundary_value(self) -> float:
        return max(self.p1.boundary_value, self.p2.boundary_value)

    @property
    def inf_value(self) -> float:
        return max(self.p1.inf_value, self.p2.inf_value)

    @property
    def slope_at_minus_inf(self) -> float:
        i1, i2 = self.p1.inf_value, self.p2.inf_value
        if math.isfinite(i1) and i1 >= i2:
            return 0.0
        if math.isfinite(i2) and i2 >= i1:
            return 0.0
        # both unbounded: the shallower pole dominates near -inf
        return min(self.p1.slope_at_minus_inf, self.p2.slope_at_minus_inf)

    @property
    def kinks(self) -> tuple[float, ...]:
        ks = set(self.crossings)
        probe_tol = 1e-12
        for p, sign in ((self.p1, 1.0), (self.p2, -1.0)):
            for k in p.kinks:
                if sign * float(self._diff(np.asarray(k))) > probe_tol:
                    ks.add(k)
        return tuple(sorted(ks))

    def ma_density(self, n: int):
        dens1 = self.p1.ma_density(n)
        dens2 = self.p2.ma_density(n)

        def density(x, dens1=dens1, dens2=dens2):
            x = np.asarray(x, dtype=float)
            d = self._diff(x)
            v1 = dens1(x) if dens1 is not None else np.zeros_like(x)
            v2 = dens2(x) if dens2 is not None else np.zeros_like(x)
            return np.where(d >= 0, v1, v2)

        return density

    def density_breakpoints(self) -> tuple[float, ...]:
        pts = set(self.kinks)
        pts.update(self.p1.density_breakpoints())
        pts.update(self.p2.density_breakpoints())
        return tuple(sorted(pts))

    @property
    def tag(self) -> str:
        return f"max({self.p1.tag}, {self.p2.tag})"


class SlopeProfile(RadialProfile):
    """Profile reconstructed from its slope: g(x) = -int_x^0 sigma(s) ds.

    sigma must be nonnegative, nondecreasing, and right-continuous; its jumps
    become kinks of the profile.  right_derivative returns sigma exactly, so
    the Monge-Ampere mass distribution of the reconstruction reproduces the
    source measure without quadrature error; only pointwise values of g go
    through panel integration over a cached knot table.
    """

    def __init__(self, sigma: Callable, *, jump_locations: Sequence[float] = (),
                 jumps: Sequence[float] = (), breakpoints: Sequence[float] = (),
                 sigma_at_minus_inf: float = 0.0, source_measure=None,
                 tag: str = "solved"):
        self._sigma = sigma
        self._jump_locations = tuple(float(x) for x in jump_locations)
        self._jumps = tuple(float(j) for j in jumps)
        self._sigma_inf = float(sigma_at_minus_inf)
        self.source_measure = source_measure
        self._tag = tag
        self.has_log_pole = self._sigma_inf > 0
        pts = set(self._jump_locations) | {float(b) for b in breakpoints}
        pts = {p for p in pts if p < 0}
        # the table spans the whole double range so that evaluation anywhere
        # is one cached value plus one local panel
        knots = np.unique(np.concatenate([
            np.array(sorted(pts), dtype=float),
            -np.geomspace(1e-8, 1e300, 1280),
            np.array([0.0]),
        ]))
        self._knots = knots
        self._knot_values = self._build_table(knots)
        self._inf_value_cache: Optional[float] = None

    def _build_table(self, knots: np.ndarray) -> np.ndarray:
        # one Gauss-Legendre panel per knot gap; sigma is smooth between knots
        pieces = np.zeros(len(knots) - 1)
        for i in range(len(knots) - 1):
            pieces[i], _ = _panel(self._sigma, knots[i], knots[i + 1])
        cum = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        return -cum  # g at each knot

    def _value(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        out = np.empty_like(flat)
        idx = np.searchsorted(self._knots, flat, side="right")
        for pos, (xi, i) in enumerate(zip(flat, idx)):
            if i == 0:
                # below the cached range: one geometric chain to the table edge
                piece = _geom_quad(self._sigma, xi, self._knots[0])
                out[pos] = self._knot_values[0] - piece
            else:
                i = min(i, len(self._knots) - 1)
                piece, _ = _panel(self._sigma, xi, self._knots[i]) if xi < self._knots[i] else (0.0, 0.0)
                out[pos] = self._knot_values[i] - piece
        return out.reshape(np.shape(x)) if np.shape(x) else float(out[0])

    def _right_derivative(self, x):
        return np.asarray(self._sigma(np.asarray(x, dtype=float)), dtype=float)

    def _left_derivative(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.asarray(self._sigma(x), dtype=float).copy()
        for loc, jump in zip(self._jump_locations, self._jumps):
            vals = np.where(np.abs(x - loc) <= 1e-14 * (1 + abs(loc)), vals - jump, vals)
        return vals

    def _inverse(self, y):
        """Table-bracketed Newton: the knot table brackets the solution and
        sigma is the exact derivative of the profile inside each gap."""
        y_in = np.asarray(y, dtype=float)
        y_arr = np.atleast_1d(y_in).astype(float)
        kv = self._knot_values
        out = np.empty_like(y_arr)
        below = y_arr < kv[0]
        out[below] = -math.inf  # deeper than the cached range: x < -1e300
        rest = ~below
        if np.any(rest):
            yr = y_arr[rest]
            idx = np.clip(np.searchsorted(kv, yr, side="right") - 1, 0, len(kv) - 2)
            lo, hi = self._knots[idx], self._knots[idx + 1]
            vlo, vhi = kv[idx], kv[idx + 1]
            gap = np.maximum(vhi - vlo, 1e-300)
            x = hi - (vhi - yr) * (hi - lo) / gap
            for _ in range(60):
                gx = np.asarray(self._value(x), dtype=float)
                resid = gx - yr
                if np.all(np.abs(resid) <= 1e-13 * (1.0 + np.abs(yr))):
                    break
                sig = np.maximum(np.asarray(self._sigma(x), dtype=float), 1e-300)
                x = np.clip(x - resid / sig, lo, hi)
            out[rest] = x
        return out.reshape(np.shape(y_in)) if np.shape(y_in) else float(out[0])

    @property
    def boundary_value(self) -> float:
        return 0.0

    @property
    def inf_value(self) -> float:
        if self._inf_value_cache is None:
            if self._sigma_inf > 0:
                self._inf_value_cache = -math.inf
            else:
                verdict = integrate(self._sigma, -math.inf, 0.0,
                                    breakpoints=self._jump_locations)
                self._inf_value_cache = -verdict.value if verdict.converged else -math.inf
        return self._inf_value_cache

    @property
    def slope_at_minus_inf(self) -> float:
        return self._sigma_inf

    @property
    def kinks(self) -> tuple[float, ...]:
        return self._jump_locations

    def ma_density(self, n: int):
        if self.source_measure is not None:
            return self.source_measure.density
        return None

    def density_breakpoints(self) -> tuple[float, ...]:
        if self.source_measure is not None:
            return tuple(self.source_measure.density_breakpoints) + self._jump_locations
        return self._jump_locations

    @property
    def tag(self) -> str:
        return self._tag


def _bisect_inverse(p: RadialProfile, y: np.ndarray) -> np.ndarray:
    """Vectorized leftmost inverse for profiles without a closed form.

    Targets deeper than float range (slowly-unbounded profiles at huge
    levels) come back as -inf, which downstream reads as a sublevel set of
    capacity zero at double precision.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    lo = np.full_like(y, -1.0)
    hi = np.zeros_like(y)
    unreachable = np.zeros(y.shape, dtype=bool)
    for _ in range(400):
        vals = p._value(lo)
        need = vals > y
        if not np.any(need):
            break
        lo = np.where(need, lo * 8.0, lo)
        too_deep = need & (lo < -1e300)
        if np.any(too_deep):
            unreachable |= too_deep
            lo = np.where(too_deep, -1e300, lo)
            if not np.any(need & ~too_deep):
                break
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        vmid = p._value(mid)
        above = vmid > y
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    out = np.where(unreachable, -math.inf, hi)
    return out if out.shape else float(out)


def pointwise_max(p1: RadialProfile, p2: RadialProfile) -> RadialProfile:
    """Profile of max(u, v)."""
    if p1 is p2:
        return p1
    return MaxProfile(p1, p2)


def extremal_profile(r0: float) -> RadialProfile:
    """Relative extremal profile of the closed ball of radius r0.

    Equals -1 on the ball, 0 at the outer boundary: max(x / log(1/r0), -1).
    """
    if not 0 < r0 < 1:
        raise ValueError("radius out of range")
    return ClippedProfile.of(LinearProfile(1.0 / math.log(1.0 / r0)), 1.0)


def sign_change_points(p1: RadialProfile, p2: RadialProfile,
                       max_changes: int = 64) -> tuple[float, ...]:
    """Roots of g1 - g2 located by a sign-change scan plus bisection."""
    grid = np.unique(np.concatenate([
        -np.logspace(8.0, -9.0, 2048),
        np.asarray(p1.kinks, dtype=float) if p1.kinks else np.empty(0),
        np.asarray(p2.kinks, dtype=float) if p2.kinks else np.empty(0),
    ]))
    grid = grid[grid < 0]
    d = p1._value(grid) - p2._value(grid)
    sign = np.sign(d)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) > max_changes:
        raise ValueError("profiles too oscillatory")
    roots = []
    for i in flips:
        lo, hi = grid[i], grid[i + 1]
        flo = float(p1._value(np.asarray(lo)) - p2._value(np.asarray(lo)))
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            fm = float(p1._value(np.asarray(mid)) - p2._value(np.asarray(mid)))
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return tuple(roots)


@dataclass(frozen=True)
class ProfileDiagnostics:
    valid: bool
    violations: tuple[str, ...]
    bounded: bool
    boundary_value: float
    inf_value: float


def validate(p: RadialProfile) -> ProfileDiagnostics:
    """Check monotonicity and convexity on a 1024-point log-spaced grid.

    Diagnostics only: no exception is raised for invalid profiles.
    """
    xs = _VALIDATION_GRID
    violations: list[str] = []
    vals = np.asarray(p._value(xs), dtype=float)
    if np.any(np.diff(vals) < -1e-9 * np.maximum(1.0, np.abs(vals[:-1]))):
        violations.append("monotonicity: values decrease along the grid")
    ders = np.asarray(p._right_derivative(xs), dtype=float)
    finite = np.isfinite(ders)
    dd = np.diff(ders[finite])
    if np.any(dd < -1e-9 * np.maximum(1.0, np.abs(ders[finite][:-1]))):
        violations.append("convexity: right derivative decreases along the grid")
    bv = p.boundary_value
    if bv > 1e-12:
        violations.append(f"boundary value {bv:.3g} exceeds 0")
    return ProfileDiagnostics(
        valid=not violations,
        violations=tuple(violations),
        bounded=p.bounded,
        boundary_value=bv,
        inf_value=p.inf_value,
    )


# -- sublevel geometry -------------------------------------------------------

SUBLEVEL_EMPTY = "empty"
SUBLEVEL_WHOLE = "whole"
SUBLEVEL_BALL = "ball"


def sublevel_boundary(p: RadialProfile, s: float) -> tuple[str, Optional[float]]:
    """Describe the open sublevel set {u < -s} for s > 0.

    Returns ("empty", None) when g >= -s everywhere, ("whole", None) when the
    sublevel set is the whole ball, and ("ball", x*) when it is the ball of
    radius e^{x*}.
    """
    if not s > 0:
        raise ValueError("level must be positive")
    y = -float(s)
    if y <= p.inf_value:
        return SUBLEVEL_EMPTY, None
    if y > p.boundary_value:
        return SUBLEVEL_WHOLE, None
    x = p.inverse(y)
    if math.isinf(x):
        return SUBLEVEL_EMPTY, None
    return SUBLEVEL_BALL, min(x, 0.0)


def sublevel_boundary_vec(p: RadialProfile, s: np.ndarray):
    """Vectorized sublevel boundary: (x*, empty_mask, whole_mask)."""
    s = np.asarray(s, dtype=float)
    y = -s
    empty = y <= p.inf_value
    whole = y > p.boundary_value
    safe_y = np.where(empty | whole, min(p.boundary_value, 0.0) - 0.5, y)
    safe_y = np.minimum(safe_y, p.boundary_value)
    x = np.minimum(np.asarray(p._inverse(safe_y), dtype=float), 0.0)
    return x, empty, whole


# -- parsing / serialization for the batch front-end -------------------------

def parse_profile(spec: str) -> RadialProfile:
    """Parse a profile description like 'linear 1.0' or 'grid knots.csv'."""
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty profile spec")
    family, args = tokens[0], tokens[1:]
    if family == "linear":
        if len(args) != 1:
            raise ValueError("linear profile needs one parameter")
        return LinearProfile(float(args[0]))
    if family == "power":
        if len(args) != 1:
            raise ValueError("power profile needs one parameter")
        return PowerProfile(float(args[0]))
    if family == "log1m":
        if len(args) != 1:
            raise ValueError("log1m profile needs one parameter")
        return Log1mProfile(float(args[0]))
    if family == "extremal":
        if len(args) != 1:
            raise ValueError("extremal profile needs one parameter")
        return extremal_profile(float(args[0]))
    if family == "clip":
        if len(args) < 3:
            raise ValueError("clip needs a base profile and a level")
        base = parse_profile(" ".join(args[:-1]))
        return base.clip(float(args[-1]))
    if family == "grid":
        if len(args) != 1:
            raise ValueError("grid profile needs a CSV path")
        return GridProfile.from_csv(args[0])
    raise ValueError(f"unknown profile family {family!r}")
