"""Quadrature and monotone-function primitives.

Everything downstream (masses, energies, capacity integrals) reduces to
one-dimensional integrals of piecewise-smooth integrands, often improper at
one end, plus inversion of monotone functions.  The quadrature here is built
from Gauss-Legendre panels, whose nodes are strictly interior, so integrable
endpoint singularities are never sampled directly.

Improper integrals over [a, +inf) are resolved by interval doubling: the
partial sums S_k = int_a^{b0 * 2^k} are declared convergent after three
consecutive doublings change the sum by less than the relative tolerance,
and divergent when the partial sums grow by a factor >= 1.5 across three
consecutive doublings past b0 = max(a+1, 10).  Declared endpoint
singularities on finite intervals are peeled geometrically with the same
two rules.  Anything else is reported as inconclusive rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

CONVERGED = "converged"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"

DEFAULT_REL_TOL = 1e-8

_GL_HI_X, _GL_HI_W = np.polynomial.legendre.leggauss(15)
_GL_LO_X, _GL_LO_W = np.polynomial.legendre.leggauss(7)

_TINY = 1e-300
_GROWTH_FACTOR = 1.5
_GROWTH_SPAN = 3
_STABLE_RUNS = 3
_MAX_DOUBLINGS = 64
_MAX_PEELS = 200
_PANEL_BUDGET = 4096


@dataclass(frozen=True)
class TailVerdict:
    """Outcome of a possibly-improper integral.

    status is one of "converged", "diverged", "inconclusive"; value is the
    integral when converged and the last partial sum otherwise; ratio is the
    last observed doubling change (relative) or growth factor.
    """

    status: str
    value: float
    ratio: float = 0.0

    def __post_init__(self):
        if self.status not in (CONVERGED, DIVERGED, INCONCLUSIVE):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == CONVERGED and not math.isfinite(self.value):
            raise ValueError("converged verdict requires a finite value")

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def diverged(self) -> bool:
        return self.status == DIVERGED

    def __float__(self) -> float:
        return float(self.value)


def converged(value: float, ratio: float = 0.0) -> TailVerdict:
    return TailVerdict(CONVERGED, float(value), ratio)


def diverged(value: float = math.inf, ratio: float = math.inf) -> TailVerdict:
    return TailVerdict(DIVERGED, float(value), ratio)


def inconclusive(value: float, ratio: float = math.nan) -> TailVerdict:
    return TailVerdict(INCONCLUSIVE, float(value), ratio)


def _eval_vectorized(f: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to an elementwise loop."""
    try:
        vals = np.asarray(f(xs), dtype=float)
    except (TypeError, ValueError):
        vals = np.array([float(f(x)) for x in xs], dtype=float)
    if vals.ndim == 0:
        vals = np.full(xs.shape, float(vals))
    if vals.shape != xs.shape:
        vals = np.array([float(f(x)) for x in xs], dtype=float)
    return vals


def _panel(f: Callable, a: float, b: float) -> tuple[float, float]:
    """Gauss-Legendre estimate on [a, b] with an embedded error estimate."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = mid + half * np.concatenate([_GL_HI_X, _GL_LO_X])
    vals = _eval_vectorized(f, xs)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-integrable sample")
    hi = half * float(np.dot(_GL_HI_W, vals[:15]))
    lo = half * float(np.dot(_GL_LO_W, vals[15:]))
    return hi, abs(hi - lo)


def _finite_quad(f: Callable, a: float, b: float, rel_tol: float) -> tuple[float, float]:
    """Adaptive panel quadrature on a finite interval with no declared singularity.

    Returns (value, error_estimate).  Panels narrower than machine width are
    accepted as-is; the panel budget caps pathological refinement.
    """
    import heapq

    if a == b:
        return 0.0, 0.0
    val, err = _panel(f, a, b)
    heap = [(-err, a, b, val, err)]
    total, total_err = val, err
    panels = 1
    scale = abs(a) + abs(b) + 1.0
    while total_err > rel_tol * max(abs(total), _TINY) and panels < _PANEL_BUDGET and heap:
        _, pa, pb, pval, perr = heapq.heappop(heap)
        if pb - pa < 1e-15 * scale or perr == 0.0:
            total_err -= perr  # irreducible panel, accept its value
            continue
        mid = 0.5 * (pa + pb)
        v1, e1 = _panel(f, pa, mid)
        v2, e2 = _panel(f, mid, pb)
        total += v1 + v2 - pval
        total_err += e1 + e2 - perr
        heapq.heappush(heap, (-e1, pa, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, pb, v2, e2))
        panels += 2
    return total, max(total_err, 0.0)


class _SumTracker:
    """Shared bookkeeping for the doubling/peeling partial-sum rules.

    Convergence: three consecutive steps change the sum by less than rel_tol
    (relative).  Divergence: the sum grew by >= 1.5 across the last three
    steps AND the per-step increments are not decaying; the second condition
    keeps integrable mass that accumulates geometrically near a singular
    endpoint (sums like 1/2, 3/4, 7/8, ...) from being mistaken for
    divergence.
    """

    def __init__(self, rel_tol: float):
        self.rel_tol = rel_tol
        self.sums: list[float] = []
        self.increments: list[float] = []
        self.quiet = 0
        self.ratio = math.nan

    def update(self, new_sum: float, increment: float) -> Optional[str]:
        self.sums.append(new_sum)
        self.increments.append(increment)
        rel = abs(increment) / max(abs(new_sum), _TINY)
        self.ratio = rel
        if rel <= self.rel_tol:
            self.quiet += 1
            if self.quiet >= _STABLE_RUNS:
                return CONVERGED
        else:
            self.quiet = 0
        if len(self.sums) > _GROWTH_SPAN and rel > self.rel_tol:
            old = self.sums[-1 - _GROWTH_SPAN]
            old_inc = self.increments[-1 - _GROWTH_SPAN]
            recent = self.sums[-1 - _GROWTH_SPAN:]
            growing = all(
                abs(recent[i + 1]) >= abs(recent[i]) for i in range(len(recent) - 1)
            )
            inc_not_decaying = abs(increment) >= 0.9 * abs(old_inc) > 0
            if (abs(old) > 0 and growing and inc_not_decaying
                    and abs(new_sum) >= _GROWTH_FACTOR * abs(old)):
                self.ratio = abs(new_sum) / abs(old)
                return DIVERGED
        if not math.isfinite(new_sum):
            self.ratio = math.inf
            return DIVERGED
        return None


def _peel_singular_left(f: Callable, a: float, b: float, rel_tol: float) -> TailVerdict:
    """Integrate over (a, b] when f may blow up at a (declared by the caller)."""
    w = b - a
    tracker = _SumTracker(rel_tol)
    total = 0.0
    for k in range(_MAX_PEELS):
        hi = b if k == 0 else a + w * 2.0 ** (-k)
        lo = a + w * 2.0 ** (-(k + 1))
        if not lo < hi or lo == a:
            # float resolution exhausted; the remaining sliver is below noise
            # if the last pieces were already decaying into the tolerance
            if tracker.ratio <= math.sqrt(rel_tol):
                return converged(total, tracker.ratio)
            break
        piece, _ = _finite_quad(f, lo, hi, rel_tol)
        total += piece
        status = tracker.update(total, piece)
        if status == CONVERGED:
            return converged(total, tracker.ratio)
        if status == DIVERGED:
            return TailVerdict(DIVERGED, total, tracker.ratio)
    return inconclusive(total, tracker.ratio)


def _split_at_breakpoints(a: float, b: float, breakpoints: Sequence[float]) -> list[tuple[float, float]]:
    pts = sorted({float(p) for p in breakpoints if a < p < b})
    edges = [a] + pts + [b]
    return list(zip(edges[:-1], edges[1:]))


def _finite_integral(
    f: Callable,
    a: float,
    b: float,
    rel_tol: float,
    singular_left: bool,
    singular_right: bool,
    breakpoints: Sequence[float],
) -> TailVerdict:
    segments = _split_at_breakpoints(a, b, breakpoints)
    total = 0.0
    worst_ratio = 0.0
    status = CONVERGED
    for i, (lo, hi) in enumerate(segments):
        sing_l = singular_left and i == 0
        sing_r = singular_right and i == len(segments) - 1
        if sing_l and sing_r:
            mid = 0.5 * (lo + hi)
            left = _peel_singular_left(f, lo, mid, rel_tol)
            right = _peel_singular_left(lambda t: f(lo + hi - np.asarray(t)), lo, mid, rel_tol)
            for verdict in (left, right):
                total += verdict.value
                worst_ratio = max(worst_ratio, verdict.ratio if math.isfinite(verdict.ratio) else 0.0)
                if verdict.status == DIVERGED:
                    return TailVerdict(DIVERGED, total, verdict.ratio)
                if verdict.status == INCONCLUSIVE:
                    status = INCONCLUSIVE
        elif sing_l or sing_r:
            g = f if sing_l else (lambda t: f(lo + hi - np.asarray(t)))
            verdict = _peel_singular_left(g, lo, hi, rel_tol)
            total += verdict.value
            worst_ratio = max(worst_ratio, verdict.ratio if math.isfinite(verdict.ratio) else 0.0)
            if verdict.status == DIVERGED:
                return TailVerdict(DIVERGED, total, verdict.ratio)
            if verdict.status == INCONCLUSIVE:
                status = INCONCLUSIVE
        else:
            val, err = _finite_quad(f, lo, hi, rel_tol)
            total += val
            rel = err / max(abs(val), _TINY)
            worst_ratio = max(worst_ratio, rel)
            if err > 10 * rel_tol * max(abs(total), 1.0):
                status = INCONCLUSIVE
    return TailVerdict(status, total, worst_ratio)


def integrate(
    f: Callable,
    a: float,
    b: float,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    singular_left: bool = False,
    singular_right: bool = False,
    breakpoints: Sequence[float] = (),
) -> TailVerdict:
    """Integrate f over (a, b), where either endpoint may be infinite.

    f must be finite at every interior sample; a non-finite value raises
    ValueError("non-integrable sample").  Integrable endpoint singularities
    must be declared via singular_left / singular_right.  breakpoints are
    interior points where the integrand is allowed to jump (panels never
    straddle them).
    """
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError("integration bounds must satisfy a < b")
    if math.isinf(a) and math.isinf(b):
        left = integrate(f, a, 0.0, rel_tol, singular_left=singular_left,
                         breakpoints=breakpoints)
        right = integrate(f, 0.0, b, rel_tol, singular_right=singular_right,
                          breakpoints=breakpoints)
        status = CONVERGED
        for v in (left, right):
            if v.status == DIVERGED:
                return TailVerdict(DIVERGED, left.value + right.value, v.ratio)
            if v.status == INCONCLUSIVE:
                status = INCONCLUSIVE
        return TailVerdict(status, left.value + right.value, max(left.ratio, right.ratio))
    if math.isinf(a):
        mirrored = integrate(
            lambda t: f(-np.asarray(t)), -b, math.inf, rel_tol,
            singular_left=singular_right, singular_right=singular_left,
            breakpoints=[-p for p in breakpoints],
        )
        return mirrored
    if math.isinf(b):
        b0 = max(a + 1.0, 10.0)
        head = _finite_integral(f, a, b0, rel_tol, singular_left, False,
                                breakpoints)
        if head.status == DIVERGED:
            return head
        total = head.value
        tracker = _SumTracker(rel_tol)
        tracker.sums.append(total)
        tracker.increments.append(total)
        hi = b0
        for _ in range(_MAX_DOUBLINGS):
            lo, hi = hi, 2.0 * hi
            inc_verdict = _finite_integral(f, lo, hi, rel_tol, False, False, breakpoints)
            total += inc_verdict.value
            status = tracker.update(total, inc_verdict.value)
            if status == CONVERGED:
                if head.status == INCONCLUSIVE:
                    return inconclusive(total, tracker.ratio)
                return converged(total, tracker.ratio)
            if status == DIVERGED:
                return TailVerdict(DIVERGED, total, tracker.ratio)
        return inconclusive(total, tracker.ratio)
    return _finite_integral(f, a, b, rel_tol, singular_left, singular_right, breakpoints)


@dataclass(frozen=True)
class MonotoneFn:
    """A monotone scalar function, possibly with a density and atoms.

    Closed-form instances wrap a vectorized callable; grid instances are
    piecewise linear between strictly increasing knots.  atoms is a tuple of
    (location, jump) pairs for distribution functions with point masses.
    """

    fn: Callable
    direction: str = "nondecreasing"
    domain: tuple[float, float] = (-math.inf, math.inf)
    density: Optional[Callable] = None
    atoms: tuple[tuple[float, float], ...] = ()
    knots: Optional[tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.direction not in ("nondecreasing", "nonincreasing"):
            raise ValueError("direction must be nondecreasing or nonincreasing")
        if self.knots is not None:
            xs, _ = self.knots
            if np.any(np.diff(xs) <= 0):
                raise ValueError("grid knots must be strictly increasing")

    def __call__(self, x):
        return self.fn(x)

    @classmethod
    def from_grid(cls, xs, ys, direction: str = "nondecreasing", name: str = "") -> "MonotoneFn":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("grid needs two matching 1-d arrays")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("grid knots must be strictly increasing")
        diffs = np.diff(ys)
        tol = 1e-12 * np.maximum(1.0, np.abs(ys[:-1]))
        if direction == "nondecreasing" and np.any(diffs < -tol):
            raise ValueError("grid values do not respect the declared direction")
        if direction == "nonincreasing" and np.any(diffs > tol):
            raise ValueError("grid values do not respect the declared direction")
        slopes = diffs / np.diff(xs)

        def fn(x, xs=xs, ys=ys):
            return np.interp(x, xs, ys)

        def density(x, xs=xs, slopes=slopes):
            x = np.asarray(x, dtype=float)
            idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
            return slopes[idx]

        return cls(fn=fn, direction=direction, domain=(float(xs[0]), float(xs[-1])),
                   density=density, knots=(xs, ys), name=name)

    def direction_violations(self, n_samples: int = 257) -> list[str]:
        """Sample the domain and report direction violations (diagnostics)."""
        lo, hi = self.domain
        lo = max(lo, -1e12)
        hi = min(hi, 1e12)
        xs = np.linspace(lo, hi, n_samples)
        ys = _eval_vectorized(self.fn, xs)
        diffs = np.diff(ys)
        tol = 1e-12 * np.maximum(1.0, np.abs(ys[:-1]))
        bad = diffs < -tol if self.direction == "nondecreasing" else diffs > tol
        return [f"direction violated near x={xs[i]:.6g}" for i in np.nonzero(bad)[0][:8]]


def stieltjes(
    g: Callable,
    m: MonotoneFn,
    a: Optional[float] = None,
    b: Optional[float] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    singular_left: bool = False,
    singular_right: bool = False,
) -> TailVerdict:
    """Integrate g against the Stieltjes measure dm (density plus atoms).

    Atoms located in the closed interval [a, b] contribute g(location)*jump;
    the absolutely continuous part is integrated via `integrate`.  Raises
    ValueError("not a distribution function") for nonincreasing m.
    """
    if m.direction != "nondecreasing":
        raise ValueError("not a distribution function")
    lo = m.domain[0] if a is None else float(a)
    hi = m.domain[1] if b is None else float(b)
    atom_sum = 0.0
    for loc, jump in m.atoms:
        if lo <= loc <= hi:
            atom_sum += float(g(loc)) * jump
    if m.density is None:
        return converged(atom_sum)
    breakpoints = [loc for loc, _ in m.atoms]
    verdict = integrate(lambda x: np.asarray(g(x), dtype=float) * np.asarray(m.density(x), dtype=float),
                        lo, hi, rel_tol, singular_left=singular_left,
                        singular_right=singular_right, breakpoints=breakpoints)
    return TailVerdict(verdict.status, verdict.value + atom_sum, verdict.ratio)


def invert_monotone(
    f,
    y: float,
    tol: float = 1e-12,
    bracket: Optional[tuple[float, float]] = None,
) -> float:
    """Solve f(x) = y for monotone f, returning the leftmost preimage.

    f may be a MonotoneFn or a plain callable (assumed nondecreasing on the
    whole line).  On a plateau at level y the leftmost plateau point is
    returned.  Raises ValueError("out of range") when y cannot be bracketed
    or when f jumps across y.
    """
    if isinstance(f, MonotoneFn):
        fn, direction, domain = f.fn, f.direction, f.domain
    else:
        fn, direction, domain = f, "nondecreasing", (-math.inf, math.inf)
    sign = 1.0 if direction == "nondecreasing" else -1.0

    def val(x: float) -> float:
        return sign * float(fn(x))

    target = sign * y

    if bracket is not None:
        lo, hi = float(bracket[0]), float(bracket[1])
    else:
        lo = domain[0] if math.isfinite(domain[0]) else None
        hi = domain[1] if math.isfinite(domain[1]) else None
        seed = 0.0
        if lo is not None and hi is not None:
            pass
        else:
            if lo is None:
                lo = seed if hi is None else min(seed, hi) - 1.0
                step = 1.0
                for _ in range(200):
                    if val(lo) <= target:
                        break
                    lo -= step
                    step *= 2.0
                else:
                    raise ValueError("out of range")
            if hi is None:
                hi = max(lo, seed)
                step = 1.0
                for _ in range(200):
                    if val(hi) >= target:
                        break
                    hi += step
                    step *= 2.0
                else:
                    raise ValueError("out of range")
    if val(lo) > target or val(hi) < target:
        raise ValueError("out of range")

    # leftmost point where f reaches y: bisect on the predicate f(x) >= y
    for _ in range(200):
        if hi - lo <= 1e-15 * (1.0 + abs(lo) + abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if val(mid) >= target:
            hi = mid
        else:
            lo = mid
    x = hi
    if abs(float(fn(x)) - y) > tol * (1.0 + abs(y)):
        raise ValueError("out of range")
    return x
