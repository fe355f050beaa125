"""Solving (dd^c u)^n = mu radially and bounding how singular the solution is.

A decay modulus is a nonincreasing eps: [0, inf) -> [0, inf); the envelope
F(x) = x * eps(-ln x / n)^n interpolates between a linear bound (eps = 1)
and fast-vanishing bounds.  When every closed ball satisfies
mu(ball) <= F(Cap(ball)), the solution of the radial inverse problem obeys

    Cap({u < -s}) <= exp(-n H^{-1}(s)),
    H(x) = e * int_0^x eps + e * eps(0) + mu_total^{1/n},

with a uniform lower bound on u when eps is integrable.  The bound comes out
of the level iteration s_{j+1} = s_j + e * eps(f(s_j)), where
f(s) = -(1/n) log Cap({u < -s}) gains at least one unit per step.

The radial inverse solve itself is elementary: the profile is the
antiderivative of m(e^x)^{1/n} anchored at g(0) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .capacity import CapacityCurve, cap_ball, cap_sublevel_vec, capacity_curve
from .energy import CallableWeight, Weight, capacity_criterion, weighted_energy
from .measures import RadialMeasure, ma_measure, measure_of_sublevel
from .numerics import MonotoneFn, TailVerdict, integrate, invert_monotone
from .profiles import RadialProfile, SlopeProfile

__all__ = [
    "DecayModulus",
    "ConstantModulus",
    "ExpDecayModulus",
    "PowerDecayModulus",
    "GridModulus",
    "mass_envelope",
    "domination_check",
    "step_envelope",
    "envelope_inverse",
    "capacity_bound",
    "level_iteration",
    "uniform_bound",
    "solve_radial",
    "verify_capacity_decay",
    "solve_via_truncation",
    "holder_constant",
    "moment_check",
    "parse_modulus",
]

_E = math.e


class DecayModulus:
    """Nonincreasing eps >= 0 with closed-form primitive and tail integral."""

    integrable: bool = False

    def rate(self, t):
        """eps(t); constant extension eps(t) = eps(0) for t < 0."""
        raise NotImplementedError

    def primitive(self, x) -> float:
        """int_0^x eps(t) dt for x >= 0."""
        raise NotImplementedError

    @property
    def rate0(self) -> float:
        return float(self.rate(np.asarray(0.0)))

    @property
    def tail_total(self) -> float:
        """int_0^inf eps(t) dt (may be +inf)."""
        raise NotImplementedError

    @property
    def tag(self) -> str:
        return type(self).__name__

    def __repr__(self):
        return f"<DecayModulus {self.tag}>"


@dataclass(frozen=True, repr=False)
class ConstantModulus(DecayModulus):
    """eps = c: mass dominated by c^n * capacity."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("constant must be positive")

    integrable = False

    def rate(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.c)

    def primitive(self, x):
        return self.c * float(x)

    @property
    def tail_total(self):
        return math.inf

    @property
    def tag(self):
        return f"constant {self.c!r}"


@dataclass(frozen=True, repr=False)
class ExpDecayModulus(DecayModulus):
    """eps(t) = exp(-lam t): integrable, hence bounded solutions."""

    lam: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("rate must be positive")

    integrable = True

    def rate(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return np.exp(-self.lam * t)

    def primitive(self, x):
        return (1.0 - math.exp(-self.lam * float(x))) / self.lam

    @property
    def tail_total(self):
        return 1.0 / self.lam

    @property
    def tag(self):
        return f"exp_decay {self.lam!r}"


@dataclass(frozen=True, repr=False)
class PowerDecayModulus(DecayModulus):
    """eps(t) = (1+t)^{-beta}: integrable iff beta > 1."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("exponent must be positive")

    @property
    def integrable(self):
        return self.beta > 1.0

    def rate(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return np.power(1.0 + t, -self.beta)

    def primitive(self, x):
        x = float(x)
        if self.beta == 1.0:
            return math.log1p(x)
        return ((1.0 + x) ** (1.0 - self.beta) - 1.0) / (1.0 - self.beta)

    @property
    def tail_total(self):
        return 1.0 / (self.beta - 1.0) if self.beta > 1.0 else math.inf

    @property
    def tag(self):
        return f"power_decay {self.beta!r}"


class GridModulus(DecayModulus):
    """Piecewise-linear nonincreasing modulus; constant beyond the last knot."""

    def __init__(self, ts, values, tag: str = "grid"):
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
            raise ValueError("grid modulus needs two matching 1-d arrays")
        if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
            raise ValueError("knots must start at 0 and increase")
        if np.any(values < 0) or np.any(np.diff(values) > 1e-12):
            raise ValueError("modulus must be nonnegative and nonincreasing")
        self.ts = ts
        self.values = values
        seg = 0.5 * (values[1:] + values[:-1]) * np.diff(ts)
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])
        self._tag = tag

    integrable = property(lambda self: bool(self.values[-1] == 0.0))

    def rate(self, t):
        t = np.maximum(np.asarray(t, dtype=float), 0.0)
        return np.interp(t, self.ts, self.values)

    def primitive(self, x):
        x = float(x)
        if x <= self.ts[-1]:
            return float(np.interp(x, self.ts, self._cum))
        return float(self._cum[-1] + self.values[-1] * (x - self.ts[-1]))

    @property
    def tail_total(self):
        return float(self._cum[-1]) if self.values[-1] == 0.0 else math.inf

    @property
    def tag(self):
        return self._tag


def parse_modulus(spec: str) -> DecayModulus:
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty modulus spec")
    family, args = tokens[0], tokens[1:]
    if family == "constant":
        return ConstantModulus(float(args[0]) if args else 1.0)
    if family == "exp_decay":
        return ExpDecayModulus(float(args[0]) if args else 1.0)
    if family == "power_decay":
        return PowerDecayModulus(float(args[0]))
    raise ValueError(f"unknown modulus family {family!r}")


# -- the mass-vs-capacity envelope ---------------------------------------------

def mass_envelope(d: DecayModulus, x: float, n: int) -> float:
    """F(x) = x * eps(-ln x / n)^n, the largest mass a compact of capacity x
    may carry under the domination hypothesis."""
    x = float(x)
    if x <= 0:
        raise ValueError("domain")
    return x * float(d.rate(np.asarray(-math.log(x) / n))) ** n


@dataclass(frozen=True)
class DominationReport:
    radii: np.ndarray
    masses: np.ndarray
    envelopes: np.ndarray
    worst_ratio: float

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1.0 + 1e-12


def domination_check(mu: RadialMeasure, d: DecayModulus,
                     r_grid: Optional[np.ndarray] = None) -> DominationReport:
    """Check mu(closed ball) <= F(Cap(closed ball)) on a radius grid.

    Closed balls are the extremal compacts for rotation-invariant measures,
    so they are the test family.  Measures charging the origin fail the
    hypothesis outright.
    """
    if mu.dirac0 > 0:
        raise ValueError("charges a pluripolar set")
    rs = np.geomspace(1e-6, 1.0 - 1e-6, 256) if r_grid is None else np.asarray(r_grid, dtype=float)
    masses = np.asarray(mu.ball_mass_x(np.log(rs)), dtype=float)
    envelopes = np.array([mass_envelope(d, cap_ball(float(r), mu.n), mu.n) for r in rs])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(masses == 0.0, 0.0, masses / envelopes)
    return DominationReport(rs, masses, envelopes, float(np.max(ratios)))


def step_envelope(d: DecayModulus, mu_total: float, n: int) -> MonotoneFn:
    """H(x) = e int_0^x eps + e eps(0) + mu_total^{1/n}.

    H(N) dominates the level s_{N+1} reached after N steps of the level
    iteration, so H^{-1}(s) undercounts the steps needed to pass level s and
    exp(-n H^{-1}(s)) bounds the capacity of {u < -s}.
    """
    if not (math.isfinite(mu_total) and mu_total > 0):
        raise ValueError("total mass must be positive and finite")
    offset = _E * d.rate0 + mu_total ** (1.0 / n)

    def fn(x, d=d, offset=offset):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x)
        vals = np.array([_E * d.primitive(max(float(xi), 0.0)) + offset for xi in flat])
        return vals.reshape(np.shape(x)) if np.shape(x) else float(vals[0])

    return MonotoneFn(fn=fn, direction="nondecreasing", domain=(0.0, math.inf),
                      name=f"step_envelope({d.tag})")


def envelope_sup(d: DecayModulus, mu_total: float, n: int) -> float:
    """sup H = e int_0^inf eps + e eps(0) + mu_total^{1/n} (inf if eps is not
    integrable)."""
    if not d.integrable:
        return math.inf
    return _E * d.tail_total + _E * d.rate0 + mu_total ** (1.0 / n)


def envelope_inverse(d: DecayModulus, mu_total: float, n: int, s: float) -> Optional[float]:
    """H^{-1}(s); None when s exceeds sup H (bounded-solution regime)."""
    H = step_envelope(d, mu_total, n)
    h0 = float(H(np.asarray(0.0)))
    if s < h0:
        return None
    if isinstance(d, ConstantModulus):
        return (s - h0) / (_E * d.c)
    sup_h = envelope_sup(d, mu_total, n)
    if s >= sup_h:
        return None
    hi = 1.0
    for _ in range(200):
        if float(H(np.asarray(hi))) >= s:
            break
        hi *= 2.0
    else:
        return None
    return invert_monotone(H, s, tol=1e-11, bracket=(0.0, hi))


def capacity_bound(d: DecayModulus, mu_total: float, n: int, s: float) -> float:
    """exp(-n H^{-1}(s)) for s >= H(0); 1 below H(0) (the bound is vacuous
    there); 0 above sup H (the solution is bounded)."""
    if not s > 0:
        raise ValueError("level must be positive")
    H = step_envelope(d, mu_total, n)
    h0 = float(H(np.asarray(0.0)))
    if s < h0:
        return 1.0
    if d.integrable and s >= envelope_sup(d, mu_total, n):
        return 0.0
    x = envelope_inverse(d, mu_total, n, s)
    if x is None:
        return 0.0
    return math.exp(-n * x) if n * x < 745 else 0.0


def uniform_bound(d: DecayModulus, mu_total: float, n: int) -> float:
    """A priori bound on sup |u| when eps is integrable:
    e int_0^inf eps + e eps(0) + mu_total^{1/n}; +inf otherwise."""
    if not d.integrable:
        return math.inf
    return _E * d.tail_total + _E * d.rate0 + mu_total ** (1.0 / n)


@dataclass(frozen=True)
class LevelIteration:
    s: tuple[float, ...]
    f: tuple[float, ...]
    s0: float
    invariant_margins: tuple[float, ...]  # f(s_j) - (j + f(s_0))

    @property
    def invariant_holds(self) -> bool:
        return all(m >= -1e-9 for m in self.invariant_margins)


def level_iteration(d: DecayModulus, curve: CapacityCurve,
                    s0_override: Optional[float] = None,
                    max_steps: int = 10_000) -> LevelIteration:
    """Run s_{j+1} = s_j + e * eps(f(s_j)) until the capacity drops below
    1e-40 or the step budget is exhausted.

    The default starting level is the total mass to the power 1/n, recovered
    from the curve through sup s * exp(-f(s)).  On the true capacity curve of
    a dominated solution each step gains at least one unit of f; the margins
    f(s_j) - j - f(s_0) are reported.
    """
    n = curve.n
    if s0_override is not None:
        s0 = float(s0_override)
    else:
        finite = np.isfinite(curve.f)
        s0 = float(np.max(curve.s[finite] * np.exp(-curve.f[finite]))) if np.any(finite) else 1.0
    target = 40.0 * math.log(10.0) / n
    s_vals, f_vals = [], []
    s = s0
    for _ in range(max_steps):
        fs = float(curve.f_of(s))
        s_vals.append(s)
        f_vals.append(fs)
        if fs >= target or math.isinf(fs):
            break
        s = s + _E * float(d.rate(np.asarray(fs)))
    f0 = f_vals[0]
    margins = tuple(
        (f - (j + f0)) if math.isfinite(f) else math.inf
        for j, f in enumerate(f_vals)
    )
    return LevelIteration(tuple(s_vals), tuple(f_vals), s0, margins)


# -- the radial inverse problem --------------------------------------------------

def solve_radial(mu: RadialMeasure) -> SlopeProfile:
    """The radial profile whose Monge-Ampere measure is mu.

    Slope m(e^x)^{1/n}, anchored at g(0) = 0.  Requires finite total mass;
    an origin atom is accepted but flagged (`has_log_pole`), since uniqueness
    is only guaranteed for measures that put no mass on the origin.
    """
    if not math.isfinite(mu.total):
        raise ValueError("not solvable in the finite-mass class")
    n = mu.n

    def sigma(x, mu=mu, n=n):
        x = np.asarray(x, dtype=float)
        return np.power(np.asarray(mu.ball_mass_x(x), dtype=float), 1.0 / n)

    jump_locations, jumps = [], []
    for loc, jump in mu.atoms:
        upper = float(mu.ball_mass_x(np.asarray(loc)))
        lower = max(upper - jump, 0.0)
        jump_locations.append(loc)
        jumps.append(upper ** (1.0 / n) - lower ** (1.0 / n))
    return SlopeProfile(
        sigma,
        jump_locations=jump_locations,
        jumps=jumps,
        breakpoints=mu.density_breakpoints,
        sigma_at_minus_inf=mu.dirac0 ** (1.0 / n),
        source_measure=mu,
        tag=f"solve({mu.tag})",
    )


# -- end-to-end capacity-decay verification ---------------------------------------

def decay_weight(d: DecayModulus, mu_total: float, n: int) -> Weight:
    """The weight with -chi(-t) = exp(n max(H^{-1}(t), 0) / 2).

    Flat below H(0), then growing with the decay bound; the solution of a
    dominated problem has finite energy against it.
    """
    def g(t: float) -> float:
        x = envelope_inverse(d, mu_total, n, float(t))
        if x is None:
            x = 0.0 if float(t) <= _E * d.rate0 + mu_total ** (1.0 / n) else math.inf
        val = n * max(x, 0.0) / 2.0
        return math.exp(val) if val < 709 else math.inf

    def chi_fn(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = -np.array([g(-ti) for ti in t])
        return out if out.shape != (1,) else out.reshape(np.shape(t))

    def chi_prime_fn(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            s = -float(ti)
            x = envelope_inverse(d, mu_total, n, s)
            if x is None or x <= 0:
                out[i] = 0.0
            else:
                eps_val = float(d.rate(np.asarray(x)))
                out[i] = g(s) * (n / 2.0) / (_E * eps_val) if eps_val > 0 else math.inf
        return out

    return CallableWeight(chi_fn, chi_prime_fn, chi0=-1.0, unbounded=not d.integrable,
                          concave=False, convex=False,
                          tag=f"decay_weight({d.tag})")


@dataclass(frozen=True)
class DecayBoundReport:
    s: np.ndarray
    bound: np.ndarray
    actual: np.ndarray
    worst_violation: float
    s0: float
    levels: LevelIteration
    energy_criterion: TailVerdict
    uniform_lower_bound: float  # -sup H when eps is integrable, else -inf

    @property
    def passed(self) -> bool:
        return (self.worst_violation >= -1e-9
                and self.energy_criterion.converged
                and self.levels.invariant_holds)

    def to_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            fh.write("s,bound,actual,violation\n")
            for s, b, a in zip(self.s, self.bound, self.actual):
                fh.write(f"{float(s)!r},{float(b)!r},{float(a)!r},{float(b - a)!r}\n")

    def levels_to_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            fh.write("j,s_j,f_sj\n")
            for j, (s, f) in enumerate(zip(self.levels.s, self.levels.f)):
                f_txt = "inf" if math.isinf(f) else repr(float(f))
                fh.write(f"{j},{float(s)!r},{f_txt}\n")


def verify_capacity_decay(mu: RadialMeasure, d: DecayModulus,
                          s_count: int = 96) -> DecayBoundReport:
    """Solve (dd^c u)^n = mu and verify the capacity-decay package:

    the capacity curve of the solution stays below exp(-n H^{-1}(s)) for
    s >= H(0); the level iteration gains a unit of f per step; and the
    solution has finite energy against the decay weight.
    """
    dom = domination_check(mu, d)
    if not dom.passed:
        raise ValueError("mass is not dominated by the capacity envelope")
    phi = solve_radial(mu)
    n = mu.n
    H = step_envelope(d, mu.total, n)
    h0 = float(H(np.asarray(0.0)))
    s_grid = np.geomspace(h0, max(1e3, 10 * h0), s_count)
    actual = cap_sublevel_vec(phi, s_grid, n)
    bound = np.array([capacity_bound(d, mu.total, n, float(s)) for s in s_grid])
    worst = float(np.min(bound - actual))
    curve = capacity_curve(phi, n)
    levels = level_iteration(d, curve, s0_override=mu.total ** (1.0 / n))
    w = decay_weight(d, mu.total, n)
    criterion = capacity_criterion(phi, w, n)
    lower = -envelope_sup(d, mu.total, n) if d.integrable else -math.inf
    return DecayBoundReport(
        s=s_grid, bound=bound, actual=actual, worst_violation=worst,
        s0=mu.total ** (1.0 / n), levels=levels, energy_criterion=criterion,
        uniform_lower_bound=lower,
    )


# -- solving by truncating the density ---------------------------------------------

@dataclass(frozen=True)
class TruncationReport:
    j_values: tuple[float, ...]
    energies: tuple[float, ...]
    monotone: bool
    sup_energy: float
    limit_gap: float        # sup |phi_last - phi_limit| on the test grid
    measure_gap: float      # relative gap between the limit measure and mu

    @property
    def passed(self) -> bool:
        return (self.monotone and math.isfinite(self.sup_energy)
                and self.measure_gap <= 1e-8)


def solve_via_truncation(g_of_r: Callable, u0: RadialProfile, w: Weight, n: int,
                         j_list: Sequence[float]) -> TruncationReport:
    """Solve (dd^c u)^n = g * (dd^c u0)^n through capped densities min(g, j).

    The capped solutions decrease (larger measures give smaller potentials),
    their energies stay uniformly bounded, and the full-density solution is
    their limit.
    """
    base = ma_measure(u0, n)
    if base.dirac0 > 0:
        raise ValueError("base measure must not charge the origin")

    def gx(x, g_of_r=g_of_r):
        return np.asarray(g_of_r(np.exp(np.asarray(x, dtype=float))), dtype=float)

    full = base.with_density(gx, tag="full-density")
    if not math.isfinite(full.total):
        raise ValueError("not solvable")
    phi_limit = solve_radial(full)
    xs = -np.geomspace(1e-4, 20.0, 64)
    prev_vals = None
    energies = []
    monotone = True
    phis = []
    for j in sorted(float(j) for j in j_list):
        mu_j = base.with_density(lambda x, j=j: np.minimum(gx(x), j), tag=f"capped({j})")
        phi_j = solve_radial(mu_j)
        phis.append(phi_j)
        vals = phi_j._value(xs)
        if prev_vals is not None and np.any(vals > prev_vals + 1e-9):
            monotone = False
        prev_vals = vals
        energies.append(weighted_energy(phi_j, w, n).value)
    limit_gap = float(np.max(np.abs(phis[-1]._value(xs) - phi_limit._value(xs))))
    # the reconstructed measure of the limit must be the input measure
    probe = np.log(np.geomspace(1e-6, 1.0 - 1e-9, 256))
    m_loop = np.asarray(ma_measure(phi_limit, n).ball_mass_x(probe), dtype=float)
    m_in = np.asarray(full.ball_mass_x(probe), dtype=float)
    measure_gap = float(np.max(np.abs(m_loop - m_in) / np.maximum(m_in, 1e-12)))
    return TruncationReport(
        j_values=tuple(sorted(float(j) for j in j_list)),
        energies=tuple(energies),
        monotone=monotone,
        sup_energy=max(energies),
        limit_gap=limit_gap,
        measure_gap=measure_gap,
    )


# -- Holder-type domination ----------------------------------------------------------

def holder_constant(mu: RadialMeasure, p: float, n: int,
                    r_grid: Optional[np.ndarray] = None) -> float:
    """Best constant C with mu(ball) <= C * Cap(ball)^{p/(p+n)} on closed balls."""
    if not math.isfinite(mu.total):
        raise ValueError("total mass must be finite")
    rs = np.geomspace(1e-6, 1.0 - 1e-6, 256) if r_grid is None else np.asarray(r_grid, dtype=float)
    masses = np.asarray(mu.ball_mass_x(np.log(rs)), dtype=float)
    caps = np.array([cap_ball(float(r), n) for r in rs])
    expo = p / (p + n)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(masses == 0.0, 0.0, masses / caps ** expo)
    return float(np.max(ratios))


@dataclass(frozen=True)
class MomentReport:
    moment_tail: TailVerdict      # int_1^inf p t^{p-1} mu({u < -t}) dt
    ep_member: bool
    alpha_constant: float

    @property
    def passed(self) -> bool:
        return (not self.ep_member) or self.moment_tail.converged


def moment_check(u: RadialProfile, mu: RadialMeasure, p: float, alpha: float,
                 n: int) -> MomentReport:
    """Check that int (-u)^p dmu is finite through its level representation.

    Requires alpha > p/(p+n) and a verified bound mu(ball) <= C Cap^alpha;
    when u satisfies the p-energy criterion the moment tail must converge.
    """
    if not alpha > p / (p + n):
        raise ValueError("exponent hypothesis violated")
    rs = np.geomspace(1e-6, 1.0 - 1e-6, 128)
    masses = np.asarray(mu.ball_mass_x(np.log(rs)), dtype=float)
    caps = np.array([cap_ball(float(r), n) for r in rs])
    with np.errstate(divide="ignore", invalid="ignore"):
        c_alpha = float(np.max(np.where(masses == 0.0, 0.0, masses / caps ** alpha)))

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return p * np.power(t, p - 1.0) * measure_of_sublevel(mu, u, t)

    tail = integrate(integrand, 1.0, math.inf)
    from .energy import ep_criterion

    member = ep_criterion(u, p, n).converged
    return MomentReport(tail, member, c_alpha)
