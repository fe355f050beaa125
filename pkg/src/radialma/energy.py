"""Weighted Monge-Ampere energies and the capacity-integral criterion.

A weight is an increasing function chi: (-inf, 0] -> (-inf, 0].  The
chi-energy of a radial function u is int (-chi)(u) (dd^c u)^n, which in the
radial model is a Stieltjes integral against the ball-mass distribution plus
(-chi)(-inf) times the origin atom.  The same quantity has a layer-cake form
int_0^inf chi'(-t) mass({u < -t}) dt, kept as an independent cross-check.

Class membership (bounded test class, finite mass, absolutely continuous
finite mass, p-energy, exponential energy) is decided through the decay of
the capacity of sublevel sets.  The criterion integrals split at t = 1:
for finite-mass profiles the head [0, 1] is finite and included; for
infinite-mass profiles the head diverges for purely boundary reasons (mass
escaping to the boundary of the ball, already recorded by the finite-mass
flag), so the verdict and value are taken from the tail [1, inf), which is
what the singularity classes measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .capacity import cap_sublevel_vec, capacity_curve
from .measures import ma_measure, sublevel_mass, sublevel_mass_vec
from .numerics import (
    CONVERGED,
    DIVERGED,
    INCONCLUSIVE,
    TailVerdict,
    converged,
    diverged,
    inconclusive,
    integrate,
)
from .profiles import (
    GridProfile,
    LinearProfile,
    PowerProfile,
    RadialProfile,
    pointwise_max,
    validate,
)

__all__ = [
    "Weight",
    "PowerWeight",
    "ShiftedPowerWeight",
    "ConstantWeight",
    "ExpWeight",
    "GridWeight",
    "CallableWeight",
    "weighted_energy",
    "weighted_energy_layercake",
    "capacity_criterion",
    "ep_criterion",
    "classify",
    "ClassReport",
    "separating_weight",
    "weight_from_capacity_decay",
    "energy_convergence_check",
    "pluripolar_cover",
    "parse_weight",
]


class Weight:
    """An increasing weight chi <= 0 with derivative access and flags."""

    chi0: float = 0.0          # chi(0)
    unbounded: bool = True     # chi(-inf) = -inf?
    concave: bool = False
    convex: bool = False

    def chi(self, t):
        raise NotImplementedError

    def chi_prime(self, t):
        """chi'(t) for t < 0 (one-sided where chi has kinks)."""
        raise NotImplementedError

    def neg_chi(self, t):
        return -np.asarray(self.chi(t), dtype=float)

    def chi_at_minus_inf(self) -> float:
        return -math.inf if self.unbounded else float(self.chi(np.asarray(-1e12)))

    def hat(self) -> "Weight":
        """The doubled-argument weight t -> chi(2t)."""
        return CallableWeight(
            chi_fn=lambda t: self.chi(2.0 * np.asarray(t, dtype=float)),
            chi_prime_fn=lambda t: 2.0 * np.asarray(self.chi_prime(2.0 * np.asarray(t, dtype=float)), dtype=float),
            chi0=self.chi0,
            unbounded=self.unbounded,
            concave=self.concave,
            convex=self.convex,
            tag=f"hat({self.tag})",
        )

    @property
    def tag(self) -> str:
        return type(self).__name__

    def __repr__(self):
        return f"<Weight {self.tag}>"


@dataclass(frozen=True, repr=False)
class PowerWeight(Weight):
    """chi(t) = -(-t)^p; the p-energy weight, chi(0) = 0."""

    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("exponent must be positive")

    chi0 = 0.0
    unbounded = True

    @property
    def concave(self):
        return self.p >= 1.0

    @property
    def convex(self):
        return self.p <= 1.0

    def chi(self, t):
        return -np.power(-np.asarray(t, dtype=float), self.p)

    def chi_prime(self, t):
        return self.p * np.power(-np.asarray(t, dtype=float), self.p - 1.0)

    def inverse(self, y):
        """chi^{-1}(y) = -(-y)^{1/p}."""
        return -np.power(-np.asarray(y, dtype=float), 1.0 / self.p)

    @property
    def tag(self):
        return f"power {self.p!r}"


@dataclass(frozen=True, repr=False)
class ShiftedPowerWeight(Weight):
    """chi(t) = -1 - (-t)^p; finite-mass variant of the p-energy weight."""

    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("exponent must be positive")

    chi0 = -1.0
    unbounded = True

    @property
    def concave(self):
        return self.p >= 1.0

    @property
    def convex(self):
        return self.p <= 1.0

    def chi(self, t):
        return -1.0 - np.power(-np.asarray(t, dtype=float), self.p)

    def chi_prime(self, t):
        return self.p * np.power(-np.asarray(t, dtype=float), self.p - 1.0)

    @property
    def tag(self):
        return f"shifted_power {self.p!r}"


class ConstantWeight(Weight):
    """chi = -1: the energy is the total mass, membership is the mass bound."""

    chi0 = -1.0
    unbounded = False
    concave = True
    convex = True

    def chi(self, t):
        return np.full_like(np.asarray(t, dtype=float), -1.0)

    def chi_prime(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    @property
    def tag(self):
        return "constant"


@dataclass(frozen=True, repr=False)
class ExpWeight(Weight):
    """chi(t) = -exp(-kappa t): exponential energy, chi(0) = -1."""

    kappa: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("rate must be positive")

    chi0 = -1.0
    unbounded = True
    concave = True
    convex = False

    def chi(self, t):
        with np.errstate(over="ignore"):
            return -np.exp(-self.kappa * np.asarray(t, dtype=float))

    def chi_prime(self, t):
        with np.errstate(over="ignore"):
            return self.kappa * np.exp(-self.kappa * np.asarray(t, dtype=float))

    @property
    def tag(self):
        return f"exp {self.kappa!r}"


class GridWeight(Weight):
    """Piecewise-linear weight on knots t <= 0, extended by its deepest slope."""

    def __init__(self, ts, values, tag: str = "grid"):
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
            raise ValueError("grid weight needs two matching 1-d arrays")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("weight knots must be strictly increasing")
        if np.any(np.diff(values) < -1e-12 * np.maximum(1.0, np.abs(values[:-1]))):
            raise ValueError("weight values must be nondecreasing")
        if np.any(values > 1e-12):
            raise ValueError("weight values must be nonpositive")
        self.ts = ts
        self.values = values
        self.slopes = np.diff(values) / np.diff(ts)
        self.chi0 = float(values[-1]) if ts[-1] == 0.0 else float(
            values[-1] + self.slopes[-1] * (0.0 - ts[-1]))
        self.unbounded = bool(self.slopes[0] > 0)
        slope_diffs = np.diff(self.slopes)
        self.concave = bool(np.all(slope_diffs <= 1e-12 * np.maximum(1.0, np.abs(self.slopes[:-1]))))
        self.convex = bool(np.all(slope_diffs >= -1e-12 * np.maximum(1.0, np.abs(self.slopes[:-1]))))
        self._tag = tag

    def chi(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.ts, t, side="right") - 1,
                      0, len(self.slopes) - 1)
        return self.values[idx] + self.slopes[idx] * (t - self.ts[idx])

    def chi_prime(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.ts, t, side="right") - 1,
                      0, len(self.slopes) - 1)
        return self.slopes[idx]

    @property
    def tag(self):
        return self._tag


class CallableWeight(Weight):
    """Weight defined by explicit chi and chi' callables."""

    def __init__(self, chi_fn, chi_prime_fn, chi0, unbounded, concave=False,
                 convex=False, tag: str = "callable"):
        self._chi = chi_fn
        self._chi_prime = chi_prime_fn
        self.chi0 = float(chi0)
        self.unbounded = bool(unbounded)
        self.concave = bool(concave)
        self.convex = bool(convex)
        self._tag = tag

    def chi(self, t):
        return np.asarray(self._chi(np.asarray(t, dtype=float)), dtype=float)

    def chi_prime(self, t):
        return np.asarray(self._chi_prime(np.asarray(t, dtype=float)), dtype=float)

    @property
    def tag(self):
        return self._tag


def parse_weight(spec: str) -> Weight:
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty weight spec")
    family, args = tokens[0], tokens[1:]
    if family == "constant":
        return ConstantWeight()
    if family == "power":
        return PowerWeight(float(args[0]))
    if family == "shifted_power":
        return ShiftedPowerWeight(float(args[0]))
    if family == "exp":
        return ExpWeight(float(args[0]) if args else 1.0)
    raise ValueError(f"unknown weight family {family!r}")


# -- energies -----------------------------------------------------------------

def _guarded(fn: Callable[[], TailVerdict]) -> TailVerdict:
    """Treat float overflow inside a monotone energy integrand as divergence."""
    try:
        return fn()
    except ValueError as exc:
        if "non-integrable sample" in str(exc):
            return diverged()
        raise


def weighted_energy(p: RadialProfile, w: Weight, n: int,
                    rel_tol: float = 1e-9) -> TailVerdict:
    """int (-chi)(u) (dd^c u)^n via Stieltjes integration in x = log|z|.

    The origin atom contributes (-chi)(-inf) * dirac0, which is +inf as soon
    as the profile has a logarithmic pole and the weight is unbounded.  When
    the direct verdict is inconclusive (slowly diverging integrands), the
    layer-cake form decides the status.
    """
    mu = ma_measure(p, n)
    pole_term = 0.0
    if mu.dirac0 > 0:
        if w.unbounded:
            return diverged()
        pole_term = (-w.chi_at_minus_inf()) * mu.dirac0
    atom_sum = 0.0
    for loc, jump in mu.atoms:
        atom_sum += float(w.neg_chi(np.asarray(p.value(loc)))) * jump
    if mu.density is None:
        return converged(pole_term + atom_sum)

    def integrand(x):
        x = np.asarray(x, dtype=float)
        return w.neg_chi(p._value(x)) * np.asarray(mu.density(x), dtype=float)

    boundary_singular = not math.isfinite(mu.total)
    direct = _guarded(lambda: integrate(
        integrand, -math.inf, 0.0, rel_tol,
        singular_right=boundary_singular,
        breakpoints=mu.density_breakpoints,
    ))
    value = direct.value + pole_term + atom_sum
    if direct.status == INCONCLUSIVE:
        # the layer-cake form sees the same divergences with flat integrands,
        # where the doubling heuristics are decisive
        cake = weighted_energy_layercake(p, w, n, rel_tol)
        if cake.status != INCONCLUSIVE:
            return TailVerdict(cake.status,
                               value if cake.status == CONVERGED else cake.value,
                               cake.ratio)
    return TailVerdict(direct.status, value, direct.ratio)


def weighted_energy_layercake(p: RadialProfile, w: Weight, n: int,
                              rel_tol: float = 1e-9) -> TailVerdict:
    """Layer-cake form: chi(0)-offset plus int_0^inf chi'(-t) mass({u<-t}) dt."""
    mu_total = float(p.boundary_slope) ** n if math.isfinite(p.boundary_slope) else math.inf
    offset = 0.0
    if w.chi0 != 0.0:
        if not math.isfinite(mu_total):
            return diverged()
        offset = (-w.chi0) * mu_total

    def integrand(t):
        t = np.asarray(t, dtype=float)
        masses = sublevel_mass_vec(p, t, n)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(w.chi_prime(-t), dtype=float) * masses
        return np.where(masses == 0.0, 0.0, vals)

    breakpoints = sorted({-p.value(k) for k in p.kinks} |
                         ({-p.inf_value} if p.bounded else set()))
    breakpoints = [b for b in breakpoints if b > 0]
    verdict = _guarded(lambda: integrate(
        integrand, 0.0, math.inf, rel_tol,
        singular_left=not math.isfinite(mu_total),
        breakpoints=breakpoints,
    ))
    return TailVerdict(verdict.status, verdict.value + offset, verdict.ratio)


def _criterion_integral(p: RadialProfile, n: int, weight_of_t: Callable,
                        rel_tol: float = 1e-9,
                        extra_breakpoints: Sequence[float] = ()) -> TailVerdict:
    """int_0^inf weight_of_t(t) * Cap({u < -t}) dt with the head/tail split.

    weight_of_t receives t > 0 and must include every factor except the
    capacity.  For infinite-mass profiles the head [0, 1] is skipped (it
    diverges for boundary reasons); the verdict is then the tail's.
    """
    finite_mass = math.isfinite(p.boundary_slope)

    def integrand(t):
        t = np.asarray(t, dtype=float)
        caps = cap_sublevel_vec(p, t, n)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(weight_of_t(t), dtype=float) * caps
        return np.where(caps == 0.0, 0.0, vals)

    breakpoints = ({-p.inf_value} if p.bounded else set()) | set(extra_breakpoints)
    breakpoints = sorted(b for b in breakpoints if b > 1.0)
    tail = _guarded(lambda: integrate(integrand, 1.0, math.inf, rel_tol,
                                      breakpoints=breakpoints))
    if not finite_mass:
        return tail
    head_breaks = [b for b in ({-p.inf_value} if p.bounded else set()) if 0 < b < 1]
    head = _guarded(lambda: integrate(integrand, 0.0, 1.0, rel_tol,
                                      singular_left=True, breakpoints=head_breaks))
    value = head.value + tail.value
    for v in (tail, head):
        if v.status == DIVERGED:
            return TailVerdict(DIVERGED, value, v.ratio)
    if INCONCLUSIVE in (tail.status, head.status):
        return TailVerdict(INCONCLUSIVE, value, tail.ratio)
    return converged(value, tail.ratio)


def capacity_criterion(p: RadialProfile, w: Weight, n: int,
                       rel_tol: float = 1e-9) -> TailVerdict:
    """int_0^inf t^n chi'(-t) Cap({u < -t}) dt; convergence defines the
    capacity-integral energy class."""
    def weight_of_t(t):
        t = np.asarray(t, dtype=float)
        return np.power(t, float(n)) * np.asarray(w.chi_prime(-t), dtype=float)

    return _criterion_integral(p, n, weight_of_t, rel_tol)


def ep_criterion(p: RadialProfile, pw: float, n: int,
                 rel_tol: float = 1e-9) -> TailVerdict:
    """int_0^inf t^{n+p-1} Cap({u < -t}) dt: the p-energy class criterion."""
    if not pw > 0:
        raise ValueError("exponent must be positive")

    def weight_of_t(t):
        return np.power(np.asarray(t, dtype=float), n + pw - 1.0)

    return _criterion_integral(p, n, weight_of_t, rel_tol)


# -- classification -----------------------------------------------------------

@dataclass(frozen=True)
class ClassReport:
    """Membership flags for one profile at one dimension.

    in_T: bounded test class (bounded, boundary value 0, finite mass);
    in_F: finite total mass; in_Fa: finite mass not charging the origin;
    ep: p -> membership of the p-energy class; e_exp: exponential energy.
    p_star is a diagnostic tail-exponent fit, never used for verdicts.
    """

    profile_tag: str
    n: int
    bounded: bool
    in_T: bool
    in_F: bool
    in_Fa: bool
    ep: dict[float, bool]
    ep_values: dict[float, TailVerdict]
    e_exp: bool
    e_exp_energy: TailVerdict
    p_star: float

    def __post_init__(self):
        if self.in_T and not (self.bounded and self.in_F):
            raise ValueError("bounded test class must be bounded with finite mass")
        if self.in_Fa and not self.in_F:
            raise ValueError("absolutely continuous class sits inside finite mass")
        if self.bounded and self.in_F and not all(self.ep.values()):
            raise ValueError("bounded finite-mass profiles have every p-energy finite")

    def csv_header(self) -> str:
        ep_cols = ",".join(f"Ep_{_fmt_p(p)}" for p in sorted(self.ep))
        return f"profile,n,in_T,in_F,in_Fa,E_exp,p_star,{ep_cols}"

    def csv_row(self) -> str:
        ep_cols = ",".join(_bool_txt(self.ep[p]) for p in sorted(self.ep))
        p_star_txt = "inf" if math.isinf(self.p_star) else repr(self.p_star)
        return (f"{self.profile_tag},{self.n},{_bool_txt(self.in_T)},"
                f"{_bool_txt(self.in_F)},{_bool_txt(self.in_Fa)},"
                f"{_bool_txt(self.e_exp)},{p_star_txt},{ep_cols}")


def _bool_txt(b: bool) -> str:
    return "true" if b else "false"


def _fmt_p(p: float) -> str:
    return f"{p:g}".replace(".", "_")


def classify(p: RadialProfile, n: int, p_list: Sequence[float]) -> ClassReport:
    """Fill the class-membership report for a profile."""
    if any(pp <= 0 for pp in p_list):
        raise ValueError("exponent list must be positive")
    mu = ma_measure(p, n)
    in_f = math.isfinite(mu.total)
    in_fa = in_f and mu.dirac0 == 0.0
    bounded = p.bounded
    in_t = bounded and in_f and abs(p.boundary_value) <= 1e-12
    ep_values = {float(pp): ep_criterion(p, float(pp), n) for pp in p_list}
    ep_flags = {pp: v.converged for pp, v in ep_values.items()}
    e_exp_energy = weighted_energy(p, ExpWeight(1.0), n)
    return ClassReport(
        profile_tag=p.tag,
        n=n,
        bounded=bounded,
        in_T=in_t,
        in_F=in_f,
        in_Fa=in_fa,
        ep=ep_flags,
        ep_values=ep_values,
        e_exp=e_exp_energy.converged,
        e_exp_energy=e_exp_energy,
        p_star=_estimate_p_star(p, n),
    )


def _estimate_p_star(p: RadialProfile, n: int) -> float:
    """Tail-exponent fit: Cap ~ t^{-n beta} on the last decade gives
    p* = n (beta - 1).  Bounded profiles are in every p-class: +inf."""
    if p.bounded:
        return math.inf
    s = np.geomspace(100.0, 1000.0, 32)
    caps = cap_sublevel_vec(p, s, n)
    if np.any(caps <= 0) or not np.all(np.isfinite(caps)):
        return math.inf
    logs = np.log(caps)
    if np.any(logs < -600):
        return math.inf  # super-polynomial decay
    slope = np.polyfit(np.log(s), logs, 1)[0]
    return float(-slope - n)


# -- constructive weights ------------------------------------------------------

def separating_weight(p: RadialProfile, n: int, t_depth: float = 1e3,
                      n_knots: int = 1024) -> GridWeight:
    """The weight whose energy diverges exactly for this unbounded profile.

    chi'(t) = 1 / mass({u < t}) makes the layer-cake integrand identically 1,
    so the energy of p against its own separating weight is infinite while
    bounded profiles keep finite energy against every such weight.  The grid
    is anchored at chi(0) = -1 and cut off before 1/mass overflows.
    """
    if p.bounded:
        raise ValueError("no separating weight needed")
    mu_total = float(p.boundary_slope) ** n if math.isfinite(p.boundary_slope) else math.inf
    if not math.isfinite(mu_total):
        raise ValueError("not in the finite-mass class")
    depth = float(t_depth)
    # keep 1/mass representable: shrink the depth until mass >= 1e-280
    for _ in range(200):
        if sublevel_mass(p, depth, n) >= 1e-280:
            break
        depth *= 0.75
    ts = np.concatenate([-np.geomspace(depth, 1e-6, n_knots - 1), [0.0]])
    masses = sublevel_mass_vec(p, -ts[:-1], n)
    prime = np.empty_like(ts)
    prime[:-1] = 1.0 / masses
    prime[-1] = 1.0 / mu_total
    # cumulative trapezoid from the right anchor chi(0) = -1
    seg = 0.5 * (prime[1:] + prime[:-1]) * np.diff(ts)
    values = np.empty_like(ts)
    values[-1] = -1.0
    values[:-1] = -1.0 - (np.cumsum(seg[::-1])[::-1])
    return GridWeight(ts, values, tag=f"separating({p.tag}, n={n})")


def weight_from_capacity_decay(p: RadialProfile, n: int,
                               n_knots: int = 1024) -> GridWeight:
    """Weight built from the running sup of h(t) = t^n Cap({u < -t}).

    For an unbounded profile with finite mass and no origin atom, h tends to
    zero and chi(t) = -1/sqrt(htilde(-t)) is a convex increasing weight with
    chi(-inf) = -inf whose capacity criterion is finite and bounded by
    sqrt(htilde(0)).
    """
    mu = ma_measure(p, n)
    if mu.dirac0 > 0 or not math.isfinite(mu.total):
        raise ValueError("not in the absolutely continuous finite-mass class")
    if p.bounded:
        raise ValueError("profile is bounded; no decay weight needed")
    depth = 1e3
    for _ in range(200):
        h_deep = (depth ** n) * cap_sublevel_vec(p, np.asarray(depth), n)
        if h_deep >= 1e-250:
            break
        depth *= 0.75
    t = np.geomspace(1e-6, depth, n_knots)
    h = (t ** n) * cap_sublevel_vec(p, t, n)
    htilde = np.maximum.accumulate(h[::-1])[::-1]
    if htilde[-1] > 0.9 * htilde[0] and htilde[0] > 1e3:
        raise ValueError("profile not in the absolutely continuous finite-mass class")
    values = -1.0 / np.sqrt(htilde[::-1])
    ts = -t[::-1]
    return GridWeight(ts, values, tag=f"capacity_decay({p.tag}, n={n})")


def htilde_at_zero(p: RadialProfile, n: int) -> float:
    """sup_{s>0} s^n Cap({u < -s}) sampled on a wide grid."""
    s = np.geomspace(1e-8, 1e3, 2048)
    vals = (s ** n) * cap_sublevel_vec(p, s, n)
    vals = vals[np.isfinite(vals)]
    return float(np.max(vals))


# -- convergence of energies ----------------------------------------------------

@dataclass(frozen=True)
class EnergyConvergenceReport:
    limit: float
    j_values: tuple[float, ...]
    canonical_energies: tuple[float, ...]
    canonical_deviations: tuple[float, ...]
    alternative_energies: tuple[float, ...]
    alternative_deviations: tuple[float, ...]
    alternative_sup: float

    @property
    def passed(self) -> bool:
        return (self.canonical_deviations[-1] < 1e-6
                and self.alternative_deviations[-1] < 1e-6
                and math.isfinite(self.alternative_sup))


def energy_convergence_check(p: RadialProfile, w: Weight, n: int,
                             j_list: Sequence[float]) -> EnergyConvergenceReport:
    """Convergence of energies along two decreasing approximations.

    (i) canonical clipped approximants max(u, -j); (ii) the alternative
    decreasing sequence max(g(x), j*x), whose energies stay uniformly
    bounded and reach the same limit.
    """
    limit_verdict = weighted_energy(p, w, n)
    if not limit_verdict.converged:
        raise ValueError("profile is not in the energy class of this weight")
    limit = limit_verdict.value
    canonical, alternative = [], []
    for j in j_list:
        ev = weighted_energy(p.clip(float(j)), w, n)
        canonical.append(ev.value)
        alt_profile = pointwise_max(p, LinearProfile(float(j)))
        av = weighted_energy(alt_profile, w, n)
        alternative.append(av.value)
    can_dev = tuple(abs(e - limit) for e in canonical)
    alt_dev = tuple(abs(e - limit) for e in alternative)
    return EnergyConvergenceReport(
        limit=limit,
        j_values=tuple(float(j) for j in j_list),
        canonical_energies=tuple(canonical),
        canonical_deviations=can_dev,
        alternative_energies=tuple(alternative),
        alternative_deviations=alt_dev,
        alternative_sup=max(alternative),
    )


def pluripolar_cover(w: Weight, n: int) -> RadialProfile:
    """A radial profile with a pole at the origin built from chi^{-1}(log|z|).

    Requires a concave, strictly increasing weight with chi(0) = 0 and
    chi(-inf) = -inf; the composition with the logarithmic pole is then
    convex, hence a valid profile.  Not every concave weight admits such a
    radial witness; failures are rejected rather than patched.
    """
    if not (w.concave and w.unbounded):
        raise ValueError("weight must be concave")
    if w.chi0 != 0.0:
        raise ValueError("weight must vanish at 0 for the radial cover")
    if isinstance(w, PowerWeight):
        profile = LinearProfile(1.0) if w.p == 1.0 else PowerProfile(1.0 / w.p)
    else:
        # numeric inversion onto a grid profile
        ts = -np.geomspace(1e-6, 1e6, 512)[::-1]
        xs = np.asarray(w.chi(ts), dtype=float)
        order = np.argsort(xs)
        xs, ts_sorted = xs[order], ts[order]
        keep = np.concatenate([[True], np.diff(xs) > 0])
        profile = GridProfile(xs[keep], ts_sorted[keep])
    diag = validate(profile)
    if not diag.valid:
        raise ValueError(
            "composition with the logarithmic pole is not convex; "
            "this weight has no radial cover: " + "; ".join(diag.violations))
    return profile
