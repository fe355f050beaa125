"""Radial Monge-Ampere calculus on the unit ball.

Radial plurisubharmonic functions u(z) = g(log|z|) reduce complex
Monge-Ampere masses, relative capacities, weighted energies, and
capacity-decay solution bounds to one-dimensional calculus of convex
profiles.  This package implements that calculus with closed forms wherever
the model admits them and verified quadrature everywhere else.
"""

from .numerics import (
    CONVERGED,
    DIVERGED,
    INCONCLUSIVE,
    MonotoneFn,
    TailVerdict,
    integrate,
    invert_monotone,
    stieltjes,
)
from .profiles import (
    ClippedProfile,
    GridProfile,
    LinearProfile,
    Log1mProfile,
    MaxProfile,
    PowerProfile,
    RadialProfile,
    SlopeProfile,
    extremal_profile,
    parse_profile,
    pointwise_max,
    validate,
)
from .measures import (
    RadialMeasure,
    approximant_convergence_check,
    capacity_sandwich_check,
    comparison_identity_check,
    ma_measure,
    mass_comparison_check,
    nonpluripolar_part,
    sublevel_mass,
    total_mass_via_capacity,
)
from .capacity import CapacityCurve, cap_ball, cap_sublevel, capacity_curve
from .energy import (
    CallableWeight,
    ClassReport,
    ConstantWeight,
    ExpWeight,
    GridWeight,
    PowerWeight,
    ShiftedPowerWeight,
    Weight,
    capacity_criterion,
    classify,
    energy_convergence_check,
    ep_criterion,
    parse_weight,
    pluripolar_cover,
    separating_weight,
    weight_from_capacity_decay,
    weighted_energy,
    weighted_energy_layercake,
)
from .solver import (
    ConstantModulus,
    DecayModulus,
    ExpDecayModulus,
    GridModulus,
    PowerDecayModulus,
    capacity_bound,
    domination_check,
    holder_constant,
    level_iteration,
    mass_envelope,
    moment_check,
    parse_modulus,
    solve_radial,
    solve_via_truncation,
    step_envelope,
    uniform_bound,
    verify_capacity_decay,
)

__version__ = "0.1.0"
