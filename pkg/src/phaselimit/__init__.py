"""Numerical bounds, optimization, and measurement simulation for phase
estimation of completely unknown phase shifts."""

from .errors import ConvergenceError, ValidationError
from .fock import (
    GeneratorSpec,
    NumberDistribution,
    ProbeState,
    generator_eigenvalue,
    make_state,
    mean_number,
    number_distribution,
    number_entropy,
    reduce_to_single_mode,
    thermal_entropy,
)
from .phasedist import (
    PhaseDistribution,
    canonical_distribution,
    density_at,
    differential_entropy,
    ensemble_length,
    holevo_variance,
    mean_square_deviation,
    surrogate_cost,
)
from .bounds import (
    BoundReport,
    airy_first_zero,
    conjectured_bound,
    entropy_chain_report,
    heisenberg_bound,
    k_A,
    k_C,
)
from .optimizer import (
    CostKind,
    OptimizationResult,
    cost_matrix,
    figure2_curve,
    min_eigenpair,
    optimize_at_mean,
    solve_at_multiplier,
)
from .povm import (
    EstimatePOM,
    average_distribution,
    conditional_probability,
    covariant_average_distribution,
    covariant_seed,
    kphase_construction,
    per_phase_variance,
    wrap_angle,
)

__version__ = "0.1.0"
