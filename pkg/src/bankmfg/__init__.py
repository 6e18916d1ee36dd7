"""Numerical laboratory for an interbank default/recovery model.

Pieces: the N-bank cascading-default particle system and its mean-field
variants, the Picard fixed point of the expected default count, the
closed-form stationary density with its default-rate equation, a blow-up
certificate for concentrated initial data, an evolutionary density solver,
a finite-difference solver for the coupled value/density game system, and
the quadratic-ansatz analytic benchmark used to validate it.
"""

__version__ = "0.1.0"

from .blowup import BlowupCertificate, check_blowup_condition, laplace_moment, scan_mu, triangular_density
from .evolution import FPRun, evolve_density, weak_form_residual
from .fixed_point import FixedPointConfig, apply_map_M, erfc_level_sum, picard_iterate
from .lq import (
    LQCoefficients,
    assemble_stationary_solution,
    compute_lq_coefficients,
    equilibrium_control,
    full_feedback_control,
)
from .mfg import (
    MFGSolution,
    SpaceTimeGrid,
    beta_weights,
    discrete_hamiltonian,
    discrete_hamiltonian_grad,
    fp_system_residual,
    solve_fp_step,
    solve_hjb_step,
    solve_mfg,
    truncated_gaussian_profile,
)
from .model import (
    DensitySnapshot,
    ModelParams,
    RateCurve,
    controlled_drift,
    default_rate_moment,
    hamiltonian,
    hamiltonian_offset,
    hamiltonian_vertex,
    mass_moment,
    optimal_control,
    running_cost,
)
from .particles import (
    DynamicsVariant,
    ParticleState,
    SimSummary,
    resolve_default_cascade,
    simulate_many,
    simulate_system,
    step_euler,
)
from .stationary import F_of_u, StationarySolution, e0_upper_bound, solve_e0, stationary_solution

__all__ = [name for name in dir() if not name.startswith("_")]
