"""acplus: traveling waves and constrained dynamics of the one-directional
(irreversible) Allen-Cahn flow u_t = (u_xx - f(u))_+ in one dimension."""

from .potential import (
    AdmissibleAlpha,
    Nonlinearity,
    ValidationReport,
    check_alpha,
    make_cubic,
    make_polynomial,
    validate_bistable,
)
from .profile import (
    CONVERGED,
    NO_EVENT,
    OVERSHOOT,
    TURNBACK,
    FamilyEntry,
    ProfileSolution,
    Trajectory,
    evaluate_profile,
    evaluate_profile_slope,
    integrate_profile_ode,
    profile_family,
    profile_second_derivative_limits,
    solve_profile,
    solve_profile_regularized,
    velocity_identity,
)
from .pde import (
    EXPLICIT_POSITIVE_PART,
    IMEX_PROJECTED,
    Grid1D,
    PdeState,
    SimConfig,
    SnapshotSeries,
    build_compliant_initial_data,
    compute_multiplier,
    locate_free_boundary,
    run_simulation,
    step_explicit_positive_part,
    step_imex_projected,
)
from .comparison import (
    MINUS,
    PLUS,
    ComparisonEnvelope,
    EnvelopeConstants,
    check_ordering,
    check_residual_sign,
    compute_envelope_constants,
    eval_envelope,
    is_admissible,
)
from .analysis import (
    ConvergenceReport,
    ErrorPoint,
    build_error_series,
    check_free_boundary_regularity,
    check_front_rate,
    detect_phase2,
    fit_exponential_rate,
    fit_wave_position,
    motion_equation_residual,
    weighted_energy,
)

__version__ = "0.1.0"
