"""Phase-only signal reconstruction toolkit.

Rank-based recoverability tests for signals observed through the phases of
linear or affine complex measurements, constructive solvers, explicit
measurement designs, minimal row selection, independent verification
oracles, and a reproducible Monte Carlo experiment harness.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    DEFAULT_TOL,
    Tolerance,
    block_lift,
    complex_rank,
    load_matrix,
    load_vector,
    nullspace,
    numerical_rank,
    phase,
    phase_vector,
    save_matrix,
    save_vector,
    stack_lift,
    support,
)
from .discriminant import (  # noqa: E402
    MeasurementEnsemble,
    RecoverabilityVerdict,
    lift_discriminant,
    lift_discriminant_affine,
    lift_discriminant_real,
    ma_condition,
    ma_full_matrix,
    ma_matrix,
    phase_discriminant,
    phase_discriminant_affine,
    phase_discriminant_real,
    solution_space_dim,
    verdict_affine_lift,
    verdict_affine_phase,
    verdict_canonical,
    verdict_linear,
    verdict_real_lift,
    verdict_real_phase,
)
from .solver import (  # noqa: E402
    CanonicalTransform,
    PhaseObservation,
    ReconstructionResult,
    canonicalize_affine,
    canonicalize_linear,
    recover_ratio,
    solve_affine,
    solve_linear,
)
from .designs import (  # noqa: E402
    DesignSpec,
    build_design,
    design_adaptive,
    design_affine_3d,
    design_affine_anchor,
    design_fourier,
    design_fourier_symmetric,
    design_generic_stack,
    design_pairwise,
    random_gaussian,
    reduce_kernel_affine,
    reduce_kernel_linear,
)
from .selection import SelectionResult, select_rows_affine, select_rows_linear  # noqa: E402
from .oracle import (  # noqa: E402
    ConsistencyReport,
    Witness,
    consistency_sweep,
    counterexample_search,
    counterexample_search_affine,
    exact_rank,
    rationalize,
    vanishing_row_signal,
)
from .experiments import (  # noqa: E402
    ExperimentConfig,
    ExperimentReport,
    resolve_count,
    run_experiment,
    run_ma_equivalence_experiment,
    run_symmetric_fourier_experiment,
    run_threshold_experiment,
)
from . import errors  # noqa: E402
