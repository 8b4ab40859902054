"""srkmmv: Kaczmarz-family solvers for sparse and jointly sparse recovery.

The package bundles the classical and randomized Kaczmarz iterations, their
sparse variants (shrinking support estimate with damped off-support
coordinates), a joint solver for multiple measurement vectors sharing one
row-sparse support, a deterministic Monte Carlo experiment harness, and a
sparse-representation classifier, plus a CLI that reproduces the synthetic
experiments and renders their figures.
"""

from .classify import (
    ClassDictionary,
    ClassificationResult,
    build_dictionary,
    classify_mmv,
    classify_smv,
)
from .errors import (
    DegenerateDistributionError,
    DegenerateMetricError,
    DimensionError,
    InvalidSparsityError,
    KaczmarzError,
    SingularMatrixError,
    SpecValidationError,
    UnsupportedVariantError,
    ZeroRowError,
)
from .experiments import (
    ExperimentKind,
    ExperimentSpec,
    MonteCarloReport,
    ReportRow,
    SupportRule,
    preset,
    run_convergence,
    run_experiment,
    run_phase_transition,
    run_support_sweep,
)
from .linalg import (
    as_matrix,
    as_vector,
    dot,
    frobenius_norm_sq,
    least_squares_oracle,
    matmul,
    row_norms_sq,
)
from .metrics import RecoveryOutcome, is_success, recovery_rate, relative_error
from .sampling import (
    RowSampler,
    SeededRng,
    SupportSet,
    build_row_sampler,
    derive_seed,
    sample_row,
    sample_rows,
    sample_support,
)
from .solvers import (
    SolveResult,
    SolverConfig,
    Variant,
    WeightVector,
    build_weight_vector,
    estimate_support_mmv,
    estimate_support_smv,
    kaczmarz_step,
    solve,
    weighted_kaczmarz_step,
)
from .synth import SyntheticProblem, generate_problem

__version__ = "0.1.0"
