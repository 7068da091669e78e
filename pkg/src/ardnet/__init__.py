"""Network recovery from aggregated relational data by nuclear-norm penalised least squares."""

from .diagnostics import (
    ErrorReport,
    error_report,
    expected_degrees,
    global_clustering,
    mse,
    nu_constant,
    relative_frobenius_error,
    theoretical_bound,
)
from .errors import CsvParseError, InvalidInputError, SingularSystemError, UndefinedRatioError
from .io import read_matrix_csv, write_matrix_csv
from .linalg import (
    effective_rank,
    frobenius_norm,
    nuclear_frobenius_ratio,
    nuclear_norm,
    soft_threshold_singular_values,
    spectral_norm,
    svd,
)
from .netgen import (
    Model,
    NetworkModelSpec,
    default_trait_count,
    generate_ard,
    generate_traits,
    probability_matrix,
    sample_adjacency,
)
from .solver import (
    ConstraintMode,
    Problem,
    Shrinkage,
    SolverConfig,
    SolverResult,
    default_penalty,
    exact_least_squares,
    fit,
    gradient_step,
    objective,
    symmetrize,
)

__version__ = "0.1.0"
