"""Randomized single, double and triple Kaczmarz solvers for ``A^T A x = A^T b - c``."""

from .errors import (
    AllWeightsZero,
    DimensionMismatch,
    EntryCountMismatch,
    InconsistentImpossible,
    InvalidSpec,
    KaczmarzError,
    MalformedHeader,
    ZeroMatrix,
)
from .experiment import ExperimentConfig, ExperimentResult, run_experiment
from .linalg import DenseMatrix, frobenius_sq, matvec, squared_col_norms, squared_row_norms, transpose_matvec
from .oracle import (
    Consistency,
    bound_rdk,
    bound_rk,
    bound_rtk,
    classify_consistency,
    decompose_step,
    reference_solutions,
    rho,
    spectral,
)
from .problemgen import GenSpec, ProblemInstance, generate_matrix, generate_problem, generate_rhs
from .sampling import WeightedSampler, build_sampler, make_rng, sample
from .solvers import ConvergenceTrace, Tracker, col_project, rdk_run, rk_run, row_project, rtk_run, run

__version__ = "0.1.0"
