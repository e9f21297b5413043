"""Multi-trial Monte Carlo runs against the convergence bound curves."""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, OracleUnavailable
from .linalg import as_matrix, as_vector
from .oracle import Consistency, ReferenceSolutions, reference_solutions, spectral
from .problemgen import GenSpec, ProblemInstance, generate_problem
from .sampling import RNG_ALGORITHM, trial_seed
from .solvers import ALGORITHMS, Tracker, run

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "Problem",
    "compatibility_warning",
    "load_problem_reference",
    "run_experiment",
]

DEFAULT_ORACLE_CAP = 2000


@dataclass(frozen=True)
class Problem:
    """A, b, c from files or any other source, without generation metadata."""

    A: object
    b: np.ndarray
    c: np.ndarray
    source: str = "files"


@dataclass
class ExperimentConfig:
    algorithm: str
    spec: GenSpec | None = None
    problem: ProblemInstance | Problem | None = None
    trials: int = 50
    iters: int = 1000
    base_seed: int = 0
    track_stride: int = 1
    workers: int = 1
    oracle_cap: int = DEFAULT_ORACLE_CAP

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if self.track_stride < 1:
            raise ValueError("track stride must be >= 1")
        if (self.spec is None) == (self.problem is None):
            raise ValueError("give exactly one of spec or problem")


@dataclass
class ExperimentResult:
    tracked_iterations: np.ndarray
    mean_sq_error: np.ndarray
    bound: np.ndarray | None
    reference: ReferenceSolutions
    metadata: dict = field(default_factory=dict)
    final_x: np.ndarray | None = None
    wall_time: float = 0.0

    def csv_metadata(self):
        """Ordered (key, value) pairs for the CSV comment block. No timings."""
        return list(self.metadata.items())


def load_problem_reference(A, b, c, algorithm: str, oracle_cap: int = DEFAULT_ORACLE_CAP):
    """Reference solutions for the experiment conventions, or None above the cap."""
    A = as_matrix(A)
    if min(A.shape) > oracle_cap:
        return None
    spec = spectral(A)
    if algorithm == "rk":
        return reference_solutions(A, b, None, spec=spec)
    return reference_solutions(A, b, c, spec=spec)


def compatibility_warning(algorithm: str, ref: ReferenceSolutions, A, b) -> str | None:
    """Message when the problem class falls outside the algorithm's theory."""
    if algorithm == "rdk" and ref.consistency is Consistency.INCONSISTENT:
        return "c is not in ran(A^T); rdk convergence theory does not apply (use rtk)"
    if algorithm == "rk":
        A = as_matrix(A)
        r = A.entries @ ref.x_star - b
        if np.linalg.norm(r) > 1e-10 * max(np.linalg.norm(b), 1.0):
            return "b is not in ran(A); rk convergence theory does not apply"
    return None


def _one_trial(algorithm, A, b, c, iters, seed, tracker):
    state, trace = run(algorithm, A, b, c, iters=iters, seed=seed, tracker=tracker)
    return trace.sq_error, trace.tracked_iterations, state.x


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Average ``||x^k - x_star||^2`` over independent trials.

    Trial ``t`` uses seed ``base_seed + t``. Trials may run on a thread pool
    (``workers > 1``); the mean is always reduced in trial order.
    """
    config.validate()
    t0 = time.perf_counter()
    if config.spec is not None:
        problem = generate_problem(config.spec)
    else:
        problem = config.problem
    A = as_matrix(problem.A)
    b = as_vector(problem.b, A.m, "b")
    c = as_vector(problem.c, A.n, "c")
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch("b does not match A")
    ref = load_problem_reference(A, b, c, config.algorithm, config.oracle_cap)
    if ref is None:
        raise OracleUnavailable(
            f"min(m, n) = {min(A.shape)} exceeds the oracle cap {config.oracle_cap}; "
            "the error metric needs the reference solution"
        )
    msg = compatibility_warning(config.algorithm, ref, A, b)
    if msg:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    tracker = Tracker.from_reference(ref, config.algorithm, stride=config.track_stride)
    seeds = [trial_seed(config.base_seed, t) for t in range(config.trials)]
    args = [(config.algorithm, A, b, c, config.iters, s, tracker) for s in seeds]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outs = list(pool.map(lambda a: _one_trial(*a), args))
    else:
        outs = [_one_trial(*a) for a in args]

    tracked = outs[0][1]
    total = np.zeros_like(outs[0][0])
    for errs, _, _ in outs:
        total += errs
    mean = total / config.trials
    bound = np.asarray(ref.bound(config.algorithm, tracked), dtype=np.float64)

    metadata = {"algorithm": config.algorithm}
    if isinstance(problem, ProblemInstance):
        s = problem.spec
        metadata.update(
            m=s.m, n=s.n, rank=s.r, kappa=repr(float(s.kappa)), gen_seed=s.seed,
            consistent=str(s.consistent).lower(),
        )
    else:
        metadata.update(m=A.m, n=A.n, source=problem.source)
    metadata.update(
        consistency=ref.consistency.value,
        numerical_rank=ref.spectral.rank,
        trials=config.trials,
        iters=config.iters,
        base_seed=config.base_seed,
        trial_seeds=f"base_seed+t for t in 0..{config.trials - 1}",
        track_stride=config.track_stride,
        rng=RNG_ALGORITHM,
        rho=repr(ref.rho),
        frob_sq=repr(ref.frob_sq),
        gap_x0=repr(ref.norm_sq_x0_gap),
        gap_z0=repr(ref.norm_sq_z0_gap),
        gap_y0=repr(ref.norm_sq_y0_gap),
    )
    return ExperimentResult(
        tracked_iterations=tracked,
        mean_sq_error=mean,
        bound=bound,
        reference=ref,
        metadata=metadata,
        final_x=np.stack([o[2] for o in outs]),
        wall_time=time.perf_counter() - t0,
    )
