"""Randomized Kaczmarz sweeps for ``A x = b`` and ``A^T A x = A^T b - c``.

Three solvers share one loop:

* ``rk``  - row projections on ``A x = b``.
* ``rdk`` - a column projection on ``A^T z = c`` followed by a row
  projection on ``A x = b - z``. With ``c = 0`` this is the randomized
  extended Kaczmarz method for least squares.
* ``rtk`` - a row projection on ``A y = 0``, a column projection on
  ``A^T z = c - y``, then a row projection on ``A x = b - z``.

Rows are drawn with probability ``||A[i]||^2 / ||A||_F^2`` and columns with
``||A[:, j]||^2 / ||A||_F^2``. A run consumes one PCG64 stream; per
iteration the uniforms are taken in the order y-row, z-column, x-row
(only those the algorithm uses).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AllWeightsZero, ZeroColumn, ZeroRow
from .linalg import DenseMatrix, as_matrix, as_vector
from .sampling import WeightedSampler, make_rng

__all__ = [
    "ALGORITHMS",
    "RkState",
    "RdkState",
    "RtkState",
    "ConvergenceTrace",
    "Tracker",
    "row_project",
    "col_project",
    "rk_run",
    "rdk_run",
    "rtk_run",
    "run",
]

ALGORITHMS = ("rk", "rdk", "rtk")

# number of uniforms drawn per iteration
_DRAWS = {"rk": 1, "rdk": 2, "rtk": 3}
_CHUNK = 4096


@dataclass
class RkState:
    x: np.ndarray


@dataclass
class RdkState:
    z: np.ndarray
    x: np.ndarray


@dataclass
class RtkState:
    y: np.ndarray
    z: np.ndarray
    x: np.ndarray


@dataclass
class ConvergenceTrace:
    tracked_iterations: np.ndarray
    sq_error: np.ndarray
    bound: np.ndarray | None = None
    iterations_run: int = 0
    stopped_early: bool = False


@dataclass
class Tracker:
    """Records ``||x^k - x_star||^2`` every ``stride`` iterations.

    ``bound`` maps an integer array of iterations to the matching theorem
    bound values; when given, the trace carries a bound column.
    """

    x_star: np.ndarray
    stride: int = 1
    bound: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("tracking stride must be >= 1")
        self.x_star = np.asarray(self.x_star, dtype=np.float64)

    @classmethod
    def from_reference(cls, ref, algorithm: str, stride: int = 1) -> "Tracker":
        return cls(x_star=ref.x_star, stride=stride, bound=lambda k: ref.bound(algorithm, k))


def row_project(A, rhs_i: float, x, i: int) -> np.ndarray:
    """Project ``x`` onto the hyperplane ``A[i] @ x' = rhs_i``."""
    A = as_matrix(A)
    x = as_vector(x, A.n, "x")
    nrm = A.row_norms_sq[i]
    if nrm == 0.0:
        raise ZeroRow(f"row {i} is zero")
    a = A.entries[i]
    return x - (a @ x - rhs_i) / nrm * a


def col_project(A, rhs_j: float, z, j: int) -> np.ndarray:
    """Project ``z`` onto the hyperplane ``A[:, j] @ z' = rhs_j``."""
    A = as_matrix(A)
    z = as_vector(z, A.m, "z")
    nrm = A.col_norms_sq[j]
    if nrm == 0.0:
        raise ZeroColumn(f"column {j} is zero")
    a = A.entries[:, j]
    return z - (a @ z - rhs_j) / nrm * a


def _index_chunks(A: DenseMatrix, algorithm: str, iters: int, rng, indices):
    """Yield (start, index block) pairs, block shape (len, draws)."""
    ndraw = _DRAWS[algorithm]
    if indices is not None:
        idx = np.asarray(indices, dtype=np.intp).reshape(-1, ndraw)
        if idx.shape[0] < iters:
            raise ValueError(f"forced index stream has {idx.shape[0]} iterations, need {iters}")
        yield 0, idx[:iters]
        return
    rows = WeightedSampler(A.row_norms_sq)
    cols = WeightedSampler(A.col_norms_sq) if algorithm != "rk" else None
    samplers = {"rk": (rows,), "rdk": (cols, rows), "rtk": (rows, cols, rows)}[algorithm]
    for start in range(0, iters, _CHUNK):
        n = min(_CHUNK, iters - start)
        u = rng.random((n, ndraw))
        block = np.empty((n, ndraw), dtype=np.intp)
        for t, s in enumerate(samplers):
            block[:, t] = s.index_of(u[:, t])
        yield start, block


def _residual(E, b, c, x, stationarity):
    AtA_x = E.T @ (E @ x)
    r = AtA_x - E.T @ b + c
    if stationarity:
        return float(np.linalg.norm(E.T @ (E @ r)))
    return float(np.linalg.norm(r))


def run(
    algorithm: str,
    A,
    b,
    c=None,
    *,
    x0=None,
    z0=None,
    y0=None,
    iters: int = 1000,
    seed: int = 0,
    tracker: Tracker | None = None,
    check_every: int | None = None,
    tol: float = 1e-10,
    rng: np.random.Generator | None = None,
    indices=None,
):
    """Run ``iters`` iterations of ``algorithm`` and return ``(state, trace)``.

    Parameters
    ----------
    algorithm : {"rk", "rdk", "rtk"}
    A : DenseMatrix or array_like, shape (m, n)
    b : array_like, shape (m,)
    c : array_like, shape (n,), optional
        Shift in ``A^T A x = A^T b - c``; ignored by ``rk``. Defaults to 0.
    x0, z0, y0 : array_like, optional
        Initial iterates; defaults ``x0 = 0``, ``z0 = b``, ``y0 = c``.
    iters : int
        Iteration budget.
    seed : int
        Seed of the PCG64 stream; ignored when ``rng`` or ``indices`` is given.
    tracker : Tracker, optional
        Without a tracker the trace is empty.
    check_every : int, optional
        Every ``check_every`` iterations evaluate the full residual
        ``||A^T A x - A^T b + c||`` (for ``rk``: ``||A^T(A x - b)||``; for
        ``rtk``: ``||A^T A (A^T A x - A^T b + c)||``) and stop once it is
        ``<= tol * (||A^T b|| + ||c||)``. Each check makes full passes over
        ``A``; off by default.
    indices : array_like of int, shape (iters, draws), optional
        Forced index stream, one row per iteration in draw order. For tests.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if iters < 0:
        raise ValueError("iters must be >= 0")
    A = as_matrix(A)
    m, n = A.shape
    E = A.entries
    rn = A.row_norms_sq
    cn = A.col_norms_sq
    b = as_vector(b, m, "b")
    c = np.zeros(n) if c is None or algorithm == "rk" else as_vector(c, n, "c")
    x = np.zeros(n) if x0 is None else as_vector(x0, n, "x0").copy()
    z = b.copy() if z0 is None else as_vector(z0, m, "z0").copy()
    y = c.copy() if y0 is None else as_vector(y0, n, "y0").copy()
    if rng is None and indices is None:
        rng = make_rng(seed)
    if A.frob_sq == 0.0:
        raise AllWeightsZero("matrix is zero; nothing to sample")
    chunks = _index_chunks(A, algorithm, iters, rng, indices)

    ks, errs = [], []
    stride = tracker.stride if tracker is not None else 0
    xs = tracker.x_star if tracker is not None else None

    def record(k):
        d = x - xs
        ks.append(k)
        errs.append(float(d @ d))

    if tracker is not None:
        record(0)
    scale = float(np.linalg.norm(E.T @ b) + np.linalg.norm(c)) if check_every else 0.0
    stationarity = algorithm == "rtk"

    k = 0
    stopped = False
    for start, block in chunks:
        for t in range(block.shape[0]):
            k = start + t + 1
            draw = block[t]
            if algorithm == "rk":
                i = draw[0]
                a = E[i]
                x -= (a @ x - b[i]) / rn[i] * a
            elif algorithm == "rdk":
                j, i = draw
                col = E[:, j]
                z -= (col @ z - c[j]) / cn[j] * col
                a = E[i]
                x -= (a @ x - b[i] + z[i]) / rn[i] * a
            else:
                l, j, i = draw
                a = E[l]
                y -= (a @ y) / rn[l] * a
                col = E[:, j]
                z -= (col @ z - c[j] + y[j]) / cn[j] * col
                a = E[i]
                x -= (a @ x - b[i] + z[i]) / rn[i] * a
            if stride and k % stride == 0:
                record(k)
            if check_every and k % check_every == 0:
                if _residual(E, b, c, x, stationarity) <= tol * scale:
                    stopped = True
                    break
        if stopped:
            break

    if tracker is not None and ks[-1] != k:
        record(k)
    tracked = np.asarray(ks, dtype=np.int64)
    bound = None
    if tracker is not None and tracker.bound is not None:
        bound = np.asarray(tracker.bound(tracked), dtype=np.float64)
    trace = ConvergenceTrace(
        tracked_iterations=tracked,
        sq_error=np.asarray(errs, dtype=np.float64),
        bound=bound,
        iterations_run=k,
        stopped_early=stopped,
    )
    if algorithm == "rk":
        state = RkState(x=x)
    elif algorithm == "rdk":
        state = RdkState(z=z, x=x)
    else:
        state = RtkState(y=y, z=z, x=x)
    return state, trace


def rk_run(A, b, x0=None, iters=1000, seed=0, tracker=None, **kwargs):
    return run("rk", A, b, x0=x0, iters=iters, seed=seed, tracker=tracker, **kwargs)


def rdk_run(A, b, c=None, z0=None, x0=None, iters=1000, seed=0, tracker=None, **kwargs):
    return run("rdk", A, b, c, z0=z0, x0=x0, iters=iters, seed=seed, tracker=tracker, **kwargs)


def rtk_run(A, b, c=None, y0=None, z0=None, x0=None, iters=1000, seed=0, tracker=None, **kwargs):
    return run("rtk", A, b, c, y0=y0, z0=z0, x0=x0, iters=iters, seed=seed, tracker=tracker, **kwargs)
