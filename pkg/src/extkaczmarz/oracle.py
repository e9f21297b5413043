"""SVD-based reference quantities for the extended normal equations.

Everything here costs a dense SVD and is meant for verification, error
tracking and bound curves, never for the solver inner loops.

For ``A^T A x = A^T b - c`` and initial vectors ``x0``, ``z0``, ``y0``::

    x_star = (I - A^+ A) x0 + A^+ b - (A^T A)^+ c
    z_star = (I - A A^+) b + (A^T)^+ c
    y_star = (I - A^+ A) c
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ZeroMatrix, ZeroRow
from .linalg import as_matrix, as_vector

__all__ = [
    "SpectralData",
    "ReferenceSolutions",
    "StepDecomposition",
    "Consistency",
    "TOL_CONSISTENCY",
    "spectral",
    "rho",
    "reference_solutions",
    "classify_consistency",
    "null_space",
    "bound_rk",
    "bound_rdk",
    "bound_rtk",
    "decompose_step",
]

TOL_CONSISTENCY = 1e-10


def _rank_cutoff(sigma_max: float, m: int, n: int) -> float:
    return max(m, n) * np.finfo(np.float64).eps * sigma_max


@dataclass(frozen=True)
class SpectralData:
    """Thin SVD truncated to the numerical rank.

    ``A = U @ diag(sigma) @ Vt`` with ``U`` m×r and ``Vt`` r×n.
    """

    sigma: np.ndarray
    U: np.ndarray
    Vt: np.ndarray
    shape: tuple[int, int]

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    @property
    def sigma_max(self) -> float:
        return float(self.sigma[0])

    @property
    def sigma_min(self) -> float:
        return float(self.sigma[-1])

    def pinv_apply(self, u) -> np.ndarray:
        """A^+ u, u in R^m."""
        return self.Vt.T @ ((self.U.T @ u) / self.sigma)

    def pinv_t_apply(self, v) -> np.ndarray:
        """(A^T)^+ v, v in R^n."""
        return self.U @ ((self.Vt @ v) / self.sigma)

    def gram_pinv_apply(self, v) -> np.ndarray:
        """(A^T A)^+ v, v in R^n."""
        return self.Vt.T @ ((self.Vt @ v) / self.sigma**2)

    def row_space_project(self, v) -> np.ndarray:
        """A^+ A v: orthogonal projection onto ran(A^T)."""
        return self.Vt.T @ (self.Vt @ v)

    def col_space_project(self, u) -> np.ndarray:
        """A A^+ u: orthogonal projection onto ran(A)."""
        return self.U @ (self.U.T @ u)

    def pinv(self) -> np.ndarray:
        return (self.Vt.T / self.sigma) @ self.U.T


def spectral(A) -> SpectralData:
    A = as_matrix(A)
    if A.frob_sq == 0.0:
        raise ZeroMatrix("matrix has no nonzero entries")
    U, s, Vt = np.linalg.svd(A.entries, full_matrices=False)
    r = int(np.count_nonzero(s > _rank_cutoff(s[0], A.m, A.n)))
    return SpectralData(sigma=s[:r].copy(), U=U[:, :r].copy(), Vt=Vt[:r].copy(), shape=A.shape)


def null_space(A, spec: SpectralData | None = None) -> np.ndarray:
    """Orthonormal basis (n × (n - r)) of the null space of A.

    Right singular vectors past the numerical rank, as MATLAB's ``null``.
    """
    A = as_matrix(A)
    if A.frob_sq == 0.0:
        raise ZeroMatrix("matrix has no nonzero entries")
    r = spectral(A).rank if spec is None else spec.rank
    _, _, Vt = np.linalg.svd(A.entries, full_matrices=True)
    return Vt[r:].T.copy()


def rho(A, spec: SpectralData | None = None) -> float:
    """Convergence constant ``1 - sigma_min^2 / ||A||_F^2``."""
    A = as_matrix(A)
    spec = spectral(A) if spec is None else spec
    return 1.0 - spec.sigma_min**2 / A.frob_sq


class Consistency(str, Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


def classify_consistency(A, c, spec: SpectralData | None = None, tol: float = TOL_CONSISTENCY) -> Consistency:
    """Consistent iff ``||(I - A^+ A) c|| <= tol * ||c||``."""
    A = as_matrix(A)
    c = as_vector(c, A.n, "c")
    spec = spectral(A) if spec is None else spec
    outside = c - spec.row_space_project(c)
    if np.linalg.norm(outside) <= tol * np.linalg.norm(c):
        return Consistency.CONSISTENT
    return Consistency.INCONSISTENT


@dataclass(frozen=True)
class ReferenceSolutions:
    x_star: np.ndarray
    z_star: np.ndarray
    y_star: np.ndarray
    rho: float
    norm_sq_x0_gap: float
    norm_sq_z0_gap: float
    norm_sq_y0_gap: float
    frob_sq: float
    consistency: Consistency
    spectral: SpectralData

    def bound(self, algorithm: str, k):
        """Convergence bound for ``algorithm`` in {"rk", "rdk", "rtk"} at iteration(s) ``k``."""
        if algorithm == "rk":
            return bound_rk(k, self.rho, self.norm_sq_x0_gap)
        if algorithm == "rdk":
            return bound_rdk(k, self.rho, self.frob_sq, self.norm_sq_z0_gap, self.norm_sq_x0_gap)
        if algorithm == "rtk":
            return bound_rtk(
                k, self.rho, self.frob_sq, self.norm_sq_y0_gap, self.norm_sq_z0_gap, self.norm_sq_x0_gap
            )
        raise ValueError(f"unknown algorithm {algorithm!r}")


def reference_solutions(A, b, c=None, x0=None, z0=None, y0=None, spec: SpectralData | None = None):
    """Pseudoinverse reference solutions and the gap constants of the bounds.

    Missing initial vectors default to the experiment convention
    ``x0 = 0``, ``z0 = b``, ``y0 = c``; a missing ``c`` means ``c = 0``
    (plain least squares).
    """
    A = as_matrix(A)
    m, n = A.shape
    b = as_vector(b, m, "b")
    c = np.zeros(n) if c is None else as_vector(c, n, "c")
    x0 = np.zeros(n) if x0 is None else as_vector(x0, n, "x0")
    z0 = b if z0 is None else as_vector(z0, m, "z0")
    y0 = c if y0 is None else as_vector(y0, n, "y0")
    spec = spectral(A) if spec is None else spec

    x_star = x0 - spec.row_space_project(x0) + spec.pinv_apply(b) - spec.gram_pinv_apply(c)
    z_star = b - spec.col_space_project(b) + spec.pinv_t_apply(c)
    y_star = c - spec.row_space_project(c)

    def gap(a, s):
        d = a - s
        return float(d @ d)

    outside = np.linalg.norm(y_star)
    consistency = (
        Consistency.CONSISTENT if outside <= TOL_CONSISTENCY * np.linalg.norm(c) else Consistency.INCONSISTENT
    )
    return ReferenceSolutions(
        x_star=x_star,
        z_star=z_star,
        y_star=y_star,
        rho=rho(A, spec),
        norm_sq_x0_gap=gap(x0, x_star),
        norm_sq_z0_gap=gap(z0, z_star),
        norm_sq_y0_gap=gap(y0, y_star),
        frob_sq=A.frob_sq,
        consistency=consistency,
        spectral=spec,
    )


def bound_rk(k, rho, gap_x):
    """``rho^k ||x0 - x_star||^2``. ``k`` may be an int or an array."""
    k = np.asarray(k, dtype=np.float64)
    out = rho**k * gap_x
    return float(out) if out.ndim == 0 else out


def bound_rdk(k, rho, frob_sq, gap_z, gap_x):
    k = np.asarray(k, dtype=np.float64)
    rk = rho**k
    out = k * rk / frob_sq * gap_z + rk * gap_x
    return float(out) if out.ndim == 0 else out


def bound_rtk(k, rho, frob_sq, gap_y, gap_z, gap_x):
    """Triple-sweep bound; the y-gap enters squared, as in the derivation."""
    k = np.asarray(k, dtype=np.float64)
    rk = rho**k
    out = k * (k + 1) * rk / (2.0 * frob_sq**2) * gap_y + k * rk / frob_sq * gap_z + rk * gap_x
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StepDecomposition:
    x_hat: np.ndarray
    noise_part: np.ndarray
    contraction_part: np.ndarray


def decompose_step(A, b, c, x_prev, x_next, x_star, i, spec: SpectralData | None = None) -> StepDecomposition:
    """Split one x-update into a z-noise part and a contraction part.

    ``x_hat`` is the projection of ``x_prev`` that row ``i`` would give with
    the exact right-hand side ``A[i] (A^+ b - (A^T A)^+ c)``. Then
    ``x_next - x_hat`` is parallel to ``A[i]`` and ``x_hat - x_star`` is
    orthogonal to it.
    """
    A = as_matrix(A)
    m, n = A.shape
    b = as_vector(b, m, "b")
    c = as_vector(c, n, "c")
    x_prev = as_vector(x_prev, n, "x_prev")
    x_next = as_vector(x_next, n, "x_next")
    x_star = as_vector(x_star, n, "x_star")
    nrm = A.row_norms_sq[i]
    if nrm == 0.0:
        raise ZeroRow(f"row {i} is zero")
    spec = spectral(A) if spec is None else spec
    a = A.entries[i]
    target = spec.pinv_apply(b) - spec.gram_pinv_apply(c)
    x_hat = x_prev - (a @ (x_prev - target)) / nrm * a
    return StepDecomposition(x_hat=x_hat, noise_part=x_next - x_hat, contraction_part=x_hat - x_star)
