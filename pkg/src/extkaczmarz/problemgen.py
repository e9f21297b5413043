"""Synthetic test problems with prescribed rank, condition bound and consistency.

``A = U diag(d) V^T`` where ``U`` (m×r) and ``V`` (n×r) are the Q factors of
thin QR decompositions of standard Gaussian matrices and ``d`` is uniform on
``[1, kappa]``. Then ``b`` is standard Gaussian, and ``c = A^T w`` for a
consistent problem or ``c = g + N h`` (``N`` a null-space basis of ``A``)
for an inconsistent one.

Random draws are taken in that order (U, d, V, then b, then c) from PCG64
streams seeded by ``SeedSequence(seed, spawn_key=(0,))`` for the matrix and
``spawn_key=(1,)`` for the right-hand sides, independent of solver seeds.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InconsistentImpossible, InvalidSpec
from .linalg import DenseMatrix, as_matrix
from .oracle import Consistency, classify_consistency, null_space, spectral

__all__ = ["GenSpec", "ProblemInstance", "generate_matrix", "generate_rhs", "generate_problem", "gen_rng"]

_MATRIX_STREAM = 0
_RHS_STREAM = 1


@dataclass(frozen=True)
class GenSpec:
    m: int
    n: int
    r: int
    kappa: float = 1.0
    seed: int = 0
    consistent: bool = True

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise InvalidSpec(f"dimensions must be positive, got m={self.m}, n={self.n}")
        if not 1 <= self.r <= min(self.m, self.n):
            raise InvalidSpec(f"rank must satisfy 1 <= r <= min(m, n) = {min(self.m, self.n)}, got {self.r}")
        if not self.kappa >= 1.0:
            raise InvalidSpec(f"kappa must be >= 1, got {self.kappa}")
        if not self.consistent and self.r >= self.n:
            raise InconsistentImpossible(
                f"rank {self.r} equals n = {self.n}: ran(A^T) is all of R^n, so no inconsistent c exists"
            )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ProblemInstance:
    A: DenseMatrix
    b: np.ndarray
    c: np.ndarray
    spec: GenSpec


def gen_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(stream,))))


def _orthonormal(rng, rows, cols):
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)), mode="reduced")
    return q


def generate_matrix(spec: GenSpec, rng: np.random.Generator | None = None) -> DenseMatrix:
    spec.validate()
    rng = gen_rng(spec.seed, _MATRIX_STREAM) if rng is None else rng
    U = _orthonormal(rng, spec.m, spec.r)
    d = 1.0 + (spec.kappa - 1.0) * rng.random(spec.r)
    V = _orthonormal(rng, spec.n, spec.r)
    return DenseMatrix((U * d) @ V.T)


def generate_rhs(A, spec: GenSpec, rng: np.random.Generator | None = None):
    """Return ``(b, c)`` for ``A`` following the consistency flag of ``spec``."""
    A = as_matrix(A)
    if not spec.consistent and spec.r >= A.n:
        raise InconsistentImpossible(f"rank {spec.r} equals n = {A.n}; cannot place c outside ran(A^T)")
    rng = gen_rng(spec.seed, _RHS_STREAM) if rng is None else rng
    b = rng.standard_normal(A.m)
    if spec.consistent:
        c = A.entries.T @ rng.standard_normal(A.m)
    else:
        N = null_space(A)
        c = rng.standard_normal(A.n) + N @ rng.standard_normal(N.shape[1])
    return b, c


def generate_problem(spec: GenSpec, check: bool = True) -> ProblemInstance:
    """Generate ``(A, b, c)``; with ``check`` the consistency class is verified."""
    A = generate_matrix(spec)
    b, c = generate_rhs(A, spec)
    if check:
        want = Consistency.CONSISTENT if spec.consistent else Consistency.INCONSISTENT
        got = classify_consistency(A, c, spectral(A))
        if got is not want:
            raise InvalidSpec(f"generated c is {got.value}, requested {want.value}")
    return ProblemInstance(A=A, b=b, c=c, spec=spec)
