"""Independent oracles and invariant checks shared by unit and acceptance tests.

Reference values come from ``numpy.linalg.pinv`` / ``scipy.linalg`` and
explicit projector matrices, not from the package's SVD or update code.
"""

import itertools

import numpy as np
import scipy.linalg as sla
from scipy import stats

from extkaczmarz import oracle, solvers
from extkaczmarz.linalg import DenseMatrix
from extkaczmarz.sampling import WeightedSampler, make_rng


def random_rank_deficient(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


def equal_sv_matrix(rng, m, n, r, scale=1.0):
    """``scale * U V^T`` with orthonormal U (m×r), V (n×r): all nonzero singular values equal."""
    U = sla.orth(rng.standard_normal((m, r)))
    V = sla.orth(rng.standard_normal((n, r)))
    return scale * U @ V.T


def row_projector_step(A, b, x, i):
    a = A[i]
    nrm = a @ a
    P = np.eye(A.shape[1]) - np.outer(a, a) / nrm
    return P @ x + a * (b[i] / nrm)


def enumerate_one_step(A, b, x, x_star):
    """Exact E_i ||x' - x_star||^2 over the row distribution, by enumeration."""
    A = np.asarray(A)
    p = (A * A).sum(axis=1) / (A * A).sum()
    total = 0.0
    for i in range(A.shape[0]):
        if p[i] == 0.0:
            continue
        d = row_projector_step(A, b, x, i) - x_star
        total += p[i] * (d @ d)
    return total


def quadratic_form(A, x, x_star):
    A = np.asarray(A)
    d = x - x_star
    M = np.eye(A.shape[1]) - A.T @ A / (A * A).sum()
    return d @ M @ d


def enumerate_rk_expectation(A, b, x0, x_star, k):
    """Exact E||x^k - x_star||^2 by summing over all m^k index sequences."""
    A = np.asarray(A)
    p = (A * A).sum(axis=1) / (A * A).sum()
    rows = [i for i in range(A.shape[0]) if p[i] > 0]
    total = 0.0
    for seq in itertools.product(rows, repeat=k):
        x = x0.copy()
        w = 1.0
        for i in seq:
            x = row_projector_step(A, b, x, i)
            w *= p[i]
        d = x - x_star
        total += w * (d @ d)
    return total


# ---- invariant checks: each returns the worst relative discrepancy ----


def check_projection_exactness(rng, trials=50):
    worst = 0.0
    for _ in range(trials):
        m, n = rng.integers(1, 9, size=2)
        A = DenseMatrix(rng.standard_normal((m, n)))
        x = rng.standard_normal(n)
        z = rng.standard_normal(m)
        i, j = rng.integers(m), rng.integers(n)
        rhs_i, rhs_j = rng.standard_normal(2)
        xp = solvers.row_project(A, rhs_i, x, i)
        zp = solvers.col_project(A, rhs_j, z, j)
        a, col = A.entries[i], A.entries[:, j]
        s_row = np.abs(a) @ np.abs(xp) + abs(rhs_i)
        s_col = np.abs(col) @ np.abs(zp) + abs(rhs_j)
        worst = max(worst, abs(a @ xp - rhs_i) / s_row, abs(col @ zp - rhs_j) / s_col)
    return worst


def _gen_problem(rng, m, n, r, consistent):
    A = random_rank_deficient(rng, m, n, r)
    b = rng.standard_normal(m)
    if consistent:
        c = A.T @ rng.standard_normal(m)
    else:
        c = rng.standard_normal(n)
    return A, b, c


def check_range_confinement(rng, iters=300):
    """max ||(I - A^+ A)(x^k - x_star)|| / ||x_star|| for rk/rdk/rtk from x0 = 0."""
    worst = 0.0
    for alg in ("rk", "rdk", "rtk"):
        A, b, c = _gen_problem(rng, 12, 8, 5, consistent=alg != "rtk")
        if alg == "rk":
            b = A @ rng.standard_normal(8)
            c = np.zeros(8)
        P = np.eye(8) - np.linalg.pinv(A) @ A
        Ap = np.linalg.pinv(A)
        x_star = Ap @ b - np.linalg.pinv(A.T @ A) @ c
        for k in (1, 7, 50, iters):
            state, _ = solvers.run(alg, A, b, c, iters=k, seed=int(rng.integers(1 << 30)))
            worst = max(worst, np.linalg.norm(P @ (state.x - x_star)) / np.linalg.norm(x_star))
    return worst


def check_z_affine_range(rng, iters=200):
    """z^k - b must lie in ran(A), and y^k - c in ran(A^T)."""
    worst = 0.0
    A, b, c = _gen_problem(rng, 10, 7, 4, consistent=False)
    Q = np.eye(10) - A @ np.linalg.pinv(A)
    R = np.eye(7) - np.linalg.pinv(A) @ A
    for alg in ("rdk", "rtk"):
        state, _ = solvers.run(alg, A, b, c, iters=iters, seed=int(rng.integers(1 << 30)))
        worst = max(worst, np.linalg.norm(Q @ (state.z - b)) / np.linalg.norm(b))
        if alg == "rtk":
            worst = max(worst, np.linalg.norm(R @ (state.y - c)) / np.linalg.norm(c))
    return worst


def check_orthogonal_decomposition(rng, steps=40):
    """||x^k - x*||^2 = ||x^k - x_hat||^2 + ||x_hat - x*||^2 on random rdk steps."""
    A, b, c = _gen_problem(rng, 9, 6, 4, consistent=True)
    ref = oracle.reference_solutions(A, b, c)
    x = rng.standard_normal(6)
    z = b.copy()
    worst = 0.0
    dm = DenseMatrix(A)
    prow = dm.row_norms_sq / dm.frob_sq
    pcol = dm.col_norms_sq / dm.frob_sq
    for _ in range(steps):
        j, i = rng.choice(6, p=pcol), rng.choice(9, p=prow)
        state, _ = solvers.run("rdk", dm, b, c, z0=z, x0=x, iters=1, indices=[[j, i]])
        dec = oracle.decompose_step(dm, b, c, x, state.x, ref.x_star, i)
        lhs = np.sum((state.x - ref.x_star) ** 2)
        rhs = np.sum(dec.noise_part**2) + np.sum(dec.contraction_part**2)
        worst = max(worst, abs(lhs - rhs) / max(lhs, 1e-300))
        x, z = state.x, state.z
    return worst


def check_key_inequality(rng, n_vectors=100):
    """Slack of u^T (I - A^T A / ||A||_F^2) u <= rho ||u||^2; returns (max violation, max equality gap)."""
    A = random_rank_deficient(rng, 8, 6, 4)
    r = oracle.rho(A)
    M = np.eye(6) - A.T @ A / (A * A).sum()
    violation = 0.0
    for _ in range(n_vectors):
        u = A.T @ rng.standard_normal(8)
        violation = max(violation, (u @ M @ u - r * (u @ u)) / (u @ u))
    E = equal_sv_matrix(rng, 8, 6, 3, scale=2.5)
    r = oracle.rho(E)
    M = np.eye(6) - E.T @ E / (E * E).sum()
    eq_gap = 0.0
    for _ in range(n_vectors):
        u = E.T @ rng.standard_normal(8)
        eq_gap = max(eq_gap, abs(u @ M @ u - r * (u @ u)) / (u @ u))
    return violation, eq_gap


def check_moore_penrose(rng, trials=10):
    worst = 0.0
    for _ in range(trials):
        A = random_rank_deficient(rng, 6, 4, int(rng.integers(1, 4)))
        P = oracle.spectral(A).pinv()
        scale = np.linalg.norm(A) + np.linalg.norm(P)
        for err in (
            A @ P @ A - A,
            P @ A @ P - P,
            A @ P - (A @ P).T,
            P @ A - (P @ A).T,
        ):
            worst = max(worst, np.linalg.norm(err) / scale)
    return worst


def chi_square_pvalues(rng, trials=10, draws=100_000):
    out = []
    for _ in range(trials):
        N = int(rng.integers(2, 21))
        w = rng.random(N)
        s = WeightedSampler(w)
        counts = np.bincount(s.sample_many(make_rng(int(rng.integers(1 << 30))), draws), minlength=N)
        expected = draws * w / w.sum()
        out.append(stats.chisquare(counts, expected).pvalue)
    return out


def enumerate_extended_expectation(A, b, c, x0, x_star, k, triple):
    """Exact E||x^k - x_star||^2 for the double (triple) sweep by enumerating every index path.

    Starts from z0 = b, y0 = c. Updates are written out independently of the
    package code.
    """
    A = np.asarray(A)
    m, n = A.shape
    F = (A * A).sum()
    prow = (A * A).sum(axis=1) / F
    pcol = (A * A).sum(axis=0) / F
    rows = [i for i in range(m) if prow[i] > 0]
    cols = [j for j in range(n) if pcol[j] > 0]
    per_iter = [rows, cols, rows] if triple else [cols, rows]

    def step(state, draw):
        y, z, x = state
        if triple:
            l, j, i = draw
            a = A[l]
            y = y - a * (a @ y) / (a @ a)
        else:
            j, i = draw
        col = A[:, j]
        rhs = c[j] - (y[j] if triple else 0.0)
        z = z - col * (col @ z - rhs) / (col @ col)
        a = A[i]
        x = x - a * (a @ x - (b[i] - z[i])) / (a @ a)
        return y, z, x

    def weight(draw):
        if triple:
            l, j, i = draw
            return prow[l] * pcol[j] * prow[i]
        j, i = draw
        return pcol[j] * prow[i]

    draws = list(itertools.product(*per_iter))
    total = 0.0

    def recurse(state, depth, w):
        nonlocal total
        if depth == k:
            d = state[2] - x_star
            total += w * (d @ d)
            return
        for dr in draws:
            recurse(step(state, dr), depth + 1, w * weight(dr))

    recurse((c.copy(), b.copy(), x0.copy()), 0, 1.0)
    return total
