"""Dense linear algebra kernel: LU solves, residual norms, FD Jacobian oracle.

Everything here is pure and operates on plain float64 numpy arrays. Systems
are desk scale (tens of unknowns), so dense LU with partial pivoting is used
throughout; the pivot-based singularity test is the signal consumed by the
nonlinear solvers when an iteration matrix degenerates.
"""

from __future__ import annotations

import numpy as np

# Relative pivot threshold below which a factorization is declared singular.
SINGULAR_RTOL = 1e-12


class SingularMatrix(Exception):
    """Pivot collapsed during LU factorization (structurally singular system)."""


class NonFiniteResidual(Exception):
    """A model evaluation produced NaN or Inf (state left the model's domain)."""


def rms_norm(v: np.ndarray) -> float:
    """Euclidean norm scaled by 1/sqrt(len), so tolerances are dimension-free."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return 0.0
    return float(np.linalg.norm(v) / np.sqrt(v.size))


def l2_norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=float)))


def max_norm(v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.max(np.abs(v))) if v.size else 0.0


NORMS = {"rms": rms_norm, "l2": l2_norm, "max": max_norm}


def lu_factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LU factorization with partial pivoting.

    Returns (lu, piv) where lu packs L (unit lower) and U. Raises
    SingularMatrix when a pivot falls below SINGULAR_RTOL times the largest
    magnitude in the initial pivot column.
    """
    lu = np.array(a, dtype=float)
    if lu.ndim != 2 or lu.shape[0] != lu.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {lu.shape}")
    if not np.all(np.isfinite(lu)):
        raise NonFiniteResidual("matrix contains non-finite entries")
    n = lu.shape[0]
    piv = np.arange(n)
    scale = float(np.max(np.abs(lu[:, 0]))) if n else 0.0
    threshold = SINGULAR_RTOL * scale
    for k in range(n):
        j = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = abs(lu[j, k])
        if pivot <= threshold:
            raise SingularMatrix(
                f"pivot {pivot:.3e} at column {k} below {threshold:.3e}"
            )
        if j != k:
            lu[[k, j]] = lu[[j, k]]
            piv[[k, j]] = piv[[j, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve(lu: np.ndarray, piv: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve with factors from lu_factor (forward/back substitution)."""
    n = lu.shape[0]
    x = np.asarray(b, dtype=float)[piv].copy()
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b by dense LU with partial pivoting.

    Raises SingularMatrix if the factorization detects a degenerate pivot,
    which callers interpret as a singular iteration matrix.
    """
    b = np.asarray(b, dtype=float)
    a = np.asarray(a, dtype=float)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: matrix {a.shape}, rhs {b.shape}")
    lu, piv = lu_factor(a)
    return lu_solve(lu, piv, b)


def fd_jacobian(func, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of func at x, column j = (F(x+h e_j) - F(x-h e_j)) / 2h.

    Test oracle for analytic Jacobians. Raises NonFiniteResidual if any
    evaluation is non-finite.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        fp = np.asarray(func(x + e), dtype=float)
        fm = np.asarray(func(x - e), dtype=float)
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise NonFiniteResidual(f"non-finite evaluation while perturbing column {j}")
        cols.append((fp - fm) / (2.0 * h))
    if not cols:
        f0 = np.asarray(func(x), dtype=float)
        return np.zeros((f0.size, 0))
    return np.column_stack(cols)
