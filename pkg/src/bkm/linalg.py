"""Dense LU with partial pivoting, symmetry test and 1-norm condition estimate.

Collocation systems here are small (tens of unknowns) and fully populated,
so a direct dense factorisation is all that is needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SingularMatrixError",
    "LUFactors",
    "lu_factor",
    "lu_solve",
    "is_symmetric",
    "condition_estimate_1norm",
]


class SingularMatrixError(ArithmeticError):
    """A zero pivot was met during elimination."""

    def __init__(self, pivot_index: int, message: str | None = None):
        self.pivot_index = pivot_index
        super().__init__(message or f"matrix is singular: zero pivot in column {pivot_index}")


@dataclass(frozen=True)
class LUFactors:
    """PA = LU packed in one array; ``perm[i]`` is the row of A moved to row i."""

    lu: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.n:
            raise ValueError(f"right-hand side has length {b.shape[0]}, expected {self.n}")
        x = b[self.perm].copy()
        lu = self.lu
        for i in range(1, self.n):
            x[i] -= lu[i, :i] @ x[:i]
        for i in range(self.n - 1, -1, -1):
            x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
        return x

    def solve_transpose(self, b) -> np.ndarray:
        """Solve A^T x = b."""
        z = np.asarray(b, dtype=float).copy()
        lu = self.lu
        for i in range(self.n):
            z[i] = (z[i] - lu[:i, i] @ z[:i]) / lu[i, i]
        for i in range(self.n - 2, -1, -1):
            z[i] -= lu[i + 1:, i] @ z[i + 1:]
        x = np.empty_like(z)
        x[self.perm] = z
        return x


def _as_square(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def lu_factor(a) -> LUFactors:
    lu = _as_square(a)
    n = lu.shape[0]
    perm = np.arange(n)
    scale = np.max(np.abs(lu)) if n else 0.0
    tiny = np.finfo(float).eps * scale
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tiny:
            raise SingularMatrixError(k)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LUFactors(lu, perm)


def lu_solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by LU with partial pivoting."""
    return lu_factor(a).solve(b)


def is_symmetric(a, tol: float = 0.0) -> bool:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= tol)


def condition_estimate_1norm(a, factors: LUFactors | None = None) -> float:
    """Estimate kappa_1(A) = ||A||_1 ||A^-1||_1.

    ||A^-1||_1 comes from Hager's iteration with Higham's alternating-sign
    safeguard, using only solves with the LU factors.
    """
    a = _as_square(a)
    f = factors if factors is not None else lu_factor(a)
    n = f.n
    if n == 0:
        return 0.0

    x = np.full(n, 1.0 / n)
    estimate = 0.0
    for it in range(5):
        y = f.solve(x)
        estimate = np.sum(np.abs(y))
        xi = np.where(y >= 0, 1.0, -1.0)
        z = f.solve_transpose(xi)
        j = int(np.argmax(np.abs(z)))
        if it > 0 and np.abs(z[j]) <= z @ x:
            break
        x = np.zeros(n)
        x[j] = 1.0

    if n > 1:
        alt = np.array([(-1) ** i * (1 + i / (n - 1)) for i in range(n)])
        estimate = max(estimate, 2.0 * np.sum(np.abs(f.solve(alt))) / (3.0 * n))
    return float(np.max(np.sum(np.abs(a), axis=0)) * estimate)
