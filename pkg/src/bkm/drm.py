"""Dual-reciprocity interpolation of nodal right-hand sides.

Nodal data g_i are interpolated as sum_j alpha_j forcing(|x - x_j|) plus a
linear tail a x + b y + d, with the moment conditions
sum alpha_j = sum alpha_j x_j = sum alpha_j y_j = 0. Because each forcing term
is the image of ``particular`` under (lap + 1) and a linear polynomial is its
own image, the same coefficients give a particular solution u_p with
(lap + 1) u_p = interpolant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Knot, positions
from .linalg import lu_solve
from .rbf import RbfPair

__all__ = [
    "DrmInterpolant",
    "as_points",
    "build_interpolation_matrix",
    "fit",
    "forcing_basis",
    "particular_basis",
    "particular_gradient_basis",
    "eval_forcing",
    "eval_particular",
    "eval_particular_gradient",
    "eval_particular_normal_derivative",
]

TAIL = 3


def as_points(pts) -> np.ndarray:
    """Knot list or array-like -> float array of shape (n, 2)."""
    if isinstance(pts, Sequence) and pts and isinstance(pts[0], Knot):
        return positions(pts)
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 1 and arr.shape == (2,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected points of shape (n, 2), got {arr.shape}")
    return arr


def _distances(points, centers):
    d = points[:, None, :] - centers[None, :, :]
    return d, np.hypot(d[..., 0], d[..., 1])


def _poly(points):
    return np.column_stack([points, np.ones(len(points))])


def forcing_basis(points, centers, rbf: RbfPair) -> np.ndarray:
    """Rows [forcing(|p - x_j|)..., x, y, 1] for each point p."""
    points, centers = as_points(points), as_points(centers)
    _, r = _distances(points, centers)
    return np.hstack([rbf.forcing(r), _poly(points)])


def particular_basis(points, centers, rbf: RbfPair) -> np.ndarray:
    """Rows [particular(|p - x_j|)..., x, y, 1] for each point p."""
    points, centers = as_points(points), as_points(centers)
    _, r = _distances(points, centers)
    return np.hstack([rbf.particular(r), _poly(points)])


def particular_gradient_basis(points, centers, rbf: RbfPair) -> tuple[np.ndarray, np.ndarray]:
    """x- and y-derivative counterparts of :func:`particular_basis`."""
    points, centers = as_points(points), as_points(centers)
    d, r = _distances(points, centers)
    f = rbf.gradient_factor(r)
    n = len(points)
    gx = np.hstack([f * d[..., 0], np.tile([1.0, 0.0, 0.0], (n, 1))])
    gy = np.hstack([f * d[..., 1], np.tile([0.0, 1.0, 0.0], (n, 1))])
    return gx, gy


def _check_distinct(centers):
    _, r = _distances(centers, centers)
    np.fill_diagonal(r, np.inf)
    if len(centers) > 1 and np.min(r) <= 1e-12:
        i, j = np.unravel_index(np.argmin(r), r.shape)
        raise ValueError(f"duplicate knots {i} and {j} at {tuple(centers[i])}")


def build_interpolation_matrix(knots, rbf: RbfPair) -> np.ndarray:
    """Symmetric saddle-point matrix [[Phi, P], [P^T, 0]] of size (M + 3)."""
    centers = as_points(knots)
    _check_distinct(centers)
    m = len(centers)
    a = np.zeros((m + TAIL, m + TAIL))
    a[:m] = forcing_basis(centers, centers, rbf)
    a[m:, :m] = _poly(centers).T
    return a


@dataclass(frozen=True)
class DrmInterpolant:
    """Fitted coefficients: ``alpha[:M]`` radial weights, ``alpha[M:]`` the (x, y, 1) tail."""

    centers: np.ndarray
    rbf: RbfPair
    alpha: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return self.alpha[: len(self.centers)]

    @property
    def tail(self) -> np.ndarray:
        return self.alpha[len(self.centers):]


def fit(knots, rbf: RbfPair, rhs_values, poly_tail: bool = True) -> DrmInterpolant:
    """Interpolate nodal values exactly.

    ``poly_tail=False`` drops the linear tail and the moment conditions; it is
    only meant for basis comparisons, where the tail would reproduce linear
    data exactly regardless of the radial function.
    """
    centers = as_points(knots)
    rhs = np.asarray(rhs_values, dtype=float)
    m = len(centers)
    if rhs.shape != (m,):
        raise ValueError(f"expected {m} nodal values, got shape {rhs.shape}")
    a = build_interpolation_matrix(centers, rbf)
    if poly_tail:
        alpha = lu_solve(a, np.concatenate([rhs, np.zeros(TAIL)]))
    else:
        alpha = np.concatenate([lu_solve(a[:m, :m], rhs), np.zeros(TAIL)])
    return DrmInterpolant(centers, rbf, alpha)


def _scalar_or_array(p, val):
    return float(val[0]) if np.ndim(p) == 1 else val


def eval_forcing(interp: DrmInterpolant, p):
    """The interpolant of the nodal data itself."""
    val = forcing_basis(as_points(p), interp.centers, interp.rbf) @ interp.alpha
    return _scalar_or_array(p, val)


def eval_particular(interp: DrmInterpolant, p):
    val = particular_basis(as_points(p), interp.centers, interp.rbf) @ interp.alpha
    return _scalar_or_array(p, val)


def eval_particular_gradient(interp: DrmInterpolant, p):
    gx, gy = particular_gradient_basis(as_points(p), interp.centers, interp.rbf)
    vx, vy = gx @ interp.alpha, gy @ interp.alpha
    if np.ndim(p) == 1:
        return float(vx[0]), float(vy[0])
    return vx, vy


def eval_particular_normal_derivative(interp: DrmInterpolant, p, n):
    vx, vy = eval_particular_gradient(interp, p)
    n = np.asarray(n, dtype=float)
    if np.ndim(p) == 1:
        return float(vx * n[0] + vy * n[1])
    return vx * n[..., 0] + vy * n[..., 1]
