"""Nonsingular general solutions used as boundary basis functions.

Every kernel here is finite at r = 0, so source and response knots may
coincide. Functions take distances (or point pairs) as scalars or arrays.

Operators satisfied (lam > 0):

==========================  ======================================
helmholtz2d                 lap u + lam^2 u = 0
modified_helmholtz2d        lap u - lam^2 u = 0
helmholtz3d                 lap u + lam^2 u = 0   (3D)
modified_helmholtz3d        lap u - lam^2 u = 0   (3D)
biharmonic2d_basis          lap^2 w - lam^4 w = 0
biharmonic3d_basis          lap^2 w - lam^4 w = 0 (3D)
heat3d                      lap u = (1/k) du/dt
wave3d                      lap u = (1/c^2) d2u/dt2
varying_helmholtz2d         lap u - (2/x_i^2) u = 0, x_i frozen at the response knot
==========================  ======================================
"""
from __future__ import annotations

import numpy as np

from .specfun import bessel_i0, bessel_i1, bessel_j0, bessel_j1

__all__ = [
    "SingularParameterError",
    "helmholtz2d",
    "helmholtz2d_gradient",
    "helmholtz2d_normal_derivative",
    "modified_helmholtz2d",
    "modified_helmholtz2d_gradient",
    "helmholtz3d",
    "modified_helmholtz3d",
    "biharmonic2d_basis",
    "biharmonic3d_basis",
    "heat3d",
    "wave3d",
    "varying_helmholtz2d",
]

_SMALL = 1e-6
_AXIS_TOL = 1e-12


class SingularParameterError(ValueError):
    """A response-dependent kernel parameter is undefined (division by zero)."""


def _out(like, val):
    return float(val) if np.ndim(like) == 0 else val


def _check_lam(lam):
    if not lam > 0:
        raise ValueError(f"wavenumber must be positive, got {lam}")


def helmholtz2d(r, lam: float = 1.0):
    """J0(lam r)."""
    _check_lam(lam)
    return bessel_j0(lam * np.asarray(r, dtype=float))


def _j1_over_r(r, lam):
    # J1(lam r) / r, -> lam/2 as r -> 0
    r = np.asarray(r, dtype=float)
    z = lam * r
    small = z < _SMALL
    safe = np.where(small, 1.0, r)
    return np.where(small, 0.5 * lam * (1.0 - z * z / 8.0), bessel_j1(lam * safe) / safe)


def _i1_over_r(r, lam):
    r = np.asarray(r, dtype=float)
    z = lam * r
    small = z < _SMALL
    safe = np.where(small, 1.0, r)
    return np.where(small, 0.5 * lam * (1.0 + z * z / 8.0), bessel_i1(lam * safe) / safe)


def helmholtz2d_gradient(dx, dy, lam: float = 1.0):
    """Gradient of J0(lam |d|) with respect to the response point, d = response - source."""
    _check_lam(lam)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    f = -lam * _j1_over_r(np.hypot(dx, dy), lam)
    gx, gy = f * dx, f * dy
    if np.ndim(gx) == 0:
        return float(gx), float(gy)
    return gx, gy


def helmholtz2d_normal_derivative(response, source, normal, lam: float = 1.0):
    """dJ0(lam r)/dn at the response point: -lam J1(lam r) ((x - x_k) . n) / r."""
    response = np.asarray(response, dtype=float)
    source = np.asarray(source, dtype=float)
    normal = np.asarray(normal, dtype=float)
    d = response - source
    gx, gy = helmholtz2d_gradient(d[..., 0], d[..., 1], lam)
    val = np.asarray(gx) * normal[..., 0] + np.asarray(gy) * normal[..., 1]
    return float(val) if np.ndim(val) == 0 else val


def modified_helmholtz2d(r, lam: float = 1.0):
    """I0(lam r)."""
    _check_lam(lam)
    return bessel_i0(lam * np.asarray(r, dtype=float))


def modified_helmholtz2d_gradient(dx, dy, lam: float = 1.0):
    _check_lam(lam)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    f = lam * _i1_over_r(np.hypot(dx, dy), lam)
    gx, gy = f * dx, f * dy
    if np.ndim(gx) == 0:
        return float(gx), float(gy)
    return gx, gy


def _sinc_like(r, lam, fn, sign):
    # fn(lam r) / r with the series lam (1 + sign (lam r)^2 / 6) near 0
    r = np.asarray(r, dtype=float)
    z = lam * r
    small = z < _SMALL
    safe = np.where(small, 1.0, r)
    return np.where(small, lam * (1.0 + sign * z * z / 6.0), fn(lam * safe) / safe)


def helmholtz3d(r, lam: float = 1.0):
    """sin(lam r) / r, equal to lam at r = 0."""
    _check_lam(lam)
    return _out(r, _sinc_like(r, lam, np.sin, -1.0))


def modified_helmholtz3d(r, lam: float = 1.0):
    """sinh(lam r) / r, equal to lam at r = 0."""
    _check_lam(lam)
    return _out(r, _sinc_like(r, lam, np.sinh, 1.0))


def biharmonic2d_basis(r, lam: float = 1.0):
    """(J0(lam r), I0(lam r)); any combination solves lap^2 w = lam^4 w."""
    return helmholtz2d(r, lam), modified_helmholtz2d(r, lam)


def biharmonic3d_basis(r, lam: float = 1.0):
    """(sin(lam r)/r, sinh(lam r)/r)."""
    return helmholtz3d(r, lam), modified_helmholtz3d(r, lam)


def heat3d(r, t, t_k, k: float):
    """exp(-k (t - t_k)) sin(r) / r."""
    if not k > 0:
        raise ValueError(f"diffusivity must be positive, got {k}")
    val = np.exp(-k * (np.asarray(t, dtype=float) - t_k)) * _sinc_like(r, 1.0, np.sin, -1.0)
    return float(val) if np.ndim(val) == 0 else val


def wave3d(r, t, t_k, c: float, a1: float = 1.0, a2: float = 0.0):
    """[a1 cos(c (t - t_k)) + (a2 / c) sin(c (t - t_k))] sin(r) / r."""
    if not c > 0:
        raise ValueError(f"wave speed must be positive, got {c}")
    tau = c * (np.asarray(t, dtype=float) - t_k)
    val = (a1 * np.cos(tau) + a2 / c * np.sin(tau)) * _sinc_like(r, 1.0, np.sin, -1.0)
    return float(val) if np.ndim(val) == 0 else val


def varying_helmholtz2d(response, source):
    """I0(sqrt(2) r / |x_response|), the parameter taken from the response point.

    Not symmetric in its arguments.
    """
    response = np.asarray(response, dtype=float)
    source = np.asarray(source, dtype=float)
    xr = np.abs(response[..., 0])
    # knots generated at t = pi/2 sit at x ~ 1e-16 rather than exactly 0
    if np.any(xr <= _AXIS_TOL):
        raise SingularParameterError("response point on x = 0: coefficient 2/x^2 is undefined")
    r = np.hypot(response[..., 0] - source[..., 0], response[..., 1] - source[..., 1])
    val = bessel_i0(np.sqrt(2.0) * r / xr)
    if not np.all(np.isfinite(val)):
        raise SingularParameterError("response point too close to x = 0: kernel overflows")
    return val
