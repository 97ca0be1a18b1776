"""Radial function pairs for the reverse dual-reciprocity scheme.

A pair fixes the approximate particular solution ``particular(r)`` first and
derives the interpolation basis from it, ``forcing = (lap + 1) particular``
with the 2D radial Laplacian ``f'' + f'/r``. The multiquadric pair is the
default; ``r**3`` and ``r**4 log r`` pairs are kept for accuracy comparisons.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "RbfPair",
    "mq_particular",
    "mq_forcing",
    "mq_particular_gradient",
    "mq_pair",
    "cubic_pair",
    "tps_pair",
    "alt_rbf_pairs",
]

Radial = Callable[[np.ndarray], np.ndarray]


def _radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    return r


def _check_shape(c):
    if not c > 0:
        raise ValueError(f"shape parameter must be positive, got {c}")


def _out(r, val):
    return float(val) if np.ndim(r) == 0 else val


def mq_particular(r, c: float):
    """(r^2 + c^2)^(3/2)."""
    _check_shape(c)
    r = _radius(r)
    return _out(r, (r * r + c * c) ** 1.5)


def mq_forcing(r, c: float):
    """(lap + 1) applied to :func:`mq_particular`.

    6 s + 3 r^2 / s + s^3 with s = sqrt(r^2 + c^2).
    """
    _check_shape(c)
    r = _radius(r)
    s = np.sqrt(r * r + c * c)
    return _out(r, 6.0 * s + 3.0 * r * r / s + s**3)


def mq_particular_gradient(dx, dy, c: float):
    """Gradient of :func:`mq_particular` at offset (dx, dy) from the centre."""
    _check_shape(c)
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    f = 3.0 * np.sqrt(dx * dx + dy * dy + c * c)
    if np.ndim(dx) == 0 and np.ndim(dy) == 0:
        return float(f * dx), float(f * dy)
    return f * dx, f * dy


@dataclass(frozen=True)
class RbfPair:
    """Particular solution and its forcing image under (lap + 1) in 2D.

    ``gradient_factor(r)`` is particular'(r) / r, so that the gradient at
    offset d is ``gradient_factor(|d|) * d``; it stays finite at r = 0.
    """

    name: str
    particular: Radial
    forcing: Radial
    particular_derivative: Radial
    gradient_factor: Radial
    shape: float | None = None

    def particular_gradient(self, dx, dy):
        dx = np.asarray(dx, dtype=float)
        dy = np.asarray(dy, dtype=float)
        f = self.gradient_factor(np.hypot(dx, dy))
        return f * dx, f * dy


def mq_pair(c: float) -> RbfPair:
    _check_shape(c)
    c2 = c * c
    return RbfPair(
        name="mq",
        particular=lambda r: (r * r + c2) ** 1.5,
        forcing=lambda r: 6.0 * np.sqrt(r * r + c2) + 3.0 * r * r / np.sqrt(r * r + c2) + (r * r + c2) ** 1.5,
        particular_derivative=lambda r: 3.0 * r * np.sqrt(r * r + c2),
        gradient_factor=lambda r: 3.0 * np.sqrt(r * r + c2),
        shape=c,
    )


def cubic_pair() -> RbfPair:
    """particular r^3, forcing 9 r + r^3 (linear-like basis)."""
    return RbfPair(
        name="linear",
        particular=lambda r: r**3,
        forcing=lambda r: 9.0 * r + r**3,
        particular_derivative=lambda r: 3.0 * r * r,
        gradient_factor=lambda r: 3.0 * r,
    )


def _rlog(r, power):
    # r^power * log r, extended by 0 at r = 0
    r = np.asarray(r, dtype=float)
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, safe**power * np.log(safe), 0.0)


def tps_pair() -> RbfPair:
    """particular r^4 log r, forcing 16 r^2 log r + 8 r^2 + r^4 log r (TPS-like basis)."""
    return RbfPair(
        name="tps",
        particular=lambda r: _rlog(r, 4),
        forcing=lambda r: 16.0 * _rlog(r, 2) + 8.0 * np.asarray(r) ** 2 + _rlog(r, 4),
        particular_derivative=lambda r: 4.0 * _rlog(r, 3) + np.asarray(r) ** 3,
        gradient_factor=lambda r: 4.0 * _rlog(r, 2) + np.asarray(r) ** 2,
    )


def alt_rbf_pairs() -> dict[str, RbfPair]:
    return {"linear": cubic_pair(), "tps": tps_pair()}
