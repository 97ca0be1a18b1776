"""Bessel functions J0, J1, I0 and I1 for real arguments.

All four functions accept a scalar or an array and return the same kind.

J0/J1 use the ascending power series for |x| < 8, Miller's backward
recurrence (normalised with J0 + 2*sum(J_2k) = 1) up to |x| = 50, and the
Hankel asymptotic expansion beyond. I0/I1 use the power series (all terms
positive, so no cancellation) up to |x| = 30 and the exponential asymptotic
expansion beyond.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["DomainError", "bessel_j0", "bessel_j1", "bessel_i0", "bessel_i1"]

_SERIES_LIMIT_J = 8.0
_MILLER_LIMIT_J = 50.0
_SERIES_LIMIT_I = 30.0


class DomainError(ValueError):
    """Raised for non-finite arguments."""


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Bessel functions require finite arguments")
    return arr


def _finish(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def _series(x, order, sign):
    # sum_k sign^k (x/2)^(2k+order) / (k! (k+order)!)
    q = 0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, 200):
        term = term * (sign * q / (k * (k + order)))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _asymptotic_coeffs(order, nterms):
    mu = 4.0 * order * order
    coeffs = [1.0]
    for k in range(1, nterms):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return coeffs


def _hankel_asymptotic(x, order):
    ax = np.abs(x)
    a = _asymptotic_coeffs(order, 30)
    p = np.zeros_like(ax)
    q = np.zeros_like(ax)
    for k, ak in enumerate(a):
        term = ak / ax**k
        if k % 2 == 0:
            p += (-1) ** (k // 2) * term
        else:
            q += (-1) ** (k // 2) * term
    chi = ax - (0.5 * order + 0.25) * math.pi
    out = np.sqrt(2.0 / (math.pi * ax)) * (p * np.cos(chi) - q * np.sin(chi))
    if order == 1:
        out = np.sign(x) * out
    return out


def _miller_j01(x):
    """Return (J0(x), J1(x)) for x > 0 by backward recurrence."""
    # fixed start order so each value is independent of the rest of the batch
    start = 2 * ((int(1.2 * _MILLER_LIMIT_J) + 40) // 2)
    j_next = np.zeros_like(x)
    j_curr = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = np.zeros_like(x)
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / x) * j_curr - j_next
        j_next, j_curr = j_curr, j_prev
        # j_curr now holds J_{k-1}
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_curr
        if k - 1 == 1:
            j1 = j_curr.copy()
        big = np.abs(j_curr) > 1e200
        if np.any(big):
            scale = np.where(big, 1e-200, 1.0)
            j_curr *= scale
            j_next *= scale
            norm *= scale
            j1 *= scale
    norm += j_curr
    return j_curr / norm, j1 / norm


def _bessel_j(x, order):
    arr = _prepare(x)
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    ax = np.abs(flat)

    small = ax < _SERIES_LIMIT_J
    if np.any(small):
        out[small] = _series(flat[small], order, -1.0)

    mid = (~small) & (ax <= _MILLER_LIMIT_J)
    if np.any(mid):
        j0, j1 = _miller_j01(ax[mid])
        out[mid] = j0 if order == 0 else np.sign(flat[mid]) * j1

    large = ax > _MILLER_LIMIT_J
    if np.any(large):
        out[large] = _hankel_asymptotic(flat[large], order)
    return _finish(arr, out.reshape(arr.shape))


def _bessel_i(x, order):
    arr = _prepare(x)
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    ax = np.abs(flat)

    small = ax <= _SERIES_LIMIT_I
    if np.any(small):
        out[small] = _series(flat[small], order, 1.0)

    large = ~small
    if np.any(large):
        a = _asymptotic_coeffs(order, 30)
        s = np.zeros_like(ax[large])
        with np.errstate(over="ignore"):
            for k, ak in enumerate(a):
                s += (-1) ** k * ak / ax[large] ** k
            val = np.exp(ax[large]) / np.sqrt(2.0 * math.pi * ax[large]) * s
        out[large] = val if order == 0 else np.sign(flat[large]) * val
    return _finish(arr, out.reshape(arr.shape))


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    return _bessel_j(x, 0)


def bessel_j1(x):
    """Bessel function of the first kind, order one. J0' = -J1."""
    return _bessel_j(x, 1)


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero."""
    return _bessel_i(x, 0)


def bessel_i1(x):
    """Modified Bessel function of the first kind, order one. I0' = I1."""
    return _bessel_i(x, 1)
