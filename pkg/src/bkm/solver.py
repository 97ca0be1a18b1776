"""Assembly and solution of boundary knot method systems.

The PDE is written as lap u + L1 u = f and rearranged to
(lap + 1) u = f + u - L1 u. The solution is split as u = v + u_p where v is a
combination of J0(|x - x_k|) over the boundary knots (it solves the
homogeneous Helmholtz equation exactly) and u_p is the dual-reciprocity
particular solution.

Four modes are supported:

* ``Helmholtz``: no particular part; Dirichlet and/or Neumann collocation.
* ``KnownRhsDRM``: the right-hand side is known at every knot; fit u_p, then
  collocate v against the boundary data minus the trace of u_p.
* ``CoupledDRM``: the right-hand side depends on u. Substituting u = v + u_p
  gives one square linear system in the kernel weights, the DRM weights and
  the unknown interior values. A Picard iteration over the same equations is
  available as a cross-check.
* ``ResponseKernel``: a kernel whose parameter is taken from the response
  point (variable-coefficient problems); boundary knots only.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from . import drm
from .geometry import EllipseDomain, InteriorLayout, Knot, boundary_knots, interior_knots, normals, positions
from .kernels import helmholtz2d, helmholtz2d_gradient, varying_helmholtz2d
from .linalg import LUFactors, SingularMatrixError, condition_estimate_1norm, lu_factor
from .rbf import RbfPair, mq_pair

__all__ = [
    "FirstOrderOperator",
    "Helmholtz",
    "KnownRhsDRM",
    "CoupledDRM",
    "ResponseKernel",
    "ProblemSpec",
    "BkmSolution",
    "SingularSystemError",
    "solve",
    "solve_homogeneous",
    "solve_known_rhs",
    "solve_coupled",
    "solve_coupled_picard",
    "solve_response_kernel",
    "evaluate",
]

log = logging.getLogger(__name__)

Field2 = Callable[[np.ndarray, np.ndarray], np.ndarray]
NeumannData = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _zero(x, y):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class FirstOrderOperator:
    """L1 u = dx * du/dx + dy * du/dy + identity * u."""

    dx: float = 0.0
    dy: float = 0.0
    identity: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.dx, self.dy, self.identity)):
            raise ValueError("operator coefficients must be finite")

    @property
    def is_zero(self) -> bool:
        return self.dx == 0 and self.dy == 0 and self.identity == 0

    def apply(self, value, grad_x, grad_y):
        return self.dx * grad_x + self.dy * grad_y + self.identity * value


@dataclass(frozen=True)
class Helmholtz:
    lam: float = 1.0


@dataclass(frozen=True)
class KnownRhsDRM:
    """(lap + 1) u = g with g known at every knot."""

    g: Field2


@dataclass(frozen=True)
class CoupledDRM:
    """lap u + L1 u = f."""

    l1: FirstOrderOperator
    f: Field2 = _zero


@dataclass(frozen=True)
class ResponseKernel:
    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray] = varying_helmholtz2d
    name: str = "varying-helmholtz"


OperatorMode = Union[Helmholtz, KnownRhsDRM, CoupledDRM, ResponseKernel]


@dataclass(frozen=True)
class ProblemSpec:
    """A boundary value problem on an ellipse.

    ``dirichlet(x, y)`` and ``neumann(x, y, nx, ny)`` take arrays. Boundary
    knots listed in ``neumann_knots`` (by index) carry the Neumann condition,
    all others the Dirichlet condition.
    """

    domain: EllipseDomain
    mode: OperatorMode
    dirichlet: Field2
    n_boundary: int
    neumann: NeumannData | None = None
    neumann_knots: frozenset[int] = frozenset()
    interior: InteriorLayout | None = None
    shape: float = 1.0
    rbf: RbfPair | None = None
    poly_tail: bool = True

    def __post_init__(self):
        if self.n_boundary < 3:
            raise ValueError(f"need at least 3 boundary knots, got {self.n_boundary}")
        bad = [i for i in self.neumann_knots if not 0 <= i < self.n_boundary]
        if bad:
            raise ValueError(f"Neumann knot indices out of range: {sorted(bad)}")
        if self.neumann_knots and self.neumann is None:
            raise ValueError("Neumann knots given without Neumann data")

    def boundary_knots(self) -> list[Knot]:
        return boundary_knots(self.domain, self.n_boundary)

    def interior_knots(self) -> list[Knot]:
        if self.interior is None:
            return []
        return interior_knots(self.domain, self.interior)

    def pair(self) -> RbfPair:
        return self.rbf if self.rbf is not None else mq_pair(self.shape)


class SingularSystemError(SingularMatrixError):
    pass


@dataclass(frozen=True)
class BkmSolution:
    """Kernel weights ``beta`` over the boundary knots plus an optional DRM part.

    ``system_matrix`` is the matrix of the final linear solve, kept for
    symmetry and conditioning diagnostics.
    """

    problem: ProblemSpec
    boundary: list[Knot]
    interior: list[Knot]
    beta: np.ndarray
    system_matrix: np.ndarray
    drm: drm.DrmInterpolant | None = None
    interior_values: np.ndarray | None = None
    iterations: int | None = None
    converged: bool = True
    _factors: LUFactors | None = field(default=None, repr=False, compare=False)

    def evaluate(self, p):
        return evaluate(self, p)

    def condition_estimate(self) -> float:
        return condition_estimate_1norm(self.system_matrix, self._factors)

    def boundary_residual(self) -> float:
        """Max deviation from the boundary data over the boundary knots."""
        spec = self.problem
        pts = positions(self.boundary)
        dn = np.array(sorted(spec.neumann_knots), dtype=int)
        dd = np.setdiff1d(np.arange(len(pts)), dn)
        res = 0.0
        if len(dd):
            res = np.max(np.abs(evaluate(self, pts[dd]) - spec.dirichlet(pts[dd, 0], pts[dd, 1])))
        if len(dn):
            nrm = normals(self.boundary)[dn]
            got = _normal_derivative(self, pts[dn], nrm)
            want = spec.neumann(pts[dn, 0], pts[dn, 1], nrm[:, 0], nrm[:, 1])
            res = max(res, np.max(np.abs(got - want)))
        return float(res)


def _pairwise(a, b):
    d = a[:, None, :] - b[None, :, :]
    return d, np.hypot(d[..., 0], d[..., 1])


def _factor(matrix, spec: ProblemSpec) -> LUFactors:
    try:
        return lu_factor(matrix)
    except SingularMatrixError as exc:
        raise SingularSystemError(
            exc.pivot_index,
            f"collocation matrix is singular (zero pivot {exc.pivot_index}) with "
            f"{spec.n_boundary} boundary knots; condition estimate inf. "
            "Try a different number of boundary knots or a different interior layout.",
        ) from exc


def _lam(spec: ProblemSpec) -> float:
    return spec.mode.lam if isinstance(spec.mode, Helmholtz) else 1.0


def _data_vectors(spec: ProblemSpec, bknots: list[Knot]):
    pts = positions(bknots)
    nrm = normals(bknots)
    is_neumann = np.zeros(len(bknots), dtype=bool)
    is_neumann[list(spec.neumann_knots)] = True
    data = np.empty(len(bknots))
    dd = ~is_neumann
    data[dd] = spec.dirichlet(pts[dd, 0], pts[dd, 1])
    if is_neumann.any():
        data[is_neumann] = spec.neumann(pts[is_neumann, 0], pts[is_neumann, 1], nrm[is_neumann, 0], nrm[is_neumann, 1])
    return pts, nrm, is_neumann, data


def solve_homogeneous(spec: ProblemSpec, up: drm.DrmInterpolant | None = None) -> BkmSolution:
    """Collocate v = sum beta_k J0(lam |x - x_k|) against the boundary data minus the trace of ``up``."""
    lam = _lam(spec)
    if up is not None and lam != 1.0:
        raise ValueError("particular solutions are built for lap + 1; use lam = 1")
    bknots = spec.boundary_knots()
    pts, nrm, is_neumann, data = _data_vectors(spec, bknots)

    d, r = _pairwise(pts, pts)
    g = helmholtz2d(r, lam)
    if is_neumann.any():
        gx, gy = helmholtz2d_gradient(d[is_neumann, :, 0], d[is_neumann, :, 1], lam)
        g[is_neumann] = gx * nrm[is_neumann, 0:1] + gy * nrm[is_neumann, 1:2]

    rhs = data.copy()
    if up is not None:
        dd = ~is_neumann
        rhs[dd] -= drm.eval_particular(up, pts[dd])
        if is_neumann.any():
            rhs[is_neumann] -= drm.eval_particular_normal_derivative(up, pts[is_neumann], nrm[is_neumann])

    factors = _factor(g, spec)
    beta = factors.solve(rhs)
    return BkmSolution(spec, bknots, spec.interior_knots(), beta, g, drm=up, _factors=factors)


def solve_known_rhs(spec: ProblemSpec) -> BkmSolution:
    """Fit the DRM interpolant to the known right-hand side, then solve for v."""
    if not isinstance(spec.mode, KnownRhsDRM):
        raise TypeError("solve_known_rhs needs a KnownRhsDRM problem")
    knots = spec.boundary_knots() + spec.interior_knots()
    pts = positions(knots)
    up = drm.fit(pts, spec.pair(), spec.mode.g(pts[:, 0], pts[:, 1]), poly_tail=spec.poly_tail)
    return solve_homogeneous(spec, up)


def _coupled_blocks(spec: ProblemSpec, bpts, ipts, pair):
    """Basis matrices shared by the one-shot and Picard coupled solvers."""
    l1 = spec.mode.l1
    xpts = np.vstack([bpts, ipts])
    d_xb, r_xb = _pairwise(xpts, bpts)
    j_xb = helmholtz2d(r_xb)
    jgx, jgy = helmholtz2d_gradient(d_xb[..., 0], d_xb[..., 1])
    return dict(
        xpts=xpts,
        j_xb=j_xb,
        l1_j=l1.apply(j_xb, jgx, jgy),
        forcing=drm.forcing_basis(xpts, xpts, pair),
        particular=(p := drm.particular_basis(xpts, xpts, pair)),
        l1_particular=l1.apply(p, *drm.particular_gradient_basis(xpts, xpts, pair)),
    )


def _check_coupled(spec: ProblemSpec):
    if not isinstance(spec.mode, CoupledDRM):
        raise TypeError("coupled solvers need a CoupledDRM problem")
    if spec.neumann_knots:
        raise ValueError("the coupled solver takes Dirichlet data on every boundary knot")


def _degenerate_redirect(spec: ProblemSpec) -> ProblemSpec:
    f, u = spec.mode.f, spec.dirichlet
    log.info("L1 = 0: coupling is trivial, solving as a known right-hand side on boundary knots")
    return replace(spec, mode=KnownRhsDRM(lambda x, y: f(x, y) + u(x, y)), interior=None)


def solve_coupled(spec: ProblemSpec) -> BkmSolution:
    """One linear system in (alpha, tail, beta, u_interior).

    Rows, for knots x_i (boundary first) and interior knots x_l:

    * DRM: sum_j [forcing + L1 particular]_ij alpha_j + L1 v(x_i) - [interior] u_i
      = f(x_i) + [boundary] b(x_i)
    * moment conditions on alpha
    * boundary collocation: v(x_i) + u_p(x_i) = b(x_i)
    * interior consistency: v(x_l) + u_p(x_l) - u_l = 0
    """
    _check_coupled(spec)
    if spec.mode.l1.is_zero:
        return solve_known_rhs(_degenerate_redirect(spec))

    pair = spec.pair()
    bknots, iknots = spec.boundary_knots(), spec.interior_knots()
    bpts, ipts = positions(bknots), positions(iknots)
    n, m_int = len(bpts), len(ipts)
    m = n + m_int
    blk = _coupled_blocks(spec, bpts, ipts, pair)
    xpts = blk["xpts"]
    b1 = spec.dirichlet(bpts[:, 0], bpts[:, 1])

    size = 2 * m + drm.TAIL
    ca, cb, cu = 0, m + drm.TAIL, m + drm.TAIL + n
    a = np.zeros((size, size))
    rhs = np.zeros(size)

    # DRM rows
    a[:m, ca:cb] = blk["forcing"] + blk["l1_particular"]
    a[:m, cb:cu] = blk["l1_j"]
    a[n:m, cu:] = -np.eye(m_int)
    rhs[:m] = spec.mode.f(xpts[:, 0], xpts[:, 1])
    rhs[:n] += b1
    # moment conditions
    a[m:m + drm.TAIL, :m] = np.column_stack([xpts, np.ones(m)]).T
    # boundary collocation, then interior consistency
    row = m + drm.TAIL
    a[row:, ca:cb] = blk["particular"]
    a[row:, cb:cu] = blk["j_xb"]
    a[row + n:, cu:] = -np.eye(m_int)
    rhs[row:row + n] = b1

    factors = _factor(a, spec)
    sol = factors.solve(rhs)
    up = drm.DrmInterpolant(xpts, pair, sol[ca:cb])
    return BkmSolution(
        spec, bknots, iknots, sol[cb:cu], a, drm=up, interior_values=sol[cu:], _factors=factors
    )


def solve_coupled_picard(
    spec: ProblemSpec, tol: float = 1e-8, max_iter: int = 100, relaxation: float = 1.0
) -> BkmSolution:
    """Fixed-point iteration: fit the DRM to f + u - L1 u, solve for v, update u at interior knots.

    With ``relaxation`` w < 1 every iterate (interior values and both weight
    vectors) becomes (1 - w) old + w new; the plain iteration (w = 1) diverges
    when the iteration map has eigenvalues below -1, as it does for strong
    two-directional convection.
    """
    _check_coupled(spec)
    if not 0.0 < relaxation <= 1.0:
        raise ValueError(f"relaxation must lie in (0, 1], got {relaxation}")
    pair = spec.pair()
    bknots, iknots = spec.boundary_knots(), spec.interior_knots()
    bpts, ipts = positions(bknots), positions(iknots)
    n = len(bpts)
    blk = _coupled_blocks(spec, bpts, ipts, pair)
    xpts = blk["xpts"]
    b1 = spec.dirichlet(bpts[:, 0], bpts[:, 1])
    f = spec.mode.f(xpts[:, 0], xpts[:, 1])

    interp_factors = lu_factor(drm.build_interpolation_matrix(xpts, pair))
    g_bb = blk["j_xb"][:n]
    hom_factors = _factor(g_bb, spec)

    u_int = np.zeros(len(ipts))
    beta = np.zeros(n)
    alpha = np.zeros(len(xpts) + drm.TAIL)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        l1u = blk["l1_j"] @ beta + blk["l1_particular"] @ alpha
        g = f + np.concatenate([b1, u_int]) - l1u
        new_alpha = interp_factors.solve(np.concatenate([g, np.zeros(drm.TAIL)]))
        up_vals = blk["particular"] @ new_alpha
        new_beta = hom_factors.solve(b1 - up_vals[:n])
        new = blk["j_xb"][n:] @ new_beta + up_vals[n:]
        w = relaxation
        change = w * np.max(np.abs(new - u_int), initial=0.0)
        u_int = (1 - w) * u_int + w * new
        beta = (1 - w) * beta + w * new_beta
        alpha = (1 - w) * alpha + w * new_alpha
        if change < tol:
            converged = True
            break
    if not converged:
        log.warning("Picard iteration stopped after %d iterations (last change %.3g)", it, change)
    up = drm.DrmInterpolant(xpts, pair, alpha)
    return BkmSolution(
        spec, bknots, iknots, beta, g_bb, drm=up, interior_values=u_int,
        iterations=it, converged=converged, _factors=hom_factors,
    )


def solve_response_kernel(spec: ProblemSpec) -> BkmSolution:
    """Collocate sum_k beta_k K(x_i, x_k) = b(x_i) with a response-dependent kernel K."""
    if not isinstance(spec.mode, ResponseKernel):
        raise TypeError("solve_response_kernel needs a ResponseKernel problem")
    if spec.interior is not None or spec.neumann_knots:
        raise ValueError("response-kernel problems use Dirichlet data on boundary knots only")
    bknots = spec.boundary_knots()
    pts = positions(bknots)
    a = spec.mode.kernel(pts[:, None, :], pts[None, :, :])
    factors = _factor(a, spec)
    beta = factors.solve(spec.dirichlet(pts[:, 0], pts[:, 1]))
    return BkmSolution(spec, bknots, [], beta, a, _factors=factors)


def solve(spec: ProblemSpec) -> BkmSolution:
    mode = spec.mode
    if isinstance(mode, Helmholtz):
        return solve_homogeneous(spec)
    if isinstance(mode, KnownRhsDRM):
        return solve_known_rhs(spec)
    if isinstance(mode, CoupledDRM):
        return solve_coupled(spec)
    if isinstance(mode, ResponseKernel):
        return solve_response_kernel(spec)
    raise TypeError(f"unknown operator mode {mode!r}")


def _homogeneous_values(sol: BkmSolution, pts):
    bpts = positions(sol.boundary)
    mode = sol.problem.mode
    if isinstance(mode, ResponseKernel):
        return mode.kernel(pts[:, None, :], bpts[None, :, :]) @ sol.beta
    _, r = _pairwise(pts, bpts)
    return helmholtz2d(r, _lam(sol.problem)) @ sol.beta


def _normal_derivative(sol: BkmSolution, pts, nrm):
    bpts = positions(sol.boundary)
    d, _ = _pairwise(pts, bpts)
    gx, gy = helmholtz2d_gradient(d[..., 0], d[..., 1], _lam(sol.problem))
    val = (gx * nrm[:, 0:1] + gy * nrm[:, 1:2]) @ sol.beta
    if sol.drm is not None:
        val = val + drm.eval_particular_normal_derivative(sol.drm, pts, nrm)
    return val


def evaluate(sol: BkmSolution, p):
    """u = v + u_p at one point (x, y) or an (n, 2) array of points."""
    pts = drm.as_points(p)
    val = _homogeneous_values(sol, pts)
    if sol.drm is not None:
        val = val + drm.eval_particular(sol.drm, pts)
    return float(val[0]) if np.ndim(p) == 1 else val
