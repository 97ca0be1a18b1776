import numpy as np
import pytest

from bkm import drm
from bkm.bench_cases import get_case
from bkm.geometry import EllipseDomain, InteriorLayout, positions
from bkm.kernels import SingularParameterError, helmholtz2d_gradient
from bkm.linalg import is_symmetric
from bkm.rbf import mq_pair
from bkm.solver import (
    CoupledDRM,
    FirstOrderOperator,
    Helmholtz,
    KnownRhsDRM,
    ProblemSpec,
    ResponseKernel,
    SingularSystemError,
    solve,
    solve_coupled,
    solve_coupled_picard,
    solve_homogeneous,
    solve_known_rhs,
    solve_response_kernel,
)

DOMAIN = EllipseDomain()
TABLE1 = np.array([(1.5, 0.0), (1.2, -0.35), (0.6, -0.45), (0.0, 0.0), (0.9, 0.0), (0.3, 0.0), (0.0, 0.0)])
sin_x = lambda x, y: np.sin(x) + 0.0 * y
zero = lambda x, y: 0.0 * x


def helmholtz_spec(n, **kw):
    return ProblemSpec(DOMAIN, Helmholtz(1.0), sin_x, n, **kw)


def laplace_spec(n=5, dirichlet=lambda x, y: x + y, c=25.0):
    return ProblemSpec(DOMAIN, KnownRhsDRM(dirichlet), dirichlet, n, shape=c)


def lap_fd(sol, p, h=1e-3):
    x, y = p
    s = sol.evaluate(np.array([(x + h, y), (x - h, y), (x, y + h), (x, y - h), (x, y)]))
    return (s[:4].sum() - 4 * s[4]) / h**2


# -- Helmholtz, boundary only ---------------------------------------------------

def test_helmholtz_table_points():
    sol = solve(helmholtz_spec(11))
    assert sol.evaluate((1.5, 0.0)) == pytest.approx(0.997, abs=2e-3)
    assert sol.evaluate((0.0, 0.0)) == pytest.approx(0.0, abs=2e-3)
    assert sol.evaluate((0.6, -0.45)) == pytest.approx(0.565, abs=2e-3)


def test_zero_data_gives_zero_solution():
    sol = solve(ProblemSpec(DOMAIN, Helmholtz(), zero, 9))
    assert np.all(sol.beta == 0.0)
    assert np.all(sol.evaluate(TABLE1) == 0.0)


@pytest.mark.parametrize("n", [7, 11, 20])
def test_dirichlet_matrix_symmetric(n):
    assert is_symmetric(solve(helmholtz_spec(n)).system_matrix, 1e-12)


def test_error_does_not_grow_from_7_to_11_knots():
    errs = [np.max(np.abs(solve(helmholtz_spec(n)).evaluate(TABLE1) - np.sin(TABLE1[:, 0]))) for n in (7, 11)]
    assert errs[1] <= errs[0]


def test_other_wavenumbers():
    lam = 1.7
    exact = lambda x, y: np.cos(lam * 0.6 * x) * np.cos(lam * 0.8 * y)
    sol = solve(ProblemSpec(DOMAIN, Helmholtz(lam), exact, 16))
    assert np.max(np.abs(sol.evaluate(TABLE1) - exact(TABLE1[:, 0], TABLE1[:, 1]))) < 1e-3


def test_mixed_boundary_conditions():
    neumann = lambda x, y, nx, ny: np.cos(x) * nx
    spec = helmholtz_spec(12, neumann=neumann, neumann_knots=frozenset(range(1, 12, 2)))
    sol = solve(spec)
    assert np.max(np.abs(sol.evaluate(TABLE1) - np.sin(TABLE1[:, 0]))) <= 5e-2
    assert sol.boundary_residual() <= 1e-7 * 2
    assert not is_symmetric(sol.system_matrix, 1e-12)


def test_boundary_residual_at_knots():
    sol = solve(helmholtz_spec(11))
    pts = positions(sol.boundary)
    np.testing.assert_allclose(sol.evaluate(pts), np.sin(pts[:, 0]), atol=1e-7)
    assert sol.boundary_residual() <= 1e-7 * 2


def test_particular_part_needs_unit_wavenumber():
    up = drm.fit([(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (-0.5, -0.2)], mq_pair(1.0), np.ones(4))
    with pytest.raises(ValueError):
        solve_homogeneous(ProblemSpec(DOMAIN, Helmholtz(2.0), sin_x, 7), up)


def test_spec_validation():
    with pytest.raises(ValueError):
        helmholtz_spec(2)
    with pytest.raises(ValueError):
        helmholtz_spec(7, neumann_knots=frozenset({1}))
    with pytest.raises(ValueError):
        helmholtz_spec(7, neumann=lambda *a: 0.0, neumann_knots=frozenset({7}))
    with pytest.raises(ValueError):
        FirstOrderOperator(dx=np.nan)


def test_singular_system_reports_knot_count():
    flat = ResponseKernel(kernel=lambda a, b: np.ones(np.broadcast_shapes(a.shape, b.shape)[:-1]), name="flat")
    with pytest.raises(SingularSystemError) as info:
        solve(ProblemSpec(EllipseDomain(2, 1, (3, 0)), flat, sin_x, 6))
    assert "6 boundary knots" in str(info.value)
    assert "condition estimate" in str(info.value)
    assert isinstance(info.value, ArithmeticError)


# -- known right-hand side --------------------------------------------------------

def test_laplace_table_values():
    sol = solve(laplace_spec())
    assert sol.evaluate((0.6, -0.45)) == pytest.approx(0.150, abs=5e-4)
    assert sol.evaluate((1.5, 0.0)) == pytest.approx(1.500, abs=5e-4)


def test_laplace_field_is_harmonic():
    sol = solve(laplace_spec())
    for p in [(0.3, 0.1), (-0.7, 0.2), (1.0, -0.3), (0.0, 0.0)]:
        assert abs(lap_fd(sol, p)) <= 1e-3


def test_known_rhs_zero_data():
    sol = solve(laplace_spec(7, dirichlet=zero))
    assert np.max(np.abs(sol.evaluate(TABLE1))) == 0.0


def test_known_rhs_satisfies_boundary_data():
    sol = solve_known_rhs(laplace_spec(9, dirichlet=lambda x, y: np.exp(x) * np.cos(y), c=3.0))
    assert sol.boundary_residual() <= 1e-7 * (1 + np.e**2)


# -- coupled ------------------------------------------------------------------------

def convection_spec(name):
    return get_case(name).spec()


def test_convection_x_at_left_vertex():
    sol = solve(convection_spec("convection-x"))
    assert sol.evaluate((-1.5, 0.0)) == pytest.approx(4.482, abs=1e-2)


def test_convection_xy_at_lower_point():
    sol = solve(convection_spec("convection-xy"))
    assert sol.evaluate((0.0, -0.45)) == pytest.approx(2.568, abs=2e-2)


@pytest.mark.parametrize("name", ["convection-x", "convection-xy"])
def test_coupled_system_shape_and_block_residuals(name):
    spec = convection_spec(name)
    sol = solve_coupled(spec)
    n, m_int = len(sol.boundary), len(sol.interior)
    m = n + m_int
    assert sol.system_matrix.shape == (2 * m + 3, 2 * m + 3)

    data_scale = 1 + np.max(np.abs(spec.dirichlet(*positions(sol.boundary).T)))
    # boundary collocation (E3)
    assert sol.boundary_residual() <= 1e-7 * data_scale
    # interior consistency (E4)
    ipts = positions(sol.interior)
    assert np.max(np.abs(sol.evaluate(ipts) - sol.interior_values)) <= 1e-9 * data_scale
    # moment conditions (E2)
    w, c = sol.drm.weights, sol.drm.centers
    assert np.max(np.abs([w.sum(), w @ c[:, 0], w @ c[:, 1]])) <= 1e-9 * np.max(np.abs(sol.drm.alpha))
    # DRM rows (E1): interpolant = f + u - L1 u at every knot
    xpts = sol.drm.centers
    l1 = spec.mode.l1
    u = np.concatenate([spec.dirichlet(*positions(sol.boundary).T), sol.interior_values])
    bpts = positions(sol.boundary)
    d = xpts[:, None, :] - bpts[None, :, :]
    jx, jy = helmholtz2d_gradient(d[..., 0], d[..., 1])
    px, py = drm.eval_particular_gradient(sol.drm, xpts)
    ux, uy = jx @ sol.beta + px, jy @ sol.beta + py
    want = spec.mode.f(*xpts.T) + u - l1.apply(u, ux, uy)
    got = drm.eval_forcing(sol.drm, xpts)
    magnitude = np.abs(drm.forcing_basis(xpts, xpts, sol.drm.rbf)) @ np.abs(sol.drm.alpha)
    assert np.all(np.abs(got - want) <= 1e-7 * data_scale + 1e-13 * magnitude)


def test_coupled_matches_picard_on_convection_x():
    spec = convection_spec("convection-x")
    one_shot, picard = solve_coupled(spec), solve_coupled_picard(spec)
    assert picard.converged
    pts = np.array(get_case("convection-x").points)
    assert np.max(np.abs(one_shot.evaluate(pts) - picard.evaluate(pts))) <= 1e-5


def test_coupled_matches_relaxed_picard_on_convection_xy():
    spec = convection_spec("convection-xy")
    plain = solve_coupled_picard(spec, max_iter=30)
    assert not plain.converged
    relaxed = solve_coupled_picard(spec, relaxation=0.5)
    assert relaxed.converged
    pts = np.array(get_case("convection-xy").points)
    assert np.max(np.abs(solve_coupled(spec).evaluate(pts) - relaxed.evaluate(pts))) <= 1e-5


def test_relaxation_range():
    with pytest.raises(ValueError):
        solve_coupled_picard(convection_spec("convection-x"), relaxation=0.0)


def test_degenerate_coupling_redirects_to_known_rhs():
    layout = InteriorLayout.ring(0.5, 4)
    coupled = ProblemSpec(DOMAIN, CoupledDRM(FirstOrderOperator()), sin_x, 9, interior=layout, shape=3.0)
    direct = ProblemSpec(DOMAIN, KnownRhsDRM(sin_x), sin_x, 9, shape=3.0)
    a, b = solve(coupled), solve(direct)
    np.testing.assert_array_equal(a.beta, b.beta)
    np.testing.assert_array_equal(a.evaluate(TABLE1), b.evaluate(TABLE1))


def test_coupled_with_identity_and_forcing():
    # lap u + 0.5 u_x - 0.2 u = f with u = x^2 + y
    exact = lambda x, y: x * x + y
    f = lambda x, y: 2.0 + 0.5 * 2 * x - 0.2 * (x * x + y)
    spec = ProblemSpec(
        DOMAIN, CoupledDRM(FirstOrderOperator(dx=0.5, identity=-0.2), f), exact, 16,
        interior=InteriorLayout.ring(0.4, 5) + InteriorLayout.ring(0.75, 8, 0.5), shape=2.0,
    )
    sol = solve(spec)
    assert np.max(np.abs(sol.evaluate(TABLE1) - exact(*TABLE1.T))) < 5e-3


def test_coupled_rejects_neumann_data():
    spec = ProblemSpec(
        DOMAIN, CoupledDRM(FirstOrderOperator(dx=1.0)), sin_x, 7,
        neumann=lambda *a: 0.0 * a[0], neumann_knots=frozenset({0}),
    )
    with pytest.raises(ValueError):
        solve(spec)


# -- response-dependent kernel ----------------------------------------------------

def varying_spec(n=15, domain=EllipseDomain(2.0, 1.0, (3.0, 0.0))):
    return ProblemSpec(domain, ResponseKernel(), lambda x, y: -2.0 / x + 0.0 * y, n)


def test_varying_kernel_table_points():
    sol = solve(varying_spec())
    for x in (4.5, 3.9):
        assert abs(sol.evaluate((x, 0.0)) + 2 / x) / (2 / x) <= 1e-2
    assert sol.boundary_residual() <= 1e-7


def test_varying_kernel_matrix_is_not_symmetric():
    assert not is_symmetric(solve(varying_spec()).system_matrix, 1e-6)


def test_varying_kernel_knot_on_axis():
    with pytest.raises(SingularParameterError):
        solve_response_kernel(ProblemSpec(DOMAIN, ResponseKernel(), sin_x, 4))


def test_varying_kernel_evaluation_on_axis():
    sol = solve(varying_spec(domain=EllipseDomain(2.0, 1.0, (1.5, 0.0)), n=9))
    with pytest.raises(SingularParameterError):
        sol.evaluate((0.0, 0.0))


def test_varying_kernel_rejects_interior_knots():
    spec = ProblemSpec(EllipseDomain(2.0, 1.0, (3.0, 0.0)), ResponseKernel(), sin_x, 9, interior=InteriorLayout.ring(0.5, 3))
    with pytest.raises(ValueError):
        solve(spec)


def test_solution_is_deterministic():
    a, b = solve(convection_spec("convection-x")), solve(convection_spec("convection-x"))
    np.testing.assert_array_equal(a.evaluate(TABLE1), b.evaluate(TABLE1))
