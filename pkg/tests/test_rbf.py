import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkm.rbf import alt_rbf_pairs, cubic_pair, mq_forcing, mq_pair, mq_particular, mq_particular_gradient, tps_pair

GRID = np.linspace(0.01, 5.0, 100)


def radial_operator_fd(f, r, h=1e-4):
    """f'' + f'/r + f by central differences (the 2D radial form of lap + 1)."""
    d1 = (f(r + h) - f(r - h)) / (2 * h)
    d2 = (f(r + h) - 2 * f(r) + f(r - h)) / h**2
    return d2 + d1 / r + f(r)


def cartesian_operator_fd(f, x, y, h=1e-3):
    """5-point Laplacian plus identity of the radial function f(|(x, y)|)."""
    g = lambda px, py: f(np.hypot(px, py))
    lap = (g(x + h, y) + g(x - h, y) + g(x, y + h) + g(x, y - h) - 4 * g(x, y)) / h**2
    return lap + g(x, y)


def test_mq_particular_values():
    assert mq_particular(0.0, 2.0) == 8.0
    assert mq_particular(3.0, 4.0) == pytest.approx(125.0, rel=1e-15)
    assert mq_particular(1.0, 1.0) == pytest.approx(2.0**1.5, rel=1e-15)


def test_mq_forcing_values():
    assert mq_forcing(0.0, 2.0) == pytest.approx(20.0, rel=1e-15)
    assert mq_forcing(3.0, 4.0) == pytest.approx(160.4, rel=1e-14)
    assert mq_forcing(0.0, 1.0) == pytest.approx(7.0, rel=1e-15)


@pytest.mark.parametrize("r", [0.1, 1.0, 2.0])
def test_mq_forcing_small_examples(r):
    f = lambda s: mq_particular(s, 1.0)
    assert abs(mq_forcing(r, 1.0) - radial_operator_fd(f, r)) <= 1e-6


@pytest.mark.parametrize("c", [1.0, 4.0, 25.0])
def test_mq_operator_consistency_on_grid(c):
    f = lambda s: mq_particular(s, c)
    phi = mq_forcing(GRID, c)
    fd = radial_operator_fd(f, GRID)
    assert np.max(np.abs(phi - fd)) <= 1e-6 * (1 + np.max(np.abs(phi)))
    assert np.all(np.abs(phi - fd) <= 1e-6 * (1 + np.abs(phi)))


@pytest.mark.parametrize("c", [1.0, 4.0, 25.0])
def test_mq_forcing_matches_cartesian_laplacian(c):
    rng = np.random.default_rng(1)
    x, y = rng.uniform(-3, 3, 20), rng.uniform(-3, 3, 20)
    f = lambda s: mq_particular(s, c)
    phi = mq_forcing(np.hypot(x, y), c)
    assert np.all(np.abs(cartesian_operator_fd(f, x, y) - phi) <= 1e-6 * (1 + np.abs(phi)))


def test_printed_alternative_first_term_is_inconsistent():
    # 6 (r^2 + c^2) instead of 6 sqrt(r^2 + c^2) breaks the operator identity
    r, c = 1.0, 4.0
    s = math.hypot(r, c)
    wrong = 6 * s * s + 3 * r * r / s + s**3
    assert abs(wrong - radial_operator_fd(lambda t: mq_particular(t, c), r)) > 1.0


def test_mq_gradient():
    assert mq_particular_gradient(0.0, 0.0, 3.0) == (0.0, 0.0)
    gx, gy = mq_particular_gradient(1.0, 0.0, 1.0)
    assert gx == pytest.approx(3 * math.sqrt(2), rel=1e-15) and gy == 0.0


@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0.5, 25))
@settings(max_examples=100, deadline=None)
def test_mq_gradient_matches_fd_and_is_odd(dx, dy, c):
    h = 1e-5
    f = lambda px, py: mq_particular(math.hypot(px, py), c)
    gx, gy = mq_particular_gradient(dx, dy, c)
    scale = 1 + abs(f(dx, dy))
    assert abs(gx - (f(dx + h, dy) - f(dx - h, dy)) / (2 * h)) <= 1e-7 * scale
    assert abs(gy - (f(dx, dy + h) - f(dx, dy - h)) / (2 * h)) <= 1e-7 * scale
    nx, ny = mq_particular_gradient(-dx, -dy, c)
    assert (nx, ny) == (-gx, -gy)


@pytest.mark.parametrize("bad", [-1e-9, -1.0])
def test_negative_radius_rejected(bad):
    with pytest.raises(ValueError):
        mq_particular(bad, 1.0)
    with pytest.raises(ValueError):
        mq_forcing(bad, 1.0)


@pytest.mark.parametrize("c", [0.0, -1.0])
def test_shape_must_be_positive(c):
    with pytest.raises(ValueError):
        mq_particular(1.0, c)
    with pytest.raises(ValueError):
        mq_pair(c)


def test_alternative_pair_values():
    assert cubic_pair().forcing(2.0) == pytest.approx(26.0)
    assert tps_pair().particular(1.0) == 0.0
    assert set(alt_rbf_pairs()) == {"linear", "tps"}


ALL_PAIRS = [mq_pair(1.0), mq_pair(4.0), mq_pair(25.0), cubic_pair(), tps_pair()]


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: f"{p.name}-{p.shape}")
def test_every_pair_is_operator_consistent(pair):
    phi = pair.forcing(GRID)
    fd = radial_operator_fd(pair.particular, GRID)
    assert np.all(np.abs(phi - fd) <= 1e-6 * (1 + np.abs(phi)))


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: f"{p.name}-{p.shape}")
def test_every_pair_derivatives_consistent(pair):
    h = 1e-4
    fd = (pair.particular(GRID + h) - pair.particular(GRID - h)) / (2 * h)
    # difference roundoff grows with the size of the function itself
    assert np.all(np.abs(pair.particular_derivative(GRID) - fd) <= 1e-7 * (1 + np.abs(pair.particular(GRID))))
    assert np.allclose(pair.gradient_factor(GRID) * GRID, pair.particular_derivative(GRID), rtol=1e-12)


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=lambda p: f"{p.name}-{p.shape}")
def test_every_pair_finite_and_continuous_at_zero(pair):
    for fn in (pair.particular, pair.forcing, pair.gradient_factor):
        at0 = float(fn(np.array(0.0)))
        assert math.isfinite(at0)
        assert abs(float(fn(np.array(1e-8))) - at0) < 1e-5
    gx, gy = pair.particular_gradient(0.0, 0.0)
    assert gx == 0.0 and gy == 0.0
