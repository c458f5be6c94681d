import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefanpf.errors import UsageError
from stefanpf.grid import BoundaryCondition, GridSpec, apply_boundary, new_field, seed_disk, seed_front_1d
from stefanpf.stencils import (
    cfl_max_dt,
    curvature,
    euler_step,
    grad_magnitude,
    laplacian_5pt,
    second_derivative,
)


def sampled(spec, fn):
    """Field with fn evaluated on interior and ghost centres alike."""
    x = (np.arange(spec.nx + 2) - 0.5) * spec.dx
    y = (np.arange(spec.ny + 2) - 0.5) * spec.dy
    X, Y = np.meshgrid(x, y, indexing="ij")
    f = new_field(spec)
    f.values[:] = fn(X, Y)
    return f


def test_laplacian_constant():
    f = apply_boundary(new_field(GridSpec(6, 5), 3.3), BoundaryCondition())
    assert np.all(laplacian_5pt(f).interior == 0)


def test_laplacian_paraboloid():
    f = sampled(GridSpec(7, 7, 0.5, 0.5), lambda x, y: x ** 2 + y ** 2)
    np.testing.assert_allclose(laplacian_5pt(f).interior, 4.0, rtol=1e-12)


def test_laplacian_spike():
    f = new_field(GridSpec(5, 5))
    f.values[3, 3] = 1.0
    lap = laplacian_5pt(f).values
    assert lap[3, 3] == -4
    assert lap[2, 3] == lap[4, 3] == lap[3, 2] == lap[3, 4] == 1
    assert np.abs(lap).sum() == 8


def test_laplacian_output_ghosts_zero():
    f = sampled(GridSpec(5, 5), lambda x, y: x * y + x ** 2)
    out = laplacian_5pt(f).values
    assert np.all(out[0] == 0) and np.all(out[:, -1] == 0)


def test_second_derivative_ramp_and_parabola():
    spec = GridSpec(6, 4, 0.37, 0.2)
    assert np.allclose(second_derivative(sampled(spec, lambda x, y: 3 * x), "x").interior, 0, atol=1e-12)
    np.testing.assert_allclose(second_derivative(sampled(spec, lambda x, y: x ** 2), "x").interior, 2.0, rtol=1e-10)


def test_laplacian_is_sum_of_second_derivatives():
    rng = np.random.default_rng(3)
    f = new_field(GridSpec(6, 7, 0.3, 0.4))
    f.values[:] = rng.normal(size=f.values.shape)
    lap = laplacian_5pt(f).interior
    parts = second_derivative(f, "x").interior + second_derivative(f, "y").interior
    np.testing.assert_array_equal(lap, parts)


def test_second_derivative_axis_errors():
    with pytest.raises(UsageError):
        second_derivative(new_field(GridSpec(5, 1)), "y")
    with pytest.raises(UsageError):
        second_derivative(new_field(GridSpec(5, 5)), "z")


def test_laplacian_1d_drops_y():
    f = sampled(GridSpec(6, 1, 0.5), lambda x, y: x ** 2 + 100 * y ** 2)
    np.testing.assert_allclose(laplacian_5pt(f).interior, 2.0, rtol=1e-12)


@pytest.mark.parametrize("fn,expected", [
    (lambda x, y: 0 * x + 2.0, 0.0),
    (lambda x, y: x, 1.0),
    (lambda x, y: 3 * x + 4 * y, 5.0),
])
def test_grad_magnitude_linears(fn, expected):
    f = sampled(GridSpec(5, 5), fn)
    np.testing.assert_allclose(grad_magnitude(f).interior, expected, atol=1e-12)


def test_curvature_constant_is_zero():
    f = apply_boundary(new_field(GridSpec(6, 6), 1.0), BoundaryCondition())
    assert np.all(curvature(f).interior == 0)


def test_curvature_planar_front():
    spec = GridSpec(40, 6, 0.25, 0.25)
    f = apply_boundary(seed_front_1d(new_field(spec), 5.0, -1, 1, 1.0), BoundaryCondition())
    assert np.all(curvature(f, 1e-8).interior == 0)


def test_curvature_1d_zero_and_bad_eps():
    f = sampled(GridSpec(8, 1), lambda x, y: x ** 2)
    assert np.all(curvature(f).interior == 0)
    with pytest.raises(UsageError):
        curvature(f, 0.0)


@pytest.mark.parametrize("dx", [0.5, 0.25])
def test_curvature_of_disk_is_inverse_radius(dx):
    # dx <= R/20 with R = 10
    R = 10.0
    n = int(round(32.0 / dx))
    spec = GridSpec(n, n, dx, dx)
    c = 0.5 * spec.lx
    f = apply_boundary(seed_disk(new_field(spec), c, c, R, -1.0, 1.0, 2.0), BoundaryCondition())
    kappa = curvature(f).interior
    X, Y = spec.mesh()
    r = np.hypot(X - c, Y - c)
    band = np.abs(r - R) < 0.5 * dx  # cells straddling the mid-level contour
    assert band.sum() > 20
    assert np.all(np.abs(kappa[band] * r[band] - 1.0) < 0.05)
    assert np.all(np.abs(kappa[band] * R - 1.0) < 0.1)


def test_euler_step_examples():
    spec = GridSpec(4, 4)
    phi = new_field(spec, 0.7)
    assert np.all(euler_step(phi, np.zeros((4, 4)), 0.3).interior == 0.7)
    out = euler_step(new_field(spec), new_field(spec, 1.0), 0.1)
    np.testing.assert_allclose(out.interior, 0.1)
    rhs = np.full((4, 4), 2.5)
    two = euler_step(euler_step(phi, rhs, 0.05), rhs, 0.05)
    np.testing.assert_allclose(two.interior, euler_step(phi, rhs, 0.1).interior, rtol=1e-15)
    with pytest.raises(UsageError):
        euler_step(phi, rhs, 0.0)


def test_cfl_examples():
    assert cfl_max_dt(1.0, GridSpec(5, 5)) == pytest.approx(0.225)
    assert cfl_max_dt(1.0, GridSpec(5, 1)) == pytest.approx(0.45)
    assert cfl_max_dt(2.0, GridSpec(5, 5)) == pytest.approx(0.1125)
    with pytest.raises(UsageError):
        cfl_max_dt(0.0, GridSpec(5, 5))


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 12), st.integers(0, 2**31 - 1))
def test_operators_commute_with_rotation(n, seed):
    rng = np.random.default_rng(seed)
    spec = GridSpec(n, n, 0.7, 0.7)
    f = new_field(spec)
    f.values[:] = rng.normal(size=f.values.shape)
    g = new_field(spec)
    g.values[:] = np.rot90(f.values)
    for op in (laplacian_5pt, grad_magnitude, curvature):
        np.testing.assert_array_equal(op(g).interior, np.rot90(op(f).interior))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 10), st.integers(3, 10), st.integers(0, 2**31 - 1))
def test_laplacian_sums_to_zero_under_periodic(nx, ny, seed):
    rng = np.random.default_rng(seed)
    f = new_field(GridSpec(nx, ny)).with_interior(rng.normal(size=(nx, ny)))
    f = apply_boundary(f, BoundaryCondition("periodic"))
    assert abs(laplacian_5pt(f).interior.sum()) < 1e-10
