import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefanpf.errors import ConfigurationError, UsageError
from stefanpf.grid import (
    BoundaryCondition,
    Field,
    GridSpec,
    apply_boundary,
    new_field,
    seed_disk,
    seed_front_1d,
)


def line(vals, dx=1.0):
    f = new_field(GridSpec(len(vals), 1, dx))
    return f.with_interior(np.asarray(vals, float)[:, None])


# -- GridSpec / new_field ---------------------------------------------------

def test_new_field_2d_zeros():
    f = new_field(GridSpec(4, 4), 0.0)
    assert f.values.shape == (6, 6)
    assert np.all(f.values == 0)


def test_new_field_1d_fill():
    f = new_field(GridSpec(3, 1), -1.0)
    assert f.values.shape == (5, 3)
    assert np.all(f.values == -1)


@pytest.mark.parametrize("kw,key", [
    (dict(nx=2, ny=4), "grid.nx"),
    (dict(nx=4, ny=2), "grid.ny"),
    (dict(nx=4, ny=1, dx=0.0), "grid.dx"),
    (dict(nx=4, ny=4, dy=-1.0), "grid.dy"),
])
def test_grid_validation_names_key(kw, key):
    with pytest.raises(ConfigurationError) as exc:
        GridSpec(**kw)
    assert exc.value.key == key


def test_cell_centres():
    spec = GridSpec(3, 4, 0.5, 2.0)
    np.testing.assert_allclose(spec.x_centers(), [0.25, 0.75, 1.25])
    np.testing.assert_allclose(spec.y_centers(), [1.0, 3.0, 5.0, 7.0])
    assert spec.lx == 1.5 and spec.ly == 8.0
    x, y = spec.mesh()
    assert x.shape == (3, 4) and x[2, 0] == 1.25 and y[0, 3] == 7.0


def test_field_shape_mismatch():
    with pytest.raises(UsageError):
        Field(GridSpec(3, 3), np.zeros((3, 3)))


# -- boundaries ---------------------------------------------------------------

def ghosts(f):
    return f.values[0, 1], f.values[-1, 1]


def test_zero_flux_1d():
    assert ghosts(apply_boundary(line([1, 2, 3]), BoundaryCondition("zero_flux"))) == (1, 3)


def test_periodic_1d():
    assert ghosts(apply_boundary(line([1, 2, 3]), BoundaryCondition("periodic"))) == (3, 1)


def test_dirichlet_1d():
    assert ghosts(apply_boundary(line([1, 2, 3]), BoundaryCondition("dirichlet", 0.0))) == (-1, -3)


def test_dirichlet_face_value():
    f = apply_boundary(line([0.3, 2, 7.5]), BoundaryCondition("dirichlet", 2.5))
    v = f.values[:, 1]
    assert 0.5 * (v[0] + v[1]) == pytest.approx(2.5)
    assert 0.5 * (v[-1] + v[-2]) == pytest.approx(2.5)


def test_1d_y_ghosts_mirror_row():
    f = apply_boundary(line([1, 2, 3]), BoundaryCondition("dirichlet", 5.0))
    np.testing.assert_array_equal(f.values[:, 0], f.values[:, 1])
    np.testing.assert_array_equal(f.values[:, 2], f.values[:, 1])


def test_per_side_mapping():
    f = line([1, 2, 3])
    out = apply_boundary(f, {"left": BoundaryCondition("dirichlet", 1.0)})
    assert ghosts(out) == (1.0, 3.0)  # right defaults to zero flux


def test_unpaired_periodic_rejected():
    with pytest.raises(UsageError):
        apply_boundary(line([1, 2, 3]), {"left": BoundaryCondition("periodic")})


def test_unknown_kind_rejected():
    with pytest.raises(ConfigurationError):
        BoundaryCondition("robin")


def test_apply_boundary_returns_copy():
    f = line([1, 2, 3])
    before = f.values.copy()
    apply_boundary(f, BoundaryCondition("dirichlet", 9.0))
    np.testing.assert_array_equal(f.values, before)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.integers(3, 8), st.integers(0, 2**31 - 1))
def test_periodic_2d_wraps(nx, ny, seed):
    rng = np.random.default_rng(seed)
    f = new_field(GridSpec(nx, ny)).with_interior(rng.normal(size=(nx, ny)))
    v = apply_boundary(f, BoundaryCondition("periodic")).values
    np.testing.assert_array_equal(v[0, 1:-1], v[-2, 1:-1])
    np.testing.assert_array_equal(v[-1, 1:-1], v[1, 1:-1])
    np.testing.assert_array_equal(v[1:-1, 0], v[1:-1, -2])
    np.testing.assert_array_equal(v[1:-1, -1], v[1:-1, 1])
    # corners wrap diagonally
    assert v[0, 0] == v[-2, -2] and v[-1, -1] == v[1, 1]


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.integers(3, 8), st.integers(0, 2**31 - 1))
def test_zero_flux_2d_copies(nx, ny, seed):
    rng = np.random.default_rng(seed)
    f = new_field(GridSpec(nx, ny)).with_interior(rng.normal(size=(nx, ny)))
    v = apply_boundary(f, BoundaryCondition()).values
    np.testing.assert_array_equal(v[0, 1:-1], v[1, 1:-1])
    np.testing.assert_array_equal(v[1:-1, -1], v[1:-1, -2])


# -- seeds --------------------------------------------------------------------

def test_seed_disk_centre_and_far_cell():
    spec = GridSpec(41, 41, 1.0, 1.0)
    f = seed_disk(new_field(spec), 20.5, 20.5, 10.0, inside=-1.0, outside=1.0)
    assert f.interior[20, 20] == -1.0
    assert f.interior[40, 20] == 1.0  # 20 cells from the centre


def test_seed_disk_midpoint_on_rim():
    spec = GridSpec(41, 41)
    f = seed_disk(new_field(spec), 20.5, 20.5, 10.0, inside=2.0, outside=0.0, smooth_width=1.5)
    assert f.interior[30, 20] == pytest.approx(1.0, abs=1e-14)


def test_seed_disk_mirror_symmetric():
    spec = GridSpec(32, 32, 0.3, 0.3)
    f = seed_disk(new_field(spec), 0.5 * spec.lx, 0.5 * spec.ly, 2.7, -1.0, 1.0, 0.7).interior
    np.testing.assert_array_equal(f, f[::-1, :])
    np.testing.assert_array_equal(f, f.T)
    np.testing.assert_array_equal(f, np.rot90(f))


def test_seed_disk_warns_on_huge_radius():
    with pytest.warns(UserWarning):
        seed_disk(new_field(GridSpec(4, 4)), 2, 2, 100.0, 0.0, 1.0)


def test_seed_disk_ghosts_zero():
    f = seed_disk(new_field(GridSpec(5, 5), 7.0), 2.5, 2.5, 1.0, 3.0, 4.0)
    assert np.all(f.values[0, :] == 0) and np.all(f.values[:, -1] == 0)


def test_seed_front_midpoint_and_tails():
    spec = GridSpec(100, 1, 0.1)
    f = seed_front_1d(new_field(spec), 5.05, -1.0, 3.0, width=0.2)
    assert f.interior[50, 0] == pytest.approx(1.0, abs=1e-14)  # x = 5.05
    assert f.interior[-1, 0] == pytest.approx(3.0)
    assert f.interior[0, 0] == pytest.approx(-1.0)


def test_seed_front_sharp_step():
    f = seed_front_1d(new_field(GridSpec(10, 1)), 4.0, 7.0, 9.0, width=0.0)
    assert np.all(f.interior[:4, 0] == 7.0) and np.all(f.interior[4:, 0] == 9.0)


def test_seed_front_on_2d_grid_is_planar():
    f = seed_front_1d(new_field(GridSpec(8, 5)), 3.0, 0.0, 1.0, 1.0).interior
    assert np.all(f == f[:, :1])
