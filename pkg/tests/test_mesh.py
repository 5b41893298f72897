"""Grids, stencils and their adjoints.

The adjoint identities are asserted at float precision via dense operator
assembly, and the reflection equivariance of the 2D stencils is asserted
bitwise: the family solver's parity pinning depends on exact equality, not
on closeness.
"""

import numpy as np
import pytest

from vexspec import StructuredGrid, cell_values, gradient, integrate, interval_grid, rectangle_grid
from vexspec.mesh import (
    apply_dirichlet,
    cell_values_adjoint,
    gradient_adjoint,
    gradient_magnitude,
    grid_from_config,
    grid_to_config,
    require_dirichlet,
)


def test_grid_basic_geometry():
    g = rectangle_grid((5, 9), (2.0, 4.0))
    assert g.dim == 2
    assert g.shape == (5, 9)
    assert g.cell_shape == (4, 8)
    assert g.n_nodes == 45 and g.n_cells == 32
    assert g.cell_volume == pytest.approx(0.5 * 0.5)
    assert g.lengths == (2.0, 4.0)
    assert g.boundary_mask.sum() == 45 - 3 * 7
    gi = interval_grid(11, 2.0)
    assert gi.dim == 1 and gi.spacing[0] == pytest.approx(0.2)
    assert np.array_equal(gi.axis_nodes(0), 0.2 * np.arange(11))


def test_grid_validation():
    with pytest.raises(ValueError, match="dimension"):
        StructuredGrid((4, 4, 4), (0.1, 0.1, 0.1))
    with pytest.raises(ValueError, match="3 nodes"):
        StructuredGrid((2,), (0.1,))
    with pytest.raises(ValueError, match="positive"):
        StructuredGrid((5,), (0.0,))
    with pytest.raises(ValueError, match="matching length"):
        StructuredGrid((5, 5), (0.1,))


def test_grid_config_round_trip():
    g = rectangle_grid((7, 5), (1.5, 2.0))
    assert grid_from_config(grid_to_config(g)) == g
    with pytest.raises(ValueError, match="disagree"):
        grid_from_config({"extents": [5, 5], "lengths": [1.0]})


def test_node_and_cell_coordinates():
    g = interval_grid(5, 1.0)
    x_cells = g.cell_midpoints()[0]
    assert np.allclose(x_cells, [0.125, 0.375, 0.625, 0.875])
    g2 = rectangle_grid((3, 4), (1.0, 3.0))
    X, Y = g2.node_coordinates()
    assert X.shape == (3, 4) and Y[0, -1] == pytest.approx(3.0)


def test_gradient_exact_for_affine_1d():
    g = interval_grid(9, 2.0)
    x = g.axis_nodes(0)
    u = 3.0 - 0.75 * x
    grad = gradient(u, g)
    assert grad.shape == (8, 1)
    assert np.allclose(grad[:, 0], -0.75, rtol=1e-14)


def test_gradient_exact_for_bilinear_2d():
    g = rectangle_grid((6, 7), (1.0, 2.0))
    X, Y = g.node_coordinates()
    u = 2.0 + X - 3.0 * Y + 5.0 * X * Y
    Xc, Yc = g.cell_midpoints()
    grad = gradient(u, g)
    assert np.allclose(grad[..., 0], 1.0 + 5.0 * Yc, rtol=1e-13)
    assert np.allclose(grad[..., 1], -3.0 + 5.0 * Xc, rtol=1e-13)


def test_cell_values_average_corners(rng):
    g = rectangle_grid((4, 5))
    u = rng.standard_normal(g.shape)
    vals = cell_values(u, g)
    i, j = 2, 1
    manual = 0.25 * (u[i, j] + u[i + 1, j] + u[i, j + 1] + u[i + 1, j + 1])
    assert vals[i, j] == pytest.approx(manual, rel=1e-15)


def _dense_operator(apply_fn, in_shape, out_shape):
    n = int(np.prod(in_shape))
    cols = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        cols.append(apply_fn(e.reshape(in_shape)).ravel())
    return np.stack(cols, axis=1).reshape((int(np.prod(out_shape)), n))


@pytest.mark.parametrize("grid", [interval_grid(7, 1.3), rectangle_grid((5, 6), (1.0, 0.7))])
def test_gradient_adjoint_is_transpose(grid):
    vec_shape = grid.cell_shape + (grid.dim,)
    A = _dense_operator(lambda u: gradient(u, grid), grid.shape, vec_shape)
    At = _dense_operator(lambda a: gradient_adjoint(a.reshape(vec_shape), grid), vec_shape, grid.shape)
    assert np.allclose(At, A.T, rtol=0, atol=1e-14)


@pytest.mark.parametrize("grid", [interval_grid(7, 1.3), rectangle_grid((5, 6), (1.0, 0.7))])
def test_cell_values_adjoint_is_transpose(grid):
    B = _dense_operator(lambda u: cell_values(u, grid), grid.shape, grid.cell_shape)
    Bt = _dense_operator(lambda b: cell_values_adjoint(b, grid), grid.cell_shape, grid.shape)
    assert np.allclose(Bt, B.T, rtol=0, atol=1e-15)


def test_adjoint_pairing_identity(rng):
    grid = rectangle_grid((9, 8), (2.0, 1.0))
    u = rng.standard_normal(grid.shape)
    a = rng.standard_normal(grid.cell_shape + (2,))
    b = rng.standard_normal(grid.cell_shape)
    lhs = float(np.sum(gradient(u, grid) * a))
    rhs = float(np.sum(u * gradient_adjoint(a, grid)))
    assert lhs == pytest.approx(rhs, rel=1e-13)
    lhs = float(np.sum(cell_values(u, grid) * b))
    rhs = float(np.sum(u * cell_values_adjoint(b, grid)))
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_stencils_commute_with_reflections_bitwise(rng):
    """Reflection equivariance must be exact in floating point.

    Descent iterates keep their symmetry class only if every operator maps
    mirrored inputs to mirrored outputs with zero rounding discrepancy.
    """
    grid = rectangle_grid((8, 9), (1.7, 2.3))
    u = rng.standard_normal(grid.shape)
    g = gradient(u, grid)
    gr = gradient(u[::-1, :], grid)
    assert np.array_equal(gr[..., 0], -g[::-1, :, 0])
    assert np.array_equal(gr[..., 1], g[::-1, :, 1])
    gr = gradient(u[:, ::-1], grid)
    assert np.array_equal(gr[..., 0], g[:, ::-1, 0])
    assert np.array_equal(gr[..., 1], -g[:, ::-1, 1])

    assert np.array_equal(cell_values(u[::-1, :], grid), cell_values(u, grid)[::-1, :])
    assert np.array_equal(cell_values(u[:, ::-1], grid), cell_values(u, grid)[:, ::-1])

    a = rng.standard_normal(grid.cell_shape + (2,))
    ar = np.stack([-a[::-1, :, 0], a[::-1, :, 1]], axis=-1)
    assert np.array_equal(gradient_adjoint(ar, grid), gradient_adjoint(a, grid)[::-1, :])
    b = rng.standard_normal(grid.cell_shape)
    assert np.array_equal(cell_values_adjoint(b[:, ::-1], grid), cell_values_adjoint(b, grid)[:, ::-1])


def test_gradient_magnitude(rng):
    g = rng.standard_normal((6, 7, 2))
    gm = gradient_magnitude(g)
    assert np.allclose(gm, np.sqrt(g[..., 0] ** 2 + g[..., 1] ** 2), rtol=1e-15)


def test_integrate_constant_field():
    g = rectangle_grid((5, 5), (2.0, 3.0))
    assert integrate(np.ones(g.cell_shape), g) == pytest.approx(6.0, rel=1e-14)
    with pytest.raises(ValueError, match="shape"):
        integrate(np.ones((3, 3)), g)


def test_dirichlet_masking(rng):
    g = rectangle_grid((5, 6))
    u = rng.standard_normal(g.shape)
    masked = apply_dirichlet(u, g)
    assert np.all(masked[g.boundary_mask] == 0.0)
    assert np.array_equal(masked[1:-1, 1:-1], u[1:-1, 1:-1])
    with pytest.raises(ValueError, match="vanish"):
        require_dirichlet(u, g)
    assert np.array_equal(require_dirichlet(masked, g), masked)
    with pytest.raises(ValueError, match="finite"):
        apply_dirichlet(np.full(g.shape, np.nan), g)
    with pytest.raises(ValueError, match="match"):
        apply_dirichlet(np.zeros((4, 4)), g)


def test_shape_checks_on_stencil_inputs():
    g = rectangle_grid((4, 4))
    with pytest.raises(ValueError, match="wrong shape"):
        gradient_adjoint(np.zeros((3, 3)), g)
    with pytest.raises(ValueError, match="wrong shape"):
        cell_values_adjoint(np.zeros((2, 3)), g)
