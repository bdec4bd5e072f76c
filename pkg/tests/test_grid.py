import numpy as np
import pytest

from ymheat.fields import random_smooth
from ymheat.grid import (
    COMPONENT_AXES,
    DIRICHLET,
    MARINI,
    NEUMANN,
    BoundarySpec,
    GridSpec,
    KForm,
    apply_boundary,
)


def test_spacing_and_volume():
    g = GridSpec((2.0, 1.0, 0.5), (9, 17, 11))
    assert g.spacing == (0.25, 0.0625, 0.05)
    assert g.volume == 1.0
    assert g.padded_shape == (11, 19, 13)


def test_rejects_tiny_grids():
    with pytest.raises(ValueError):
        GridSpec((1.0, 1.0, 1.0), (4, 16, 16))


def test_axis_coords_hit_both_faces():
    g = GridSpec((3.0, 1.0, 1.0), (13, 9, 9))
    x = g.axis_coords(0)
    assert x[0] == 0.0 and x[-1] == 3.0
    xg = g.axis_coords(0, ghosts=True)
    assert len(xg) == 15 and np.isclose(xg[0], -g.spacing[0])


def test_trapezoid_weights_integrate_constants():
    g = GridSpec((2.0, 3.0, 0.5), (9, 9, 9))
    assert np.isclose(g.trapezoid_weights().sum(), g.volume, rtol=1e-14)


def test_unknown_boundary_kind():
    with pytest.raises(ValueError):
        BoundarySpec("periodic")


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_parity_tables(degree):
    for bc in (NEUMANN, DIRICHLET, MARINI):
        for axes in COMPONENT_AXES[degree]:
            for a in range(3):
                p = bc.parity(degree, axes, a)
                assert p in (-1, 1)
                normal = a in axes
                if bc is NEUMANN:
                    assert p == (-1 if normal else 1)
                elif bc is DIRICHLET:
                    assert p == (1 if normal else -1)
                elif degree == 1:
                    assert p == 1


def test_kform_shape_and_arithmetic(unit_grid, su2_alg, rng):
    a = KForm(1, unit_grid, su2_alg)
    assert a.values.shape == (3,) + unit_grid.padded_shape + (3,)
    a.values[:] = rng.standard_normal(a.values.shape)
    b = 2.0 * a + a * (-1.0)
    assert np.allclose(b.values, a.values)
    assert np.allclose((-a + a).values, 0.0)


def test_kform_incompatible_grids(su2_alg):
    a = KForm(1, GridSpec((1, 1, 1), (8, 8, 8)), su2_alg)
    b = KForm(1, GridSpec((1, 1, 1), (9, 9, 9)), su2_alg)
    with pytest.raises(ValueError):
        a + b


def test_apply_boundary_zeroes_odd_faces(unit_grid, su2_alg, rng):
    a = KForm(1, unit_grid, su2_alg)
    a.values[:] = rng.standard_normal(a.values.shape)
    an = apply_boundary(a, NEUMANN)
    # normal component of a 1-form vanishes on the matching faces
    assert np.max(np.abs(an.values[0, 1, 1:-1, 1:-1, :])) == 0.0
    assert np.max(np.abs(an.values[0, -2, 1:-1, 1:-1, :])) == 0.0
    assert np.max(np.abs(an.values[2, 1:-1, 1:-1, -2, :])) == 0.0
    # tangential components keep their face values
    assert np.max(np.abs(an.values[1, 1, 1:-1, 1:-1, :])) > 0.0


def test_apply_boundary_mirror_parity(unit_grid, su2_alg, rng):
    a = KForm(1, unit_grid, su2_alg)
    a.values[:] = rng.standard_normal(a.values.shape)
    an = apply_boundary(a, NEUMANN)
    # odd: ghost = -mirror; even: ghost = +mirror
    assert np.allclose(
        an.values[0, 0, 1:-1, 1:-1], -an.values[0, 2, 1:-1, 1:-1]
    )
    assert np.allclose(
        an.values[1, 0, 1:-1, 1:-1], an.values[1, 2, 1:-1, 1:-1]
    )


def test_apply_boundary_idempotent(unit_grid, su2_alg, rng):
    a = KForm(2, unit_grid, su2_alg)
    a.values[:] = rng.standard_normal(a.values.shape)
    once = apply_boundary(a, DIRICHLET)
    twice = apply_boundary(once, DIRICHLET)
    assert np.array_equal(once.values, twice.values)


def test_apply_boundary_preserves_interior(unit_grid, su2_alg, rng):
    a = KForm(1, unit_grid, su2_alg)
    a.values[:] = rng.standard_normal(a.values.shape)
    an = apply_boundary(a, MARINI)
    # Marini leaves every degree-1 face value intact (even parity)
    assert np.array_equal(
        an.values[:, 2:-2, 2:-2, 2:-2], a.values[:, 2:-2, 2:-2, 2:-2]
    )
    assert np.array_equal(
        an.values[0, 1, 1:-1, 1:-1], a.values[0, 1, 1:-1, 1:-1]
    )


def test_norms_on_constant_field(unit_grid, u1_alg):
    a = KForm(0, unit_grid, u1_alg)
    a.values[..., 0] = 3.0
    assert np.isclose(a.norm("Linf"), 3.0)
    assert np.isclose(a.norm("L2"), 3.0)  # unit volume
    af = apply_boundary(a, NEUMANN)
    assert np.isclose(af.norm("W1"), 3.0, atol=1e-12)


def test_w1_needs_ghosts(unit_grid, u1_alg):
    a = KForm(0, unit_grid, u1_alg)
    with pytest.raises(ValueError):
        a.norm("W1")


def test_l2_scales_with_volume():
    g = GridSpec((2.0, 2.0, 2.0), (12, 12, 12))
    a = random_smooth(g, seed=5, amplitude=0.3)
    b = KForm(1, g, a.algebra, 2.0 * a.values)
    assert np.isclose(b.norm("L2"), 2.0 * a.norm("L2"), rtol=1e-13)
