import numpy as np
import pytest

from ymheat.algebra import su2, u1
from ymheat.calculus import (
    bochner_laplacian,
    contraction_bracket,
    curvature,
    d_cov,
    dstar_cov,
    gauge_transform,
    gauge_transform_form,
    weitzenbock_defect,
)
from ymheat.fields import edge_bump, random_smooth
from ymheat.grid import MARINI, NEUMANN, GridSpec, KForm, apply_boundary


def _dot(a, b):
    """Plain nodal inner product over non-ghost nodes."""
    return float(np.sum(a.interior * b.interior))


def test_requires_ghost_fill(unit_grid, su2_alg):
    A = KForm(1, unit_grid, su2_alg)
    with pytest.raises(ValueError, match="ghost"):
        curvature(A)


def test_abelian_linear_field_curvature_exact(unit_grid, u1_alg):
    # A = (0, x, 0): B_12 = dA_2/dx = 1 at every node, other planes zero
    A = KForm(1, unit_grid, u1_alg)
    X, _, _ = unit_grid.meshgrid(ghosts=True)
    A.values[1, ..., 0] = X
    B = curvature(apply_boundary(A, MARINI))
    inner = B.values[:, 2:-2, 2:-2, 2:-2, 0]
    assert np.allclose(inner[0], 1.0, atol=1e-13)
    assert np.allclose(inner[1], 0.0, atol=1e-13)
    assert np.allclose(inner[2], 0.0, atol=1e-13)


def test_curvature_antisymmetric_source(unit_grid, su2_alg):
    # swapping the two 1-forms in the bracket flips the bracket term
    A = apply_boundary(
        random_smooth(unit_grid, su2_alg, seed=2, amplitude=0.4), NEUMANN
    )
    B = curvature(A)
    B_neg = curvature(apply_boundary(-1.0 * A, NEUMANN))
    lin = 0.5 * (B + B_neg)  # survives: only the quadratic bracket term
    quad = 0.5 * (B + (-1.0) * B_neg)
    two_forms = KForm(2, unit_grid, su2_alg)
    for (i, j), ci in {(0, 1): 0, (0, 2): 1, (1, 2): 2}.items():
        two_forms.values[ci] = su2_alg.bracket(A.values[i], A.values[j])
    assert np.allclose(lin.interior, two_forms.interior, atol=1e-12)
    assert quad.norm("Linf") > 0


@pytest.mark.parametrize("degree", [1, 2])
def test_d_dstar_adjointness(unit_grid, su2_alg, degree):
    A = apply_boundary(
        random_smooth(unit_grid, su2_alg, seed=3, amplitude=0.3), NEUMANN
    )
    alpha = apply_boundary(
        random_smooth(unit_grid, su2_alg, seed=4, degree=degree - 1,
                      amplitude=1.0), NEUMANN
    )
    beta = apply_boundary(
        random_smooth(unit_grid, su2_alg, seed=5, degree=degree,
                      amplitude=1.0), NEUMANN
    )
    lhs = _dot(d_cov(A, alpha), beta)
    rhs = _dot(alpha, dstar_cov(A, beta))
    assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), 1.0)


def test_bianchi_residual_second_order(su2_alg):
    res = {}
    for n in (12, 24):
        g = GridSpec((1.0, 1.0, 1.0), (n, n, n))
        A = apply_boundary(
            random_smooth(g, su2_alg, seed=6, amplitude=0.3, n_modes=2),
            NEUMANN,
        )
        B = apply_boundary(curvature(A), NEUMANN)
        res[n] = d_cov(A, B).max_interior_norm(1)
    # doubling the resolution must shrink d_A B by roughly 4x
    assert res[24] < 0.45 * res[12]


def test_bochner_eigenmode_exact(unit_grid, u1_alg):
    # zero connection, tangential cosine: compact stencil eigenvalue is
    # -(2 - 2 cos(k h))/h^2 exactly at interior nodes
    h = unit_grid.spacing[0]
    k = np.pi
    A = apply_boundary(KForm(1, unit_grid, u1_alg), NEUMANN)
    w = KForm(1, unit_grid, u1_alg)
    X, Y, _ = unit_grid.meshgrid(ghosts=True)
    # component 1 must vanish on the y faces (normal) and be even in x
    w.values[1, ..., 0] = np.cos(k * X) * np.sin(k * Y)
    wf = apply_boundary(w, NEUMANN)
    lap = bochner_laplacian(A, wf)
    lam = (2.0 - 2.0 * np.cos(k * h)) / (h * h)
    ref = -2.0 * lam * wf.values[1, 1:-1, 1:-1, 1:-1, 0]
    assert np.allclose(lap.values[1, 1:-1, 1:-1, 1:-1, 0], ref, atol=1e-10)


def test_weitzenbock_defect_no_derivatives(su2_alg):
    # the defect is pointwise-algebraic: its size must not grow under
    # refinement on a fixed smooth field (stencil residual only shrinks)
    vals = {}
    for n in (12, 24):
        g = GridSpec((1.0, 1.0, 1.0), (n, n, n))
        A = apply_boundary(
            random_smooth(g, su2_alg, seed=8, amplitude=0.3, n_modes=2),
            NEUMANN,
        )
        B = apply_boundary(curvature(A), NEUMANN)
        full = weitzenbock_defect(A, B)
        vals[n] = full.max_interior_norm(2)
    assert vals[24] < vals[12] * 1.5 + 1e-6


def test_weitzenbock_defect_vanishes_abelian(u1_alg):
    # abelian: all curvature brackets vanish, so only the second-order
    # stencil residual remains and must quarter under grid doubling
    vals = {}
    for n in (12, 24):
        g = GridSpec((1.0, 1.0, 1.0), (n, n, n))
        A = apply_boundary(
            random_smooth(g, u1_alg, seed=9, amplitude=0.5, n_modes=2),
            NEUMANN,
        )
        w = apply_boundary(
            random_smooth(g, u1_alg, seed=10, degree=2, amplitude=1.0,
                          n_modes=2),
            NEUMANN,
        )
        vals[n] = weitzenbock_defect(A, w).max_interior_norm(2)
    assert vals[24] < 0.45 * vals[12]


def test_contraction_bracket_bilinear(unit_grid, su2_alg):
    a = random_smooth(unit_grid, su2_alg, seed=11, amplitude=1.0)
    B = random_smooth(unit_grid, su2_alg, seed=12, degree=2, amplitude=1.0)
    c1 = contraction_bracket(2.0 * a, B)
    c2 = contraction_bracket(a, 2.0 * B)
    c3 = contraction_bracket(a, B)
    assert np.allclose(c1.values, 2.0 * c3.values, atol=1e-13)
    assert np.allclose(c2.values, 2.0 * c3.values, atol=1e-13)


def test_contraction_bracket_abelian_zero(unit_grid, u1_alg):
    a = random_smooth(unit_grid, u1_alg, seed=13, amplitude=1.0)
    B = random_smooth(unit_grid, u1_alg, seed=14, degree=2, amplitude=1.0)
    assert contraction_bracket(a, B).norm("Linf") == 0.0


def _pure_gauge(grid, alg, seed=15):
    """Smooth group-valued field supported away from the faces."""
    theta = random_smooth(grid, alg, seed=seed, degree=0, amplitude=0.3)
    return alg.exp(theta.values[0]), theta


def test_gauge_transform_curvature_equivariance(su2_alg):
    res = {}
    for n in (12, 24):
        g = GridSpec((1.0, 1.0, 1.0), (n, n, n))
        A = apply_boundary(
            random_smooth(g, su2_alg, seed=16, amplitude=0.3, n_modes=2),
            NEUMANN,
        )
        k, _ = _pure_gauge(g, su2_alg)
        Ak = apply_boundary(gauge_transform(A, k), NEUMANN)
        Bk = curvature(Ak)
        B_conj = gauge_transform_form(curvature(A), k)
        res[n] = (Bk + (-1.0) * B_conj).max_interior_norm(2)
    assert res[24] < 0.45 * res[12]  # second-order equivariance defect


def test_gauge_transform_rejects_nonunitary(unit_grid, su2_alg):
    A = KForm(1, unit_grid, su2_alg)
    k = np.full(unit_grid.padded_shape + (2, 2), 2.0, dtype=complex)
    with pytest.raises(ValueError, match="unitary"):
        gauge_transform(A, k)


def test_u1_pure_gauge_is_gradient(unit_grid, u1_alg):
    # transforming A = 0 by exp(i theta) gives i d(theta) to O(h^2)
    k, theta = _pure_gauge(unit_grid, u1_alg, seed=17)
    A0 = KForm(1, unit_grid, u1_alg)
    Ak = gauge_transform(A0, k)
    h = unit_grid.spacing
    for j in range(3):
        grad = np.gradient(theta.values[0][..., 0], h[j], axis=j)
        dev = np.abs(Ak.values[j, 2:-2, 2:-2, 2:-2, 0]
                     - grad[2:-2, 2:-2, 2:-2])
        assert dev.max() < 20.0 * h[j] ** 2
