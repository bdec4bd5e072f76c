import numpy as np
import pytest

from ymheat.fields import coulomb_cosine, random_smooth
from ymheat.flow import FlowConfig, integrate
from ymheat.grid import DIRICHLET, NEUMANN, GridSpec, apply_boundary
from ymheat.neumann import NeumannSemigroup, diamagnetic_check, domination_check
from ymheat.tolerances import margin_tol


@pytest.fixture(scope="module")
def grid():
    return GridSpec((1.0, 1.0, 1.0), (16, 16, 16))


@pytest.fixture(scope="module")
def sg(grid):
    return NeumannSemigroup(grid)


def _flow(grid, A0, t_end=0.01, n_snap=6):
    dt = min(grid.spacing) ** 2 / 8 * 0.9
    snaps = tuple(np.linspace(0.0, t_end, n_snap))
    cfg = FlowConfig(NEUMANN, dt, t_end, snapshot_times=snaps)
    return integrate(A0, cfg), dt


def test_domination_abelian_B(grid, sg):
    traj, dt = _flow(grid, coulomb_cosine(grid, amplitude=0.3))
    res = domination_check(sg, traj, omega_kind="B")
    tol = margin_tol(min(grid.spacing), dt)
    assert res["min_margin"] >= -tol
    assert len(res["per_time_margin"]) == len(res["times"])


def test_domination_su2_both_kinds(grid, sg, su2_alg):
    A0 = random_smooth(grid, su2_alg, seed=31, amplitude=0.05)
    traj, dt = _flow(grid, A0)
    tol = margin_tol(min(grid.spacing), dt)
    for kind in ("B", "A'"):
        res = domination_check(sg, traj, omega_kind=kind)
        assert res["min_margin"] >= -tol, kind


def test_domination_rejects_single_snapshot(grid, sg):
    traj, _ = _flow(grid, coulomb_cosine(grid, amplitude=0.3), n_snap=1)
    with pytest.raises(ValueError):
        domination_check(sg, traj, omega_kind="B")


def test_domination_unknown_kind(grid, sg):
    traj, _ = _flow(grid, coulomb_cosine(grid, amplitude=0.3))
    with pytest.raises(ValueError):
        domination_check(sg, traj, omega_kind="F")


def test_diamagnetic_abelian_equality(grid, sg, u1_alg):
    # zero connection: the covariant evolution of a nonnegative scalar
    # multiple reproduces the scalar heat flow, so the margin is tiny
    from ymheat.grid import KForm

    A = apply_boundary(KForm(1, grid, u1_alg), NEUMANN)
    w0 = random_smooth(grid, u1_alg, seed=32, degree=2, amplitude=0.3)
    w0.values[...] = np.abs(w0.values)
    w0 = apply_boundary(w0, NEUMANN)
    res = diamagnetic_check(sg, A, w0, 0.005)
    h = min(grid.spacing)
    assert res["min_margin"] >= -margin_tol(h, h * h / 8)


@pytest.mark.parametrize("bc", [NEUMANN, DIRICHLET])
def test_diamagnetic_su2(grid, sg, su2_alg, bc):
    A = apply_boundary(
        random_smooth(grid, su2_alg, seed=33, amplitude=0.2), bc
    )
    w0 = apply_boundary(
        random_smooth(grid, su2_alg, seed=34, degree=2, amplitude=0.3), bc
    )
    res = diamagnetic_check(sg, A, w0, 0.01)
    h = min(grid.spacing)
    assert res["min_margin"] >= -margin_tol(h, h * h / 8)


def test_diamagnetic_rejects_marini(grid, sg, su2_alg):
    from ymheat.grid import MARINI

    A = apply_boundary(
        random_smooth(grid, su2_alg, seed=35, amplitude=0.2), MARINI
    )
    w0 = apply_boundary(
        random_smooth(grid, su2_alg, seed=36, degree=2, amplitude=0.3),
        MARINI,
    )
    with pytest.raises(ValueError):
        diamagnetic_check(sg, A, w0, 0.01)


def test_diamagnetic_rejects_large_dt(grid, sg, su2_alg):
    A = apply_boundary(
        random_smooth(grid, su2_alg, seed=33, amplitude=0.2), NEUMANN
    )
    w0 = apply_boundary(
        random_smooth(grid, su2_alg, seed=34, degree=2, amplitude=0.3),
        NEUMANN,
    )
    with pytest.raises(ValueError, match="ceiling"):
        diamagnetic_check(sg, A, w0, 0.01, dt=1.0)
