import numpy as np
import pytest

from ymheat.algebra import su2, u1
from ymheat.fields import coulomb_cosine, random_smooth
from ymheat.grid import GridSpec, NEUMANN, apply_boundary


@pytest.fixture(scope="session")
def unit_grid():
    return GridSpec((1.0, 1.0, 1.0), (16, 16, 16))


@pytest.fixture(scope="session")
def coarse_grid():
    return GridSpec((1.0, 1.0, 1.0), (12, 12, 12))


@pytest.fixture(scope="session")
def su2_alg():
    return su2()


@pytest.fixture(scope="session")
def u1_alg():
    return u1()


@pytest.fixture(scope="session")
def abelian_field(unit_grid):
    return coulomb_cosine(unit_grid)


@pytest.fixture(scope="session")
def smooth_su2_field(unit_grid, su2_alg):
    return apply_boundary(
        random_smooth(unit_grid, su2_alg, seed=7, amplitude=0.2), NEUMANN
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(20260823)
