import pytest

from smoluchowski.direct import solve_fixed_point
from smoluchowski.neumann import discretization


@pytest.fixture(scope="session")
def disc():
    return discretization()


@pytest.fixture(scope="session")
def direct_q1(disc):
    return solve_fixed_point(1.0, 1.0, tol=1e-10, disc=disc)
