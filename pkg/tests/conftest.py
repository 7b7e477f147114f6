import math

import pytest

from choreo8 import analysis
from choreo8.dynamics import canonical_initial_state
from choreo8.integrator import integrate, reference_initial_state

TWO_PI = 2 * math.pi


@pytest.fixture(scope="session")
def canonical():
    return canonical_initial_state()


@pytest.fixture(scope="session")
def traj(canonical):
    """One period from the six-decimal start at tol 1e-12."""
    return integrate(canonical, TWO_PI, tol=1e-12)


@pytest.fixture(scope="session")
def ref_traj():
    """One period from the 8-digit start; tells code error from input rounding."""
    s0 = reference_initial_state()
    return integrate(s0, TWO_PI, tol=1e-13)


@pytest.fixture(scope="session")
def events(traj):
    return analysis.find_configurations(traj)


@pytest.fixture(scope="session")
def ref_events(ref_traj):
    return analysis.find_configurations(ref_traj)


@pytest.fixture(scope="session")
def seps(traj):
    return analysis.separations(traj)
