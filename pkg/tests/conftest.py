import numpy as np
import pytest

from harnacklab import ManifoldSpec, evolve, solve_backward


def sinsin(spec, amp=0.1):
    X, Y = spec.coordinates()
    return amp * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y)


def smooth_data(spec):
    X, Y = spec.coordinates()
    return np.exp(0.3 * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * (Y + 0.1))
                  + 0.2 * np.sin(2 * np.pi * X))


@pytest.fixture(scope="session")
def small_torus_flow():
    spec = ManifoldSpec.torus(32)
    return evolve(spec, sinsin(spec), T=0.25, tau0=0.01)


@pytest.fixture(scope="session")
def small_torus_2r(small_torus_flow):
    traj = small_torus_flow
    return solve_backward(traj, -2, smooth_data(traj.spec), store_every=10)


@pytest.fixture(scope="session")
def small_torus_che(small_torus_flow):
    traj = small_torus_flow
    return solve_backward(traj, -1, smooth_data(traj.spec), store_every=10)


@pytest.fixture(scope="session")
def shrinking_sphere():
    spec = ManifoldSpec.round_sphere(2, np.sqrt(2.0))
    return evolve(spec, T=1.0, tau0=0.01)


@pytest.fixture(scope="session")
def flat_torus():
    return evolve(ManifoldSpec.torus(32), T=1.0, tau0=0.01)
