import numpy as np
import pytest

from harnacklab import (BlowUpRangeError, ManifoldSpec, StepSizeError, TimeRangeError, evolve,
                        rm_norm_constant, type_one_bound)


def test_flat_torus_is_stationary(flat_torus):
    assert flat_torus.stationary
    for t in (0.0, 0.3, flat_torus.t_end):
        st = flat_torus.state_at(t)
        assert np.all(st.dof == 0) and np.all(st.R == 0)


def test_shrinking_sphere_closed_form(shrinking_sphere):
    traj = shrinking_sphere
    for k in (0, 1000, len(traj) - 1):
        st = traj.state(k)
        t = traj.times[k]
        assert abs(st.radius ** 2 - (2 - 2 * t)) < 1e-12
        assert abs(st.R - 1 / (1 - t)) < 1e-9
        assert abs(st.R * (traj.T - t) - 1.0) < 1e-12


def test_state_at_interpolates_radius_squared(shrinking_sphere):
    traj = shrinking_sphere
    t = 0.5 * (traj.times[10] + traj.times[11])
    assert abs(traj.state_at(t).radius ** 2 - (2 - 2 * t)) < 1e-12
    assert traj.state_at(traj.times[7]).t == traj.times[7]
    with pytest.raises(TimeRangeError):
        traj.state_at(traj.t_end + 0.1)


def test_blowup_range_is_rejected():
    with pytest.raises(BlowUpRangeError):
        evolve(ManifoldSpec.round_sphere(2, 1.0), T=1.0, tau0=0.01)
    with pytest.raises(ValueError):
        evolve(ManifoldSpec.torus(16), T=0.1, tau0=0.2)


def test_oversized_steps_are_rejected():
    spec = ManifoldSpec.torus(32)
    X, _ = spec.coordinates()
    with pytest.raises(StepSizeError):
        evolve(spec, 0.01 * np.sin(2 * np.pi * X), T=1.0, tau0=0.01, steps=100)


def test_single_mode_decays_linearly():
    eps = 1e-3
    spec = ManifoldSpec.torus(64)
    X, _ = spec.coordinates()
    traj = evolve(spec, eps * np.sin(2 * np.pi * X), T=0.05, tau0=0.01)
    t = traj.t_end
    # semi-discrete decay rate of the centred stencil
    h = spec.spacing
    rate = (2 * np.sin(np.pi * h) / h) ** 2
    ref = eps * np.exp(-rate * t) * np.sin(2 * np.pi * X)
    assert np.max(np.abs(traj.dof(len(traj) - 1) - ref)) < 5 * eps ** 2
    cont = eps * np.exp(-4 * np.pi ** 2 * t) * np.sin(2 * np.pi * X)
    assert np.max(np.abs(traj.dof(len(traj) - 1) - cont)) < 1e-5


def test_gauss_bonnet_along_torus_flow(small_torus_flow):
    traj = small_torus_flow
    from harnacklab import integrate
    for k in (0, len(traj) // 2, len(traj) - 1):
        st = traj.state(k)
        assert abs(integrate(st.R, st)) < 1e-12
        assert st.R.min() < 0 < st.R.max()


def test_type_one_bounds(flat_torus, shrinking_sphere):
    assert type_one_bound(flat_torus).d0 == 0
    b = type_one_bound(shrinking_sphere)
    assert abs(b.d0 - rm_norm_constant(2)) < 1e-9
    spec = ManifoldSpec.torus(32)
    X, _ = spec.coordinates()
    eps = 1e-3
    traj = evolve(spec, eps * np.sin(2 * np.pi * X), T=1.0, tau0=0.01)
    # sup |R| tau is attained at t = 0: 2 eps (discrete sine eigenvalue) T
    h = spec.spacing
    expected = rm_norm_constant(2) * 2 * eps * (2 * np.sin(np.pi * h) / h) ** 2 * traj.T
    bound = type_one_bound(traj)
    assert bound.worst_time == 0.0
    assert abs(bound.d0 - expected) < 5e-3 * expected


def test_rotsym_volume_shrinks_like_round_sphere():
    spec = ManifoldSpec.rotsym_sphere(32)
    traj = evolve(spec, T=0.25, tau0=0.05, steps=400)
    st = traj.state(len(traj) - 1)
    t = traj.times[-1]
    assert abs(st.volume - 4 * np.pi * (1 - 2 * t)) < 1e-2
    np.testing.assert_allclose(st.R, 2 / (1 - 2 * t), rtol=1e-6)
