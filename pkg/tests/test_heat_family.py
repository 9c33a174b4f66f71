import numpy as np
import pytest

from harnacklab import (ManifoldSpec, MetricState, PositivityError, TimeRangeError, evolve,
                        init_near_delta, integrate, kernel_on_grid, pairing_series,
                        solve_backward, solve_forward_heat, total_mass)


@pytest.mark.parametrize("c", [-2.0, -1.0, 0.0])
def test_constant_data_on_flat_torus_stays_constant(flat_torus, c):
    sol = solve_backward(flat_torus, c, flat_torus.spec.constant(0.7), tau_end=0.2)
    assert np.max(np.abs(sol.f - 0.7)) < 1e-14


@pytest.mark.parametrize("c, power", [(-2.0, -2.0), (-1.0, -1.0)])
def test_homogeneous_sphere_solution(shrinking_sphere, c, power):
    # f(tau) = f(tau0) (tau/tau0)^(c n / 2) with n = 2
    sol = solve_backward(shrinking_sphere, c, np.asarray(1.0))
    ref = (sol.taus / sol.taus[0]) ** power
    # RK4 error at the default 4000 steps, dominated by the steps near tau0
    assert np.max(np.abs(sol.f / ref - 1)) < 1e-7


def test_log_fields(shrinking_sphere):
    sol = solve_backward(shrinking_sphere, -1, np.asarray(2.0), tau_end=0.5)
    tau = sol.taus[-1]
    assert abs(tau - 0.5) < 1e-12
    assert abs(sol.u_at(tau) + np.log(sol.f[-1])) < 1e-15
    assert abs(sol.v_at(tau) - (sol.u_at(tau) - np.log(4 * np.pi * tau))) < 1e-15
    with pytest.raises(TimeRangeError):
        sol.f_at(0.9)


def test_partial_final_step_lands_on_tau_end(small_torus_flow):
    sol = solve_backward(small_torus_flow, -1, small_torus_flow.spec.constant(1.0),
                         tau_end=0.1234)
    assert abs(sol.taus[-1] - 0.1234) < 1e-14
    assert sol.node_index[-1] == -1


def test_positivity_is_required(flat_torus):
    f = flat_torus.spec.constant(1.0)
    f[0, 0] = -1.0
    with pytest.raises(PositivityError):
        solve_backward(flat_torus, -1, f)


def test_conjugate_mass_is_conserved(small_torus_flow, small_torus_che):
    mass = total_mass(small_torus_che, small_torus_flow)
    assert np.max(np.abs(mass / mass[0] - 1)) < 1e-7


def test_adjoint_pairing_is_conserved(small_torus_flow, small_torus_che):
    spec = small_torus_flow.spec
    X, Y = spec.coordinates()
    nodes = small_torus_che.node_index
    heat = solve_forward_heat(small_torus_flow, 1 + 0.5 * np.sin(2 * np.pi * X + 0.2),
                              nodes=nodes[nodes >= 0])
    times, pairing = pairing_series(small_torus_che, heat, small_torus_flow)
    assert len(times) == np.sum(nodes >= 0)
    assert np.max(np.abs(pairing / pairing[0] - 1)) < 1e-7


def test_forward_heat_mode_decay_on_circle():
    spec = ManifoldSpec.circle(64)
    traj = evolve(spec, T=1.0, tau0=0.5)
    x = spec.coordinates()
    heat = solve_forward_heat(traj, 1 + 0.5 * np.sin(x))
    t = heat.times[-1]
    # semi-discrete eigenvalue of the three-point stencil
    h = spec.spacing
    lam = (2 * np.sin(h / 2) / h) ** 2
    assert np.max(np.abs(heat.h[-1] - (1 + 0.5 * np.exp(-lam * t) * np.sin(x)))) < 1e-10
    assert np.max(np.abs(heat.h[-1] - (1 + 0.5 * np.exp(-t) * np.sin(x)))) < 1e-3
    const = solve_forward_heat(traj, spec.constant(2.0))
    assert np.max(np.abs(const.h - 2.0)) < 1e-14


def test_forward_heat_reproduces_kernel_on_torus():
    spec = ManifoldSpec.torus(64)
    traj = evolve(spec, T=0.05, tau0=0.01)
    t0 = 0.01
    heat = solve_forward_heat(traj, kernel_on_grid(spec, t0, (0.5, 0.5)))
    exact = kernel_on_grid(spec, t0 + heat.times[-1], (0.5, 0.5))
    assert np.max(np.abs(heat.h[-1] - exact)) / np.max(exact) < 5e-3


def test_init_near_delta():
    spec = ManifoldSpec.torus(32)
    m = MetricState(spec, 0.0, spec.zeros())
    f = init_near_delta(spec, (0.5, 0.5), 0.1)
    assert abs(integrate(f, m) - 1) < 1e-10
    i = np.unravel_index(np.argmax(f), f.shape)
    assert i == (16, 16)
    np.testing.assert_allclose(f, f.T, atol=1e-14)
    wide = init_near_delta(spec, (0.5, 0.5), 100.0)
    assert np.ptp(wide) < 1e-4
    with pytest.raises(ValueError):
        init_near_delta(spec, (0.5, 0.5), 0.05)
    sphere = ManifoldSpec.round_sphere(2, 1.0)
    assert abs(float(init_near_delta(sphere, 0.0, 0.1)) * 4 * np.pi - 1) < 1e-14
