import numpy as np
import pytest

from harnacklab import (EntropyValue, ManifoldSpec, ParameterMismatchError, eval_entropy,
                        evolve, integrate, monotonicity_report, solve_backward)


def test_F_on_flat_torus_with_unit_data(flat_torus):
    sol = solve_backward(flat_torus, -2, flat_torus.spec.constant(1.0), store_every=100)
    e = eval_entropy("F", sol, flat_torus)
    # tau^2 (-2n/tau) vol with n = 2 and vol = 1
    assert np.max(np.abs(e.values + 4 * e.taus)) <= 1e-10
    assert np.max(np.abs(e.ddt - 4)) <= 1e-10
    rep = monotonicity_report(e)
    assert rep.passed and abs(rep.min_slope - 4) < 1e-9


def test_W_on_normalized_sphere():
    # steps chosen so that tau = 0.5 is a node
    traj = evolve(ManifoldSpec.round_sphere(2, np.sqrt(2.0)), T=1.0, tau0=0.01, steps=3960)
    m0 = traj.state(len(traj) - 1)
    sol = solve_backward(traj, -1, np.asarray(1.0 / m0.volume))
    e = eval_entropy("W", sol, traj)
    assert np.max(np.abs(e.values + 3 * e.taus)) <= 1e-8
    assert np.max(np.abs(e.ddt - 3)) <= 1e-8
    k = int(np.argmin(np.abs(e.taus - 0.5)))
    assert abs(e.taus[k] - 0.5) < 1e-9 and abs(e.values[k] + 1.5) < 1e-8
    rep = monotonicity_report(e)
    assert rep.passed and abs(rep.min_slope - 3) < 1e-6


def test_kind_must_match_equation(flat_torus):
    sol = solve_backward(flat_torus, -1, flat_torus.spec.constant(1.0), tau_end=0.05)
    with pytest.raises(ParameterMismatchError):
        eval_entropy("F", sol, flat_torus)
    with pytest.raises(ValueError):
        eval_entropy("Q", sol, flat_torus)


def test_corrupted_series_fails_at_the_injected_step():
    taus = np.linspace(1.0, 0.1, 10)
    values = -4 * taus
    values[6] -= 0.5
    e = EntropyValue("F", 1.0, taus, values, np.gradient(values, taus))
    rep = monotonicity_report(e)
    assert not rep.passed
    assert rep.worst_step == 5  # slope from node 5 to node 6 in increasing t
    with pytest.raises(ValueError):
        monotonicity_report(EntropyValue("F", 1.0, taus[:2], values[:2], values[:2]))


def test_W_is_nonpositive_and_monotone_on_positive_curvature():
    spec = ManifoldSpec.rotsym_sphere(32)
    theta = spec.coordinates()
    phi = 0.05 * 0.5 * (3 * np.cos(theta) ** 2 - 1)
    traj = evolve(spec, phi, T=0.25, tau0=0.02, steps=600)
    sol = solve_backward(traj, -1, np.exp(0.3 * np.cos(theta)), store_every=5)
    e = eval_entropy("W", sol, traj)
    assert e.min_R > 0
    assert np.all(e.values <= 0)
    assert monotonicity_report(e).passed
    m = sol.state(0, traj)
    assert integrate(sol.f[0], m) > 0
