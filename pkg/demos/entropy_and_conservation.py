"""Entropy W and conserved quantities on a positively curved sphere of revolution."""
import numpy as np

from harnacklab import (ManifoldSpec, eval_entropy, evolve, monotonicity_report,
                        pairing_series, solve_backward, solve_forward_heat, total_mass)

spec = ManifoldSpec.rotsym_sphere(48)
theta = spec.coordinates()
traj = evolve(spec, 0.05 * (3 * np.cos(theta) ** 2 - 1), T=0.25, tau0=0.01, steps=1000)
sol = solve_backward(traj, -1, np.exp(0.3 * np.cos(theta)), store_every=10)

W = eval_entropy("W", sol, traj)
rep = monotonicity_report(W)
print("min R over the run:", W.min_R)
print("W from", W.values[-1], "to", W.values[0], "| min dW/dt step:", rep.min_slope)

mass = total_mass(sol, traj)
print("relative mass drift:", np.max(np.abs(mass / mass[0] - 1)))
heat = solve_forward_heat(traj, 1 + 0.5 * np.cos(theta), nodes=sol.node_index)
_, pairing = pairing_series(sol, heat, traj)
print("relative pairing drift:", np.max(np.abs(pairing / pairing[0] - 1)))
