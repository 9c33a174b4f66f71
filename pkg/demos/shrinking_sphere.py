"""Shrinking round sphere: Harnack quantities against closed forms."""
import numpy as np

from harnacklab import (ManifoldSpec, check_nonpositivity, evolve, preset, solve_backward,
                        sphere_closed_forms)

n = 2
oracle = sphere_closed_forms(n, np.sqrt(2.0), T=1.0)
traj = evolve(ManifoldSpec.round_sphere(n, oracle.r0), T=1.0, tau0=0.01)
print("R at tau = 0.5:", traj.state_at(0.5).R, "closed form:", oracle.R_tau(0.5))

for c, name in ((-2, "THM_1_1"), (-1, "THM_1_3")):
    sol = solve_backward(traj, c, np.asarray(1.0))
    rep = check_nonpositivity(preset(name), sol, traj)
    ratio = rep.max_by_tau * sol.taus
    print(f"{name}: tau * max H ranges over [{ratio.min():.10f}, {ratio.max():.10f}]")
