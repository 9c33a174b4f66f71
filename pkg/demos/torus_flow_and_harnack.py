"""Perturbed flat torus: Ricci flow, the potential-2R equation and its Harnack quantity."""
import numpy as np

from harnacklab import (ManifoldSpec, check_nonpositivity, evolve, integrate, preset,
                        solve_backward)

spec = ManifoldSpec.torus(32)
X, Y = spec.coordinates()
traj = evolve(spec, 0.1 * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y), T=0.5, tau0=0.01)

for k in (0, len(traj) // 2, len(traj) - 1):
    st = traj.state(k)
    print(f"t={st.t:.3f}  min R={st.R.min():+.4f}  max R={st.R.max():+.4f}  "
          f"int R={integrate(st.R, st):+.1e}")

f0 = np.exp(0.3 * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y))
sol = solve_backward(traj, -2, f0, store_every=20)
rep = check_nonpositivity(preset("THM_1_1"), sol, traj)
print(rep.status, "worst H:", rep.worst_value, "at (tau, i, j) =", rep.worst_location)

# R changes sign on a torus, so the conjugate heat estimate is out of scope here
che = solve_backward(traj, -1, f0, store_every=20)
print(check_nonpositivity(preset("THM_1_3"), che, traj).status)
