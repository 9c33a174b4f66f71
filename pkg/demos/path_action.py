"""Space-time action and the two-point Harnack bound."""
import numpy as np

from harnacklab import (ManifoldSpec, SpaceTimePath, action, evolve, minimize_action,
                        solve_backward, verify_integrated)

flat = evolve(ManifoldSpec.torus(32), T=1.0, tau0=0.01)
path = SpaceTimePath.chord((0.1, 0.2), 0.2, (0.6, 0.2), 0.7)
print("straight path, d = 0.5, dt = 0.5:", action(path, flat).gamma)

sphere = evolve(ManifoldSpec.round_sphere(2, np.sqrt(2.0)), T=1.0, tau0=0.25)
best = minimize_action((0.0, 0.0), (0.0, 0.5), sphere, segments=1024)
print("sphere, tau 1 -> 0.5:", best.gamma, "ln 2 =", np.log(2))

spec = ManifoldSpec.torus(32)
X, Y = spec.coordinates()
traj = evolve(spec, 0.1 * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y), T=0.5, tau0=0.01)
sol = solve_backward(traj, -2, np.exp(0.3 * np.cos(2 * np.pi * X)), store_every=10)
pairs = [(((0.1, 0.2), 0.05), ((0.6, 0.7), 0.4)), (((0.3, 0.3), 0.1), ((0.35, 0.3), 0.2))]
rep = verify_integrated(sol, traj, pairs, n_random=100, seed=42)
for pr in rep.pairs:
    print(f"gamma_hat={pr.gamma_hat:.4f}  endpoint margin={pr.endpoint_margin:.4f}  "
          f"worst random-path margin={pr.path_min_margin:.4f}")
