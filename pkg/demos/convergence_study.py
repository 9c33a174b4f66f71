"""Grid refinement of the evolution identity for three presets."""
import numpy as np

from harnacklab import ManifoldSpec, evolve, preset, residual_study, solve_backward


def run(N, c):
    spec = ManifoldSpec.torus(N)
    X, Y = spec.coordinates()
    traj = evolve(spec, 0.1 * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y), T=0.03, tau0=0.01)
    f0 = np.exp(0.3 * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * (Y + 0.1))
                + 0.2 * np.sin(2 * np.pi * X))
    return solve_backward(traj, c, f0, tau_end=0.02), traj


for name, c in (("THM_1_1", -2), ("THM_1_3", -1), ("PERELMAN", -1)):
    rep = residual_study(preset(name), [run(N, c) for N in (32, 64, 128)])
    print(f"{name:9s} residuals {np.round(rep.residuals, 3)}  order {rep.order:.3f}")
