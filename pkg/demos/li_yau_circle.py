"""Li-Yau inequality for the heat kernel of a flat circle."""
import numpy as np

from harnacklab import ManifoldSpec, li_yau_check

rep = li_yau_check(ManifoldSpec.circle(256), np.linspace(0.05, 1.0, 20))
for t, v in zip(rep.times[::4], rep.minima[::4]):
    print(f"t={t:.2f}  min(Lap ln f + 1/(2t)) = {v:+.3e}")
print("passed:", rep.passed)
