"""Closed-form references: the shrinking round sphere and flat heat kernels."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log, pi, sqrt

import numpy as np
from scipy.special import logsumexp

from .geometry import MetricState, background_laplacian, sphere_area

_TAIL = 1e-14


@dataclass(frozen=True)
class SphereOracle:
    """Round n-sphere with r(t)^2 = r0^2 - 2(n-1)t, tau = T - t."""
    n: int
    r0: float
    T: float

    @property
    def blowup_normalized(self):
        return abs(self.r0 ** 2 - 2 * (self.n - 1) * self.T) <= 1e-12 * max(1.0, self.r0 ** 2)

    def radius_sq(self, t):
        return self.r0 ** 2 - 2 * (self.n - 1) * np.asarray(t, dtype=float)

    def radius(self, t):
        return np.sqrt(self.radius_sq(t))

    def scalar_curvature(self, t):
        n = self.n
        return n * (n - 1) / self.radius_sq(t)

    def R_tau(self, tau):
        return self.scalar_curvature(self.T - np.asarray(tau, dtype=float))

    def volume(self, t):
        return sphere_area(self.n) * self.radius(t) ** self.n

    def f_homogeneous(self, tau, c, f0, tau0):
        """Solution of df/dtau = c R f with f(tau0) = f0."""
        tau = np.asarray(tau, dtype=float)
        ratio = self.radius_sq(self.T - tau) / self.radius_sq(self.T - tau0)
        return f0 * ratio ** (c * self.n / 2)


def sphere_closed_forms(n, r0, T, tau0=None):
    """Validated :class:`SphereOracle`."""
    if n < 2 or r0 <= 0 or T <= 0:
        raise ValueError("need n >= 2, r0 > 0, T > 0")
    oracle = SphereOracle(int(n), float(r0), float(T))
    tau0 = 0.01 * T if tau0 is None else tau0
    if not oracle.blowup_normalized and not r0 ** 2 > 2 * (n - 1) * (T - tau0):
        raise ValueError(f"r0^2={r0 ** 2} is inadmissible for T={T}")
    return oracle


# --- flat heat kernels -------------------------------------------------------

def _log_kernel_1d(t, d, L):
    """log of the periodic heat kernel on a circle of length L."""
    d = np.asarray(d, dtype=float)
    n_img = int(ceil(sqrt(4 * t * log(1 / _TAIL)) / L)) + 1
    n_four = int(ceil(L / (2 * pi) * sqrt(log(1 / _TAIL) / t))) + 1
    if n_img <= n_four:
        m = np.arange(-n_img, n_img + 1)
        expo = -((d[..., None] + m * L) ** 2) / (4 * t)
        return logsumexp(expo, axis=-1) - 0.5 * log(4 * pi * t)
    k = np.arange(1, n_four + 1)
    series = 1 + 2 * np.sum(np.exp(-4 * pi ** 2 * k ** 2 * t / L ** 2)
                            * np.cos(2 * pi * k * d[..., None] / L), axis=-1)
    return np.log(series / L)


def log_flat_heat_kernel(spec, t, x, y):
    if not t > 0:
        raise ValueError("kernel time must be positive")
    if spec.kind == "circle":
        return _log_kernel_1d(t, np.asarray(x) - np.asarray(y), spec.length)
    if spec.kind == "torus":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = x - y
        return (_log_kernel_1d(t, d[..., 0], spec.length)
                + _log_kernel_1d(t, d[..., 1], spec.length))
    raise ValueError("flat heat kernels exist for circle and torus specs")


def flat_heat_kernel(spec, t, x, y):
    """Heat kernel of the flat circle/torus; points carry a trailing axis of 2 on the torus."""
    return np.exp(log_flat_heat_kernel(spec, t, x, y))


def kernel_on_grid(spec, t, source=0.0):
    """Kernel centred at ``source`` sampled at the grid nodes."""
    if spec.kind == "circle":
        return flat_heat_kernel(spec, t, spec.coordinates(), source)
    X, Y = spec.coordinates()
    pts = np.stack([X, Y], axis=-1)
    return flat_heat_kernel(spec, t, pts, np.broadcast_to(source, (2,)))


@dataclass
class LiYauReport:
    passed: bool
    min_value: float
    worst_time: float
    tolerance: float
    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    minima: np.ndarray = field(default_factory=lambda: np.empty(0))


def li_yau_check(spec, times, source=0.0, tolerance=1e-6, traj=None):
    """min over nodes and times of Lap ln f + n/(2t) for the flat heat kernel."""
    if traj is not None and not traj.stationary:
        raise ValueError("Li-Yau baseline needs a static metric")
    if spec.kind not in ("circle", "torus"):
        raise ValueError("Li-Yau baseline runs on flat circle/torus specs")
    m = MetricState(spec, 0.0, spec.zeros())
    minima = []
    for t in times:
        if spec.kind == "circle":
            logf = log_flat_heat_kernel(spec, t, spec.coordinates(), source)
        else:
            X, Y = spec.coordinates()
            logf = log_flat_heat_kernel(spec, t, np.stack([X, Y], -1),
                                        np.broadcast_to(source, (2,)))
        val = m.inv_conformal * background_laplacian(logf, spec) + spec.n / (2 * t)
        minima.append(float(np.min(val)))
    minima = np.array(minima)
    k = int(np.argmin(minima))
    return LiYauReport(bool(minima[k] >= -tolerance), float(minima[k]), float(times[k]),
                       tolerance, np.asarray(times, dtype=float), minima)
