"""Ricci flow on the reduced backends and the stored metric history."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpRangeError, StepSizeError, TimeRangeError
from .geometry import MetricState, background_laplacian, check_field, rm_norm_constant

CFL_SAFETY = 0.2
# the stability limit of RK4 on these stencils is ~0.35 h^2; the slack only
# absorbs the drift of min exp(2 phi) across a single step
CFL_SLACK = 1.01
DEFAULT_SPHERE_STEPS = 4000


def cfl_limit(m, safety=CFL_SAFETY):
    """Largest explicit step allowed on the metric ``m``."""
    if m.spec.kind == "round_sphere":
        return np.inf
    return safety * m.spec.spacing ** 2 * float(np.min(m.conformal))


def _check_cfl(dt, m, safety):
    limit = cfl_limit(m, safety)
    if dt > limit * CFL_SLACK:
        raise StepSizeError(
            f"step {dt:.3e} exceeds CFL bound {limit:.3e} at t={m.t:.6g}")


def conformal_velocity(phi, spec):
    """d phi / dt = -R/2 for the conformal backends."""
    lap = background_laplacian(phi, spec)
    if spec.kind == "torus":
        return np.exp(-2 * phi) * lap
    if spec.kind == "rotsym_sphere":
        return np.exp(-2 * phi) * (lap - 1.0)
    return np.zeros_like(phi)


@dataclass(frozen=True)
class FlowTrajectory:
    """Metric history on ``0 = t_0 < ... < t_K = T - tau0``.

    ``dofs`` holds one entry per time node, except for stationary flows where
    a single entry stands for every node.
    """
    spec: object
    times: np.ndarray
    dofs: np.ndarray
    T: float
    tau0: float
    stationary: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def taus(self):
        return self.T - self.times

    @property
    def t_end(self):
        return float(self.times[-1])

    def dof(self, k):
        return self.dofs[0] if self.stationary else self.dofs[k]

    def state(self, k):
        """Stored state at node ``k``."""
        if k < 0:
            k += len(self.times)
        cache = self._cache
        if self.stationary:
            base = cache.get("static")
            if base is None:
                base = cache["static"] = MetricState(self.spec, self.times[0], self.dofs[0])
            st = copy.copy(base)
            st.t = float(self.times[k])
            return st
        st = cache.get(k)
        if st is None:
            if len(cache) > 8:
                cache.clear()
            st = cache[k] = MetricState(self.spec, self.times[k], self.dofs[k])
        return st

    def locate(self, t, atol=None):
        """Return ``(k, exact)`` with ``times[k] <= t`` bracketing ``t``."""
        times = self.times
        if atol is None:
            atol = 1e-12 * max(1.0, abs(self.T))
        if t < times[0] - atol or t > times[-1] + atol:
            raise TimeRangeError(f"t={t} outside [{times[0]}, {times[-1]}]")
        k = int(np.searchsorted(times, t))
        if k < len(times) and abs(times[k] - t) <= atol:
            return k, True
        if k > 0 and abs(times[k - 1] - t) <= atol:
            return k - 1, True
        return k - 1, False

    def state_at(self, t):
        """Metric at time ``t``; the dof is interpolated linearly between nodes."""
        k, exact = self.locate(t)
        if exact or self.stationary:
            st = self.state(k)
            if not exact:
                st.t = float(t)
            return st
        t0, t1 = self.times[k], self.times[k + 1]
        w = (t - t0) / (t1 - t0)
        if self.spec.kind == "round_sphere":
            # the metric is r^2 g_1, so interpolate r^2
            r2 = (1 - w) * self.dofs[k] ** 2 + w * self.dofs[k + 1] ** 2
            dof = np.sqrt(r2)
        else:
            dof = (1 - w) * self.dofs[k] + w * self.dofs[k + 1]
        return MetricState(self.spec, t, dof)

    def states(self):
        for k in range(len(self.times)):
            yield self.state(k)


@dataclass(frozen=True)
class TypeIBound:
    d0: float
    achieved: bool
    norm_constant: float
    worst_time: float = float("nan")


def _sphere_trajectory(spec, r0, T, tau0, steps):
    n = spec.n
    t_end = T - tau0
    r0sq = r0 * r0
    if not r0sq - 2 * (n - 1) * t_end > 0:
        raise BlowUpRangeError(
            f"r0^2={r0sq} shrinks to zero before t={t_end} (needs r0^2 > {2 * (n - 1) * t_end})")
    times = np.linspace(0.0, t_end, steps + 1)
    radii = np.sqrt(r0sq - 2 * (n - 1) * times)
    return FlowTrajectory(spec, times, radii, float(T), float(tau0))


def _rk4(phi, dt, spec):
    k1 = conformal_velocity(phi, spec)
    k2 = conformal_velocity(phi + 0.5 * dt * k1, spec)
    k3 = conformal_velocity(phi + 0.5 * dt * k2, spec)
    k4 = conformal_velocity(phi + dt * k3, spec)
    return phi + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _time_grid(spec, phi, t_end, steps, safety):
    """Uniform grid when ``steps`` is given, else CFL-sized steps."""
    if steps is not None:
        return np.linspace(0.0, t_end, steps + 1)
    dt = safety * spec.spacing ** 2 * float(np.exp(2 * np.min(phi)))
    count = max(16, int(np.ceil(t_end / dt - 1e-9)))
    return np.linspace(0.0, t_end, count + 1)


def evolve(spec, initial_dof=None, T=1.0, tau0=None, steps=None, safety=CFL_SAFETY):
    """Integrate dg/dt = -2 Rc from t = 0 to T - tau0.

    On the round sphere the closed form r(t)^2 = r0^2 - 2(n-1)t is used.  The
    conformal backends step d phi/dt = -R/2 with RK4.  If ``steps`` is None a
    uniform step is derived from the CFL bound of the initial metric; shrinking
    metrics (rotsym_sphere) may need an explicit, larger ``steps``.
    """
    T = float(T)
    tau0 = 0.01 * T if tau0 is None else float(tau0)
    if not T > tau0 > 0:
        raise ValueError(f"need T > tau0 > 0, got T={T}, tau0={tau0}")
    if steps is not None and steps < 16:
        raise ValueError("steps must be at least 16")
    t_end = T - tau0

    if spec.kind == "round_sphere":
        r0 = spec.r0 if initial_dof is None else float(initial_dof)
        return _sphere_trajectory(spec, r0, T, tau0,
                                  DEFAULT_SPHERE_STEPS if steps is None else steps)

    phi = spec.zeros() if initial_dof is None else check_field(initial_dof, spec).copy()
    times = _time_grid(spec, phi, t_end, steps, safety)
    if spec.kind == "circle" or (spec.kind == "torus" and np.ptp(phi) == 0.0):
        traj = FlowTrajectory(spec, times, phi[None].copy(), T, tau0, stationary=True)
        _check_cfl(times[1] - times[0], traj.state(0), safety)
        return traj

    dofs = np.empty((len(times),) + spec.shape)
    dofs[0] = phi
    for k in range(len(times) - 1):
        dt = times[k + 1] - times[k]
        limit = safety * spec.spacing ** 2 * float(np.exp(2 * np.min(phi)))
        if dt > limit * CFL_SLACK:
            raise StepSizeError(
                f"step {dt:.3e} exceeds CFL bound {limit:.3e} at t={times[k]:.6g}")
        phi = _rk4(phi, dt, spec)
        if not np.all(np.isfinite(phi)):
            raise BlowUpRangeError(f"conformal factor diverged near t={times[k + 1]:.6g}")
        dofs[k + 1] = phi
    return FlowTrajectory(spec, times, dofs, T, tau0)


def type_one_bound(traj):
    """d0 = max_k sup_x |Rm|(x, t_k) (T - t_k) with |Rm| := C |R|."""
    C = rm_norm_constant(traj.spec.n)
    if traj.stationary:
        st = traj.state(0)
        vals = np.max(np.abs(st.R)) * C * traj.taus
    else:
        vals = np.array([np.max(np.abs(st.R)) * C for st in traj.states()]) * traj.taus
    k = int(np.argmax(vals))
    d0 = float(vals[k])
    return TypeIBound(d0=d0, achieved=bool(np.isfinite(d0)), norm_constant=C,
                      worst_time=float(traj.times[k]))
