"""Backward heat-type equations and the forward heat equation on a stored flow.

The backward family is ``df/dt = -Lap f - c R f``; in ``tau = T - t`` it reads
``df/dtau = Lap f + c R f`` and is integrated forward in ``tau`` from
``tau0``, reading the metric history in reverse.  ``c = -1`` gives the
conjugate heat equation and ``c = -2`` the equation with potential 2R.

The log transforms ``u = -ln f`` and ``v = u - (n/2) ln(4 pi tau)`` are taken
pointwise from ``f``; ``v`` then solves
``dv/dtau = Lap v - |grad v|^2 - c R - n/(2 tau)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError, TimeRangeError
from .geometry import check_field, integrate, laplacian
from .ricci_flow import CFL_SAFETY, _check_cfl


@dataclass(frozen=True)
class LogSolution:
    """Stored records of a positive backward solution."""
    spec: object
    c: float
    T: float
    taus: np.ndarray
    f: np.ndarray
    node_index: np.ndarray  # trajectory node of each record

    @property
    def n(self):
        return self.spec.n

    @property
    def times(self):
        return self.T - self.taus

    def __len__(self):
        return len(self.taus)

    def index(self, tau, atol=1e-12):
        k = int(np.argmin(np.abs(self.taus - tau)))
        if abs(self.taus[k] - tau) > atol * max(1.0, abs(tau)):
            raise TimeRangeError(f"tau={tau} is not a stored node")
        return k

    def f_at(self, tau):
        """``f`` at ``tau``, linearly interpolated between stored records."""
        taus = self.taus
        if tau < taus[0] - 1e-12 or tau > taus[-1] + 1e-12:
            raise TimeRangeError(f"tau={tau} outside [{taus[0]}, {taus[-1]}]")
        k = int(np.searchsorted(taus, tau))
        if k < len(taus) and abs(taus[k] - tau) <= 1e-12 * max(1.0, tau):
            return self.f[k]
        if k > 0 and abs(taus[k - 1] - tau) <= 1e-12 * max(1.0, tau):
            return self.f[k - 1]
        w = (tau - taus[k - 1]) / (taus[k] - taus[k - 1])
        return (1 - w) * self.f[k - 1] + w * self.f[k]

    def u_at(self, tau):
        return -np.log(self.f_at(tau))

    def v_at(self, tau):
        return self.u_at(tau) - 0.5 * self.n * np.log(4 * np.pi * tau)

    def log_field(self, tau, variant="u"):
        return self.u_at(tau) if variant == "u" else self.v_at(tau)

    def state(self, k, traj):
        """Metric matching record ``k``."""
        node = int(self.node_index[k])
        if node < 0:
            return traj.state_at(self.T - self.taus[k])
        return traj.state(node)


@dataclass(frozen=True)
class HeatSeries:
    """Forward heat solution ``h(., t)`` on stored nodes."""
    spec: object
    times: np.ndarray
    h: np.ndarray
    node_index: np.ndarray


def _rhs(f, m, c):
    out = laplacian(f, m)
    if c:
        out = out + c * m.R * f
    return out


def solve_backward(traj, c, f_init, tau_end=None, *, store_every=1, safety=CFL_SAFETY):
    """Solve ``df/dtau = Lap f + c R f`` for ``tau`` in ``[tau0, tau_end]``.

    Steps coincide with the trajectory nodes; midpoint stages use the
    interpolated metric.  If ``tau_end`` is not a node a final partial step
    lands on it (record node index -1).  Records are kept every
    ``store_every`` nodes plus the final one.
    """
    spec = traj.spec
    f = check_field(f_init, spec).copy()
    if not np.all(f > 0):
        raise PositivityError("initial data must be positive", index=0, tau=traj.tau0)
    tau_end = traj.T if tau_end is None else float(tau_end)
    if tau_end > traj.T + 1e-12 or tau_end < traj.tau0 - 1e-12:
        raise TimeRangeError(f"tau_end={tau_end} outside [{traj.tau0}, {traj.T}]")
    # tau increases as the node index decreases
    K = len(traj) - 1
    t_stop = traj.T - tau_end
    k_last, exact = traj.locate(max(t_stop, traj.times[0]))
    if not exact:
        k_last += 1

    taus, records, nodes = [], [], []

    def keep(node, tau, f):
        taus.append(tau)
        records.append(f.copy())
        nodes.append(node)

    def step(f, m_a, m_mid, m_b, dt):
        k1 = _rhs(f, m_a, c)
        k2 = _rhs(f + 0.5 * dt * k1, m_mid, c)
        k3 = _rhs(f + 0.5 * dt * k2, m_mid, c)
        k4 = _rhs(f + dt * k3, m_b, c)
        f = f + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(f > 0):
            bad = np.unravel_index(int(np.argmin(f)), f.shape) if f.ndim else ()
            tau = traj.T - m_b.t
            raise PositivityError(
                f"solution lost positivity at tau={tau:.6g}, node {bad}",
                index=None, tau=tau, location=bad)
        return f

    keep(K, traj.T - traj.times[K], f)
    m_a = traj.state(K)
    count = 0
    for k in range(K, k_last, -1):
        t_a, t_b = traj.times[k], traj.times[k - 1]
        dt = t_a - t_b
        _check_cfl(dt, m_a, safety)
        m_b = traj.state(k - 1)
        f = step(f, m_a, traj.state_at(0.5 * (t_a + t_b)), m_b, dt)
        m_a = m_b
        count += 1
        if count % store_every == 0 or k - 1 == k_last:
            keep(k - 1, traj.T - t_b, f)
    if not exact and k_last <= K:
        # partial step onto tau_end itself
        dt = traj.times[k_last] - t_stop
        if dt > 0:
            _check_cfl(dt, m_a, safety)
            t_a = traj.times[k_last]
            f = step(f, m_a, traj.state_at(t_a - 0.5 * dt), traj.state_at(t_stop), dt)
            keep(-1, tau_end, f)
    return LogSolution(spec, float(c), traj.T, np.array(taus), np.array(records),
                       np.array(nodes))


def solve_forward_heat(traj, h_init, t_end=None, *, store_every=1, nodes=None,
                       safety=CFL_SAFETY):
    """Solve ``dh/dt = Lap_{g(t)} h`` from ``t = 0`` along the stored nodes.

    Records are kept every ``store_every`` nodes plus the final node.  Any
    trajectory node listed in ``nodes`` is kept as well.
    """
    spec = traj.spec
    extra = set() if nodes is None else {int(k) for k in nodes}
    h = check_field(h_init, spec).copy()
    t_end = traj.t_end if t_end is None else float(t_end)
    k_end, exact = traj.locate(t_end)
    times, records, nodes = [0.0], [h.copy()], [0]
    m_a = traj.state(0)
    for k in range(k_end):
        t_a, t_b = traj.times[k], traj.times[k + 1]
        dt = t_b - t_a
        _check_cfl(dt, m_a, safety)
        m_mid = traj.state_at(0.5 * (t_a + t_b))
        m_b = traj.state(k + 1)
        k1 = laplacian(h, m_a)
        k2 = laplacian(h + 0.5 * dt * k1, m_mid)
        k3 = laplacian(h + 0.5 * dt * k2, m_mid)
        k4 = laplacian(h + dt * k3, m_b)
        h = h + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        m_a = m_b
        if (k + 1) % store_every == 0 or k + 1 == k_end or k + 1 in extra:
            times.append(t_b)
            records.append(h.copy())
            nodes.append(k + 1)
    return HeatSeries(spec, np.array(times), np.array(records), np.array(nodes))


def _distance_sq(spec, center):
    coords = spec.coordinates()
    if spec.kind == "torus":
        L = spec.length
        total = 0.0
        for x, c0 in zip(coords, np.broadcast_to(center, (2,))):
            d = (x - c0 + L / 2) % L - L / 2
            total = total + d * d
        return total
    if spec.kind == "circle":
        L = spec.length
        d = (coords - float(center) + L / 2) % L - L / 2
        return d * d
    return (coords - float(center)) ** 2


def init_near_delta(spec, center, sigma, state=None):
    """Positive Gaussian bump normalised to unit mass for ``state``.

    ``state`` defaults to the background metric (phi = 0, radius r0).  On the
    round sphere only homogeneous data exist, so the result is ``1 / vol``.
    On the polar grid ``center`` is a polar angle; a pole gives a geodesic ball.
    """
    from .geometry import MetricState

    if state is None:
        state = MetricState(spec, 0.0, spec.default_dof())
    if spec.kind == "round_sphere":
        return np.asarray(1.0 / state.volume)
    h = spec.spacing
    if sigma < 3 * h:
        raise ValueError(f"sigma={sigma} is below 3 grid spacings ({3 * h:.4g})")
    bump = np.exp(-_distance_sq(spec, center) / (2 * sigma ** 2))
    return bump / integrate(bump, state)


def total_mass(sol, traj):
    """integral of f d mu at every stored record."""
    return np.array([integrate(sol.f[k], sol.state(k, traj)) for k in range(len(sol))])


def pairing_series(sol, heat, traj):
    """integral of h f d mu at the nodes stored by both solutions."""
    common = np.intersect1d(sol.node_index, heat.node_index)
    f_pos = {k: i for i, k in enumerate(sol.node_index)}
    h_pos = {k: i for i, k in enumerate(heat.node_index)}
    values = np.array([integrate(sol.f[f_pos[k]] * heat.h[h_pos[k]], traj.state(k))
                       for k in common])
    return traj.times[common], values
