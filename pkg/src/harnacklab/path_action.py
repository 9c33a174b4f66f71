"""Space-time action of paths and the integrated (two-point) Harnack bounds.

Paths are piecewise linear in lifted coordinates.  On the round sphere
(homogeneous mode) the coordinate is the arc angle along a great circle.
The action

    Gamma = int (w |gamma'|^2_{g(t)} + R(gamma(t), t)) dt,   w in {1/2, 1}

is integrated by the trapezoidal rule on the path samples.  Fields at
off-grid points come from trigonometric interpolation, so values and
gradients are mutually consistent for the line search.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import ParameterMismatchError, TimeRangeError

WEIGHTS = {"half": 0.5, "one": 1.0}


@dataclass(frozen=True)
class SpaceTimePath:
    points: np.ndarray   # (K+1, dim) lifted coordinates
    times: np.ndarray    # (K+1,)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        times = np.asarray(self.times, dtype=float)
        if len(times) != len(pts) or len(times) < 2:
            raise ValueError("path needs matching points and times, at least two samples")
        if np.any(np.diff(times) <= 0):
            raise ValueError("path times must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "times", times)

    @classmethod
    def chord(cls, x1, t1, x2, t2, segments=64):
        s = np.linspace(0.0, 1.0, segments + 1)[:, None]
        x1 = np.atleast_1d(np.asarray(x1, dtype=float))
        x2 = np.atleast_1d(np.asarray(x2, dtype=float))
        return cls(x1 + s * (x2 - x1), t1 + s[:, 0] * (t2 - t1))


@dataclass(frozen=True)
class ActionValue:
    gamma: float
    weight: str
    path: SpaceTimePath
    converged: bool = True
    iterations: int = 0
    image: tuple = ()


def _dim(spec):
    if spec.kind == "torus":
        return 2
    if spec.kind in ("circle", "round_sphere"):
        return 1
    raise NotImplementedError(f"paths are not supported on {spec.kind}")


def _period(spec):
    return 2 * np.pi if spec.kind == "round_sphere" else spec.length


class _PathFields:
    """Conformal factor and scalar curvature along fixed sample times."""

    def __init__(self, traj, times):
        self.spec = spec = traj.spec
        _dim(spec)
        states = [traj.state_at(t) for t in times]
        self.kind = spec.kind
        if spec.kind == "round_sphere":
            self.E = np.array([float(s.conformal) for s in states])
            self.R = np.array([float(s.R) for s in states])
            return
        if spec.kind == "circle":
            self.E = np.array([float(s.conformal[0]) for s in states])
            self.R = np.zeros(len(states))
            return
        N = spec.grid
        self.k = 2 * np.pi * np.fft.fftfreq(N, d=spec.spacing)
        if traj.stationary:
            self.cE = np.fft.fft2(states[0].conformal)[None] / N ** 2
            self.cR = np.fft.fft2(states[0].R)[None] / N ** 2
        else:
            self.cE = np.array([np.fft.fft2(s.conformal) for s in states]) / N ** 2
            self.cR = np.array([np.fft.fft2(s.R) for s in states]) / N ** 2

    def _eval(self, coef, x):
        ex = np.exp(1j * x[:, 0, None] * self.k)
        ey = np.exp(1j * x[:, 1, None] * self.k)
        if coef.shape[0] == 1:
            ax = np.einsum("ma,ab->mb", ex, coef[0])
        else:
            ax = np.einsum("ma,mab->mb", ex, coef)
        axk = np.einsum("ma,a->ma", ex * 1j, self.k)
        if coef.shape[0] == 1:
            axk = np.einsum("ma,ab->mb", axk, coef[0])
        else:
            axk = np.einsum("ma,mab->mb", axk, coef)
        val = np.real(np.sum(ax * ey, axis=1))
        gx = np.real(np.sum(axk * ey, axis=1))
        gy = np.real(np.sum(ax * ey * (1j * self.k), axis=1))
        return val, np.stack([gx, gy], axis=1)

    def sample(self, x):
        """(E, R, grad E, grad R) at the path samples ``x`` (K+1, dim)."""
        if self.kind != "torus":
            z = np.zeros_like(x)
            return self.E, self.R, z, z
        E, gE = self._eval(self.cE, x)
        R, gR = self._eval(self.cR, x)
        return E, R, gE, gR


def _action_and_grad(x, dt, fields, w):
    E, R, gE, gR = fields.sample(x)
    v = np.diff(x, axis=0) / dt[:, None]
    v2 = np.sum(v * v, axis=1)
    gamma = float(np.sum(0.5 * dt * (w * v2 * (E[:-1] + E[1:]) + R[:-1] + R[1:])))
    grad = np.zeros_like(x)
    grad[:-1] += 0.5 * dt[:, None] * (gR[:-1] + w * v2[:, None] * gE[:-1])
    grad[1:] += 0.5 * dt[:, None] * (gR[1:] + w * v2[:, None] * gE[1:])
    flux = w * (E[:-1] + E[1:])[:, None] * v
    grad[1:] += flux
    grad[:-1] -= flux
    return gamma, grad


def _check_times(path, traj):
    lo, hi = traj.times[0], traj.times[-1]
    eps = 1e-12 * max(1.0, traj.T)
    if path.times[0] < lo - eps or path.times[-1] > hi + eps:
        raise TimeRangeError("path leaves the trajectory time range")


def action(path, traj, weight="half"):
    """Trapezoidal action of ``path`` with the metric-weighted velocity."""
    w = WEIGHTS[weight]
    _check_times(path, traj)
    fields = _PathFields(traj, path.times)
    gamma, _ = _action_and_grad(path.points, np.diff(path.times), fields, w)
    return ActionValue(gamma, weight, path)


def _descend(x, dt, fields, w, tol, max_iter):
    """Preconditioned gradient descent on the interior samples."""
    K = len(dt)
    gamma, grad = _action_and_grad(x, dt, fields, w)
    if K < 2:
        return x, gamma, True, 0
    scale = 2 * w * float(np.mean(fields.sample(x)[0]))
    inv = 1.0 / dt
    ab = np.zeros((3, K - 1))
    ab[1] = scale * (inv[:-1] + inv[1:])
    ab[0, 1:] = -scale * inv[1:-1]
    ab[2, :-1] = -scale * inv[1:-1]
    for it in range(max_iter):
        g = grad[1:-1]
        if np.max(np.abs(g)) <= tol:
            return x, gamma, True, it
        d = solve_banded((1, 1), ab, g)
        slope = float(np.sum(g * d))
        step = 1.0
        while step > 1e-12:
            trial = x.copy()
            trial[1:-1] -= step * d
            g_new, grad_new = _action_and_grad(trial, dt, fields, w)
            if g_new <= gamma - 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            return x, gamma, False, it
        x, gamma, grad = trial, g_new, grad_new
    return x, gamma, bool(np.max(np.abs(grad[1:-1])) <= tol), max_iter


def _images(spec, x1, x2):
    """Nearest periodic image of x2 to x1 and its neighbouring images."""
    P = _period(spec)
    dim = len(x1)
    base = x1 + (x2 - x1 + P / 2) % P - P / 2
    for off in itertools.product((0, -1, 1), repeat=dim):
        yield tuple(off), base + P * np.array(off, dtype=float)


def minimize_action(p1, p2, traj, weight="half", segments=64, tol=1e-8, max_iter=10_000):
    """Upper bound for the infimum of the action between two space-time points.

    ``p1 = (x1, t1)`` and ``p2 = (x2, t2)`` with ``t1 < t2``.  Every periodic
    image in the 3^dim block around the nearest one is tried from its straight
    chord; the best local minimiser is returned.
    """
    (x1, t1), (x2, t2) = p1, p2
    if not t1 < t2:
        raise ValueError("need t1 < t2")
    w = WEIGHTS[weight]
    spec = traj.spec
    dim = _dim(spec)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float)).reshape(dim)
    x2 = np.atleast_1d(np.asarray(x2, dtype=float)).reshape(dim)
    chord0 = SpaceTimePath.chord(x1, t1, x1, t2, segments)
    _check_times(chord0, traj)
    fields = _PathFields(traj, chord0.times)
    dt = np.diff(chord0.times)
    best = None
    for off, target in _images(spec, x1, x2):
        x0 = SpaceTimePath.chord(x1, t1, target, t2, segments).points
        x, gamma, ok, its = _descend(x0, dt, fields, w, tol, max_iter)
        if best is None or gamma < best.gamma:
            best = ActionValue(gamma, weight, SpaceTimePath(x, chord0.times), ok, its, off)
    return best


# --- integrated Harnack inequalities -------------------------------------------

def _log_field_at(sol, x, t):
    """u = -ln f at the lifted point ``x`` and time ``t``."""
    spec = sol.spec
    tau = sol.T - t
    f = sol.f_at(tau)
    u = -np.log(f)
    if spec.kind == "round_sphere" or spec.kind == "circle" and np.ptp(u) == 0:
        return float(np.mean(u))
    N = spec.grid
    k = 2 * np.pi * np.fft.fftfreq(N, d=spec.spacing)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if spec.kind == "circle":
        c = np.fft.fft(u) / N
        return float(np.real(np.sum(c * np.exp(1j * k * x[0]))))
    c = np.fft.fft2(u) / N ** 2
    ex = np.exp(1j * k * x[0])
    ey = np.exp(1j * k * x[1])
    return float(np.real(ex @ c @ ey))


@dataclass
class PairResult:
    p1: tuple
    p2: tuple
    gamma_hat: float
    converged: bool
    endpoint_margin: float      # log(RHS) - log(LHS)
    path_min_margin: float
    passed: bool


@dataclass
class IntegratedReport:
    c: float
    weight: str
    pairs: list = field(default_factory=list)
    tolerance: float = 1e-6

    @property
    def passed(self):
        return all(p.passed for p in self.pairs)

    @property
    def min_endpoint_margin(self):
        return min((p.endpoint_margin for p in self.pairs), default=np.inf)

    @property
    def min_path_margin(self):
        return min((p.path_min_margin for p in self.pairs), default=np.inf)


def random_paths(spec, p1, p2, count, rng, segments=64, modes=3, amplitude=0.15):
    """Smooth random paths between two space-time points (nearest image)."""
    (x1, t1), (x2, t2) = p1, p2
    dim = _dim(spec)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float)).reshape(dim)
    x2 = np.atleast_1d(np.asarray(x2, dtype=float)).reshape(dim)
    P = _period(spec)
    target = next(_images(spec, x1, x2))[1]
    base = SpaceTimePath.chord(x1, t1, target, t2, segments)
    s = np.linspace(0.0, 1.0, segments + 1)
    basis = np.sin(np.pi * np.outer(s, np.arange(1, modes + 1)))
    for _ in range(count):
        amps = rng.normal(scale=amplitude * P, size=(modes, dim))
        yield SpaceTimePath(base.points + basis @ amps, base.times)


def verify_integrated(sol, traj, pairs, weight=None, n_random=100, seed=42, segments=64,
                      tolerance=1e-6):
    """Two-point Harnack inequalities for the potential-2R and conjugate heat equations.

    For every pair: (i) the endpoint bound with the minimised action, and
    (ii) the per-path bound ``u1 - u2 <= s * A(path) + n ln(tau1/tau2)`` on
    ``n_random`` seeded random paths, where ``s = 1`` for the half weight
    (c = -2) and ``s = 1/2`` for the unit weight (c = -1).
    """
    expected = {-2.0: "half", -1.0: "one"}.get(float(sol.c))
    if expected is None:
        raise ParameterMismatchError("integrated bounds exist for c = -2 and c = -1 only")
    weight = expected if weight is None else weight
    if weight != expected:
        raise ParameterMismatchError(f"c = {sol.c:g} pairs with weight {expected!r}")
    factor = 1.0 if weight == "half" else 0.5
    n = sol.n
    rng = np.random.default_rng(seed)
    report = IntegratedReport(sol.c, weight, tolerance=tolerance)
    for p1, p2 in pairs:
        (x1, t1), (x2, t2) = p1, p2
        log_tau = np.log((traj.T - t1) / (traj.T - t2))
        du = _log_field_at(sol, x1, t1) - _log_field_at(sol, x2, t2)
        best = minimize_action(p1, p2, traj, weight, segments)
        endpoint = factor * best.gamma + n * log_tau - du
        margins = [factor * action(path, traj, weight).gamma + n * log_tau - du
                   for path in random_paths(traj.spec, p1, p2, n_random, rng, segments)]
        path_min = min(margins, default=np.inf)
        report.pairs.append(PairResult(
            tuple(map(float, np.atleast_1d(x1))) + (float(t1),),
            tuple(map(float, np.atleast_1d(x2))) + (float(t2),),
            best.gamma, best.converged, float(endpoint), float(path_min),
            bool(endpoint >= -tolerance and path_min >= -tolerance)))
    return report


@dataclass
class WeightCrosscheck:
    margin_half: float    # Gamma with weight 1/2 entering as e^Gamma
    margin_one: float     # Gamma with weight 1 entering as e^(Gamma/2)
    agree: bool


def weight_form_crosscheck(sol, traj, p1, p2, segments=64):
    """Evaluate both two-point forms for a conjugate heat solution.

    The two forms are not equivalent in general; the result only flags
    whether they reach the same verdict at this pair.
    """
    if float(sol.c) != -1.0:
        raise ParameterMismatchError("the cross-check applies to the conjugate heat equation")
    (x1, t1), (x2, t2) = p1, p2
    log_tau = sol.n * np.log((traj.T - t1) / (traj.T - t2))
    du = _log_field_at(sol, x1, t1) - _log_field_at(sol, x2, t2)
    half = minimize_action(p1, p2, traj, "half", segments).gamma + log_tau - du
    one = 0.5 * minimize_action(p1, p2, traj, "one", segments).gamma + log_tau - du
    return WeightCrosscheck(float(half), float(one), bool((half >= 0) == (one >= 0)))
