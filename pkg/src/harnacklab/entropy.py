"""Entropy functionals F (potential 2R) and W (conjugate heat equation).

Both are ``int_M tau^2 H f dmu`` with the Harnack quantity of the matching
equation, assembled post hoc from stored solution records.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterMismatchError
from .geometry import integrate
from .harnack import harnack_field, preset

_KINDS = {"F": ("THM_1_1", -2.0), "W": ("THM_1_3", -1.0)}


@dataclass(frozen=True)
class EntropyValue:
    kind: str
    T: float
    taus: np.ndarray
    values: np.ndarray
    ddt: np.ndarray
    min_R: float = float("nan")

    @property
    def times(self):
        return self.T - self.taus


@dataclass
class MonotonicityReport:
    kind: str
    passed: bool
    min_slope: float
    worst_step: int
    tolerance: float
    slopes: np.ndarray = field(default_factory=lambda: np.empty(0))


def eval_entropy(kind, sol, traj):
    """Entropy per stored tau with its discrete t-derivative (d/dt = -d/dtau)."""
    try:
        name, c = _KINDS[kind]
    except KeyError:
        raise ValueError(f"entropy kind must be 'F' or 'W', got {kind!r}") from None
    if sol.c != c:
        raise ParameterMismatchError(f"{kind} needs the c = {c:g} equation, got c = {sol.c:g}")
    p = preset(name)
    values = np.empty(len(sol))
    min_R = np.inf
    for k, tau in enumerate(sol.taus):
        m = sol.state(k, traj)
        f = sol.f[k]
        H = harnack_field(p, -np.log(f), m, tau)
        values[k] = tau ** 2 * integrate(H * f, m)
        min_R = min(min_R, float(np.min(m.R)))
    if len(values) >= 3:
        ddt = -np.gradient(values, sol.taus, edge_order=2)
    elif len(values) == 2:
        ddt = -np.gradient(values, sol.taus)
    else:
        ddt = np.full(1, np.nan)
    return EntropyValue(kind, sol.T, sol.taus.copy(), values, ddt, min_R)


def monotonicity_report(e, tolerance=None):
    """Pass iff every slope between consecutive times is >= -tolerance.

    The default tolerance is ``1e-8 (1 + |value|)`` evaluated per step.
    """
    if len(e.values) < 3:
        raise ValueError("need at least three time nodes")
    # consecutive slopes in increasing t, i.e. decreasing tau
    order = np.argsort(-e.taus)
    t = -e.taus[order]
    vals = e.values[order]
    slopes = np.diff(vals) / np.diff(t)
    if tolerance is None:
        tol = 1e-8 * (1 + np.maximum(np.abs(vals[1:]), np.abs(vals[:-1])))
    else:
        tol = np.full(len(slopes), float(tolerance))
    worst = int(np.argmin(slopes + tol))
    return MonotonicityReport(e.kind, bool(np.all(slopes >= -tol)), float(np.min(slopes)),
                              worst, float(np.max(tol)), slopes)
