"""General Harnack quantities and their evolution equations.

For a log field ``w`` (``u = -ln f`` or ``v = u - (n/2) ln(4 pi tau)``) the
quantity is

    H = alpha Lap w - beta |grad w|^2 + a R + b w / tau + d n / tau.

Its tau-derivative along the coupled flow equals ``evolution_rhs``, written
either with the completed square ``|Hess w + kappa Rc - lam/(2 tau) g|^2``
or in the expanded form obtained before completing it.  Both are evaluated
from the same discrete operators so they agree to round-off.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (CoefficientDomainError, NoAdmissibleDError, ParameterMismatchError,
                     UnknownPresetError)
from .geometry import (grad_inner, hessian_defect, hessian_norm_sq, hessian_trace,
                       laplacian, ricci_uu)
from .ricci_flow import type_one_bound


@dataclass(frozen=True)
class HarnackParams:
    alpha: float
    beta: float
    a: float
    b: float
    c: float
    d: float
    lam: float
    variant: str = "u"
    name: str | None = None

    def __post_init__(self):
        if self.variant not in ("u", "v"):
            raise ValueError("variant must be 'u' or 'v'")

    def as_tuple(self):
        return (self.alpha, self.beta, self.a, self.b, self.c, self.d, self.lam)


_TABLE = {
    #            alpha beta  a    b    c    d   lam  variant
    "THM_1_1":   (2, 1, 2, 0, -2, -2, 2, "u"),
    "TYPE1_2R":  (2, 1, 2, 0, -2, -2, 2, "u"),
    "THM_1_3":   (2, 1, 1, 0, -1, -2, 2, "u"),
    "COR_3_1":   (2, 1, 1, 0, -1, -2, 2, "u"),
    "TYPE1_CHE": (2, 1, 1, 0, -1, -2, 2, "u"),
    "PERELMAN":  (2, 1, 1, 1, -1, -1, 1, "v"),
    "THMNPH":    (2, 1, 1, 0, -1, -2, 2, "v"),
    "GRADIENT":  (0, -1, 0, -1, 0, 0, 0, "u"),
}
PRESET_NAMES = ("THM_1_1", "TYPE1_2R", "THM_1_3", "TYPE1_CHE", "PERELMAN", "THMNPH",
                "GRADIENT")
TYPE1_PRESETS = ("TYPE1_2R", "TYPE1_CHE")
# presets whose theorem assumes R >= 0 along the flow
_NEEDS_NONNEG_R = ("THM_1_3", "COR_3_1", "TYPE1_CHE", "THMNPH", "GRADIENT")


def preset(name, d=None):
    """Coefficients of a named preset.

    For the Type I presets ``d`` is the constant in ``H = ... - d n / tau``
    (default 2).
    """
    try:
        alpha, beta, a, b, c, dd, lam, variant = _TABLE[name]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {name!r}") from None
    if name in TYPE1_PRESETS and d is not None:
        if d < 2:
            raise ValueError("Type I constant d must be at least 2")
        dd = -float(d)
    return HarnackParams(float(alpha), float(beta), float(a), float(b), float(c),
                         float(dd), float(lam), variant, name)


def _is_gradient(p):
    return p.name == "GRADIENT" or (p.as_tuple() == _TABLE["GRADIENT"][:7] and p.variant == "u")


# --- pointwise evaluation ------------------------------------------------------

def harnack_field(p, w, m, tau):
    """H (or P) for the log field ``w`` on metric ``m``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    n = m.n
    H = p.a * m.R + p.d * n / tau
    if p.alpha:
        H = H + p.alpha * laplacian(w, m)
    if p.beta:
        H = H - p.beta * grad_inner(w, w, m)
    if p.b:
        H = H + p.b * w / tau
    return np.broadcast_to(H, m.spec.shape).astype(float)


def _transport(H, w, m):
    return laplacian(H, m) - 2 * grad_inner(H, w, m)


def gradient_rhs(w, m, tau):
    """Right-hand side for H = |grad u|^2 - u/tau under the backward heat equation."""
    H = grad_inner(w, w, m) - w / tau
    return (_transport(H, w, m) - 4 * ricci_uu(w, m) - H / tau
            - 2 * hessian_norm_sq(w, m))


def harnack_rhs(p, w, m, tau, form="completed"):
    """dH/dtau predicted by the general evolution formula, term by term."""
    if _is_gradient(p):
        return gradient_rhs(w, m, tau)
    al, be, a, b, c, d, lam = p.as_tuple()
    n = m.n
    R = m.R
    q = 2 * al - 2 * be
    H = harnack_field(p, w, m, tau)
    gw2 = grad_inner(w, w, m)
    common = (_transport(H, w, m)
              - 2 * (al - 2 * be) * R / n * gw2
              + 2 * (a + be * c) * grad_inner(R, w, m)
              - (al * c + 2 * a) * laplacian(R, m))
    if form == "completed":
        if al == 0 or q == 0:
            raise CoefficientDomainError(
                "completed-square form needs alpha != 0 and alpha != beta")
        k = q / al
        rhs = (common
               - q * hessian_defect(w, m, al / q, lam, tau)
               - k * lam / tau * H
               + q * n * lam ** 2 / (4 * tau ** 2)
               + (b - k * lam * be) * gw2 / tau
               + (al ** 2 / q - 2 * a) * R ** 2 / n
               + (k * lam - 1) * b * w / tau ** 2
               + (k * lam - 1) * d * n / tau ** 2
               + (k * a * lam - al * lam - b * c) * R / tau)
    elif form == "expanded":
        rhs = (common
               - q * hessian_norm_sq(w, m)
               + b * gw2 / tau
               - 2 * al * R / n * hessian_trace(w, m)
               - 2 * a * R ** 2 / n
               - b * w / tau ** 2
               - d * n / tau ** 2
               - b * c * R / tau)
    else:
        raise ValueError(f"unknown form {form!r}")
    if p.variant == "v":
        rhs = rhs - b * n / (2 * tau ** 2)
    return np.broadcast_to(rhs, m.spec.shape).astype(float)


def _check_c(p, sol):
    if p.c != sol.c:
        raise ParameterMismatchError(
            f"preset {p.name or p.as_tuple()} has c={p.c}, solution has c={sol.c}")


def eval_H(p, sol, m, tau):
    """H or P of ``sol`` at ``tau`` on metric ``m``."""
    _check_c(p, sol)
    return harnack_field(p, sol.log_field(tau, p.variant), m, tau)


def eval_rhs(p, sol, m, tau, form="completed"):
    """Evolution right-hand side for ``sol`` at ``tau``.

    The GRADIENT preset is routed to ``rhs_gradient``.
    """
    if _is_gradient(p):
        return rhs_gradient(sol, m, tau)
    _check_c(p, sol)
    return harnack_rhs(p, sol.log_field(tau, p.variant), m, tau, form)


def rhs_gradient(sol, m, tau):
    if sol.c != 0:
        raise ParameterMismatchError("gradient estimate needs the c = 0 equation")
    return gradient_rhs(sol.u_at(tau), m, tau)


# --- reports -------------------------------------------------------------------

@dataclass
class HarnackReport:
    name: str
    status: str
    tolerance: float = float("nan")
    worst_value: float = float("nan")
    worst_location: tuple = ()
    taus: np.ndarray = field(default_factory=lambda: np.empty(0))
    max_by_tau: np.ndarray = field(default_factory=lambda: np.empty(0))
    spacings: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    relative_residuals: list = field(default_factory=list)
    order: float = float("nan")
    hypotheses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.status == "pass"


def _record_fields(p, sol, traj, k):
    tau = sol.taus[k]
    m = sol.state(k, traj)
    w = sol.f[k]
    w = -np.log(w)
    if p.variant == "v":
        w = w - 0.5 * sol.n * np.log(4 * np.pi * tau)
    return tau, m, w


def _fit_order(spacings, residuals):
    h = np.asarray(spacings, dtype=float)
    r = np.asarray(residuals, dtype=float)
    if len(h) < 2 or not np.all(np.isfinite(h)) or len(np.unique(h)) < 2 or np.any(r <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(h), np.log(r), 1)
    return float(slope)


def residual_study(p, runs, min_order=1.8):
    """Residual of the evolution identity on several grid levels.

    ``runs`` is a sequence of ``(sol, traj)`` pairs describing the same
    scenario at different resolutions.  The tau-derivative of H is taken by
    second-order differences on the stored tau nodes.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("need at least one run")
    ref_sol, ref_traj = runs[0]
    for sol, traj in runs[1:]:
        if (traj.spec.kind != ref_traj.spec.kind or sol.c != ref_sol.c
                or abs(traj.T - ref_traj.T) > 1e-12
                or abs(sol.taus[0] - ref_sol.taus[0]) > 1e-9
                or abs(sol.taus[-1] - ref_sol.taus[-1]) > 1e-9):
            raise ParameterMismatchError("runs do not describe the same scenario")
    report = HarnackReport(name=p.name or str(p.as_tuple()), status="pass")
    for sol, traj in runs:
        if not _is_gradient(p):
            _check_c(p, sol)
        if len(sol) < 3:
            raise ValueError("need at least three stored tau nodes")
        Hs, rhss = [], []
        for k in range(len(sol)):
            tau, m, w = _record_fields(p, sol, traj, k)
            Hs.append(harnack_field(p, w, m, tau))
            rhss.append(harnack_rhs(p, w, m, tau))
        Hs = np.array(Hs)
        rhss = np.array(rhss)
        dH = np.gradient(Hs, sol.taus, axis=0, edge_order=2)
        res = float(np.max(np.abs(dH - rhss)))
        report.spacings.append(float(traj.spec.spacing))
        report.residuals.append(res)
        report.relative_residuals.append(res / max(1.0, float(np.max(np.abs(rhss)))))
    report.order = _fit_order(report.spacings, report.residuals)
    if len(runs) >= 2:
        if np.isnan(report.order):
            report.status = "degenerate"
            report.notes.append("convergence order undefined for these levels")
        elif report.order < min_order:
            report.status = "fail"
    report.worst_value = report.residuals[-1]
    report.tolerance = min_order
    return report


def check_hypotheses(p, sol, traj):
    """Hypotheses of the theorem behind preset ``p`` that can be checked numerically."""
    hyp = {}
    k_lo, k_hi = sorted((int(sol.node_index[0]), int(sol.node_index[-1])))
    if p.name in _NEEDS_NONNEG_R:
        if traj.stationary:
            min_R = float(np.min(traj.state(0).R))
        else:
            min_R = min(float(np.min(traj.state(k).R)) for k in range(k_lo, k_hi + 1))
        hyp["min_R"] = min_R
        hyp["nonnegative_R"] = bool(min_R >= -1e-12)
    if _is_gradient(p):
        f0 = sol.f[0]
        hyp["max_f"] = float(np.max(f0))
        hyp["f_below_one"] = bool(np.max(f0) < 1.0)
    if p.name in TYPE1_PRESETS:
        bound = type_one_bound(traj)
        hyp["d0"] = bound.d0
        hyp["type_one"] = bound.achieved
    tau, m, w = _record_fields(p, sol, traj, 0)
    h0 = float(np.max(harnack_field(p, w, m, tau)))
    hyp["initial_max"] = h0
    hyp["initially_negative"] = bool(h0 < 0)
    return hyp


def check_nonpositivity(p, sol, traj, tolerance=None):
    """Maximum of H over every stored node and tau; pass iff it is <= tolerance."""
    if not _is_gradient(p):
        _check_c(p, sol)
    elif sol.c != 0:
        raise ParameterMismatchError("gradient estimate needs the c = 0 equation")
    maxima = np.empty(len(sol))
    worst, where, abs_max = -np.inf, (), 0.0
    for k in range(len(sol)):
        tau, m, w = _record_fields(p, sol, traj, k)
        H = harnack_field(p, w, m, tau)
        i = int(np.argmax(H))
        maxima[k] = H.flat[i]
        abs_max = max(abs_max, float(np.max(np.abs(H))))
        if maxima[k] > worst:
            worst = float(maxima[k])
            where = (float(tau),) + tuple(int(j) for j in np.unravel_index(i, H.shape))
    tol = 1e-6 * (1 + abs_max) if tolerance is None else float(tolerance)
    hyp = check_hypotheses(p, sol, traj)
    flags = [v for key, v in hyp.items() if isinstance(v, bool)]
    if p.name == "PERELMAN":
        status = "informational"
    elif not all(flags):
        status = "hypotheses-unmet"
    else:
        status = "pass" if worst <= tol else "fail"
    return HarnackReport(name=p.name or str(p.as_tuple()), status=status, tolerance=tol,
                         worst_value=worst, worst_location=where, taus=sol.taus.copy(),
                         max_by_tau=maxima, hypotheses=hyp)


def choose_type1_d(sol, traj, d0=None, cap=100.0, step=0.5):
    """Smallest d in {2, 2.5, ..., cap} with H(., tau0) < 0 everywhere.

    ``d0`` is accepted for the record only; no closed form d(d0, n) is used.
    """
    if sol.c == -2:
        base = preset("TYPE1_2R")
    elif sol.c == -1:
        base = preset("TYPE1_CHE")
    else:
        raise ParameterMismatchError("Type I presets exist for c = -2 and c = -1 only")
    tau, m, w = _record_fields(base, sol, traj, 0)
    rest = float(np.max(harnack_field(replace(base, d=0.0), w, m, tau)))
    for d in np.arange(2.0, cap + step / 2, step):
        if rest - d * sol.n / tau < 0:
            return float(d)
    raise NoAdmissibleDError(f"no d <= {cap} makes H negative at tau0 (max rest {rest:.4g})")
