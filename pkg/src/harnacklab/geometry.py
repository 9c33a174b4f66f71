"""Reduced geometry backends.

Four closed manifolds are supported, each described by a single metric
degree of freedom:

``round_sphere``
    The round n-sphere of radius ``r``.  Only spatially homogeneous fields
    are allowed, so every field is a 0-d array and all spatial derivatives
    vanish.
``torus``
    The square 2-torus of side ``length`` with conformal metric
    ``exp(2 phi) (dx^2 + dy^2)`` sampled on an ``grid x grid`` periodic grid.
``rotsym_sphere``
    A rotationally symmetric 2-sphere ``exp(2 phi(theta)) g_round`` sampled on
    a staggered polar grid ``theta_j = (j + 1/2) pi / grid``.
``circle``
    A flat circle of length ``length`` (constant ``phi``), used for the
    one-dimensional heat-kernel baselines.

Fields are plain numpy arrays of shape ``spec.shape``.  Every metric here is
Einstein (Rc = R g / n), which the operators below rely on.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gamma, pi, sqrt

import numpy as np

from .errors import ShapeMismatchError

KINDS = ("round_sphere", "torus", "rotsym_sphere", "circle")


def sphere_area(n):
    """Volume of the unit n-sphere in R^{n+1}."""
    return 2.0 * pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


@dataclass(frozen=True)
class ManifoldSpec:
    kind: str
    n: int = 2
    grid: int = 64
    length: float = 1.0
    r0: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.kind in ("torus", "rotsym_sphere") and self.n != 2:
            raise ValueError(f"{self.kind} is two-dimensional, got n={self.n}")
        if self.kind == "circle" and self.n != 1:
            raise ValueError(f"circle is one-dimensional, got n={self.n}")
        if self.kind == "round_sphere" and self.n < 2:
            raise ValueError("round_sphere needs n >= 2")
        if self.kind != "round_sphere" and self.grid < 8:
            raise ValueError("grid needs at least 8 nodes per axis")
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.r0 <= 0:
            raise ValueError("r0 must be positive")

    @classmethod
    def round_sphere(cls, n=2, r0=1.0):
        return cls("round_sphere", n=n, r0=r0)

    @classmethod
    def torus(cls, grid=64, length=1.0):
        return cls("torus", n=2, grid=grid, length=length)

    @classmethod
    def rotsym_sphere(cls, grid=64):
        return cls("rotsym_sphere", n=2, grid=grid)

    @classmethod
    def circle(cls, grid=64, length=2 * pi):
        return cls("circle", n=1, grid=grid, length=length)

    @property
    def shape(self):
        if self.kind == "round_sphere":
            return ()
        if self.kind == "torus":
            return (self.grid, self.grid)
        return (self.grid,)

    @property
    def spacing(self):
        if self.kind == "round_sphere":
            return float("nan")
        if self.kind == "rotsym_sphere":
            return pi / self.grid
        return self.length / self.grid

    @property
    def periodic(self):
        return self.kind in ("torus", "circle")

    def coordinates(self):
        """Node coordinates: ``(X, Y)`` on the torus, ``x`` or ``theta`` in 1-D."""
        h = self.spacing
        if self.kind == "torus":
            x = np.arange(self.grid) * h
            return np.meshgrid(x, x, indexing="ij")
        if self.kind == "circle":
            return np.arange(self.grid) * h
        if self.kind == "rotsym_sphere":
            return (np.arange(self.grid) + 0.5) * h
        return None

    def zeros(self):
        return np.zeros(self.shape)

    def constant(self, k):
        return np.full(self.shape, float(k))

    def default_dof(self):
        if self.kind == "round_sphere":
            return float(self.r0)
        return self.zeros()


def check_field(field, spec):
    arr = np.asarray(field, dtype=float)
    if arr.shape != spec.shape:
        raise ShapeMismatchError(
            f"field shape {arr.shape} does not match {spec.kind} grid {spec.shape}")
    return arr


# --- background (phi = 0) stencils -------------------------------------------

def _polar_weights(N):
    h = pi / N
    edges = np.arange(N + 1) * h
    s_edge = np.sin(edges)
    s_edge[0] = 0.0
    s_edge[-1] = 0.0
    cell = np.cos(edges[:-1]) - np.cos(edges[1:])
    return h, s_edge, cell


_POLAR_CACHE = {}


def _polar(N):
    if N not in _POLAR_CACHE:
        _POLAR_CACHE[N] = _polar_weights(N)
    return _POLAR_CACHE[N]


def _reflect(f):
    # ghost values mirrored across each pole
    return np.concatenate(([f[0]], f[:-1])), np.concatenate((f[1:], [f[-1]]))


def _roll(f, s, axis=0):
    """np.roll by +-1 without its per-call overhead."""
    out = np.empty_like(f)
    src = [slice(None)] * f.ndim
    dst = [slice(None)] * f.ndim
    if s == 1:
        dst[axis], src[axis] = slice(1, None), slice(None, -1)
        out[tuple(dst)] = f[tuple(src)]
        dst[axis], src[axis] = slice(0, 1), slice(-1, None)
    else:
        dst[axis], src[axis] = slice(None, -1), slice(1, None)
        out[tuple(dst)] = f[tuple(src)]
        dst[axis], src[axis] = slice(-1, None), slice(0, 1)
    out[tuple(dst)] = f[tuple(src)]
    return out


def _periodic_laplacian(f, h):
    out = -2.0 * f.ndim * f
    out[1:] += f[:-1]
    out[:1] += f[-1:]
    out[:-1] += f[1:]
    out[-1:] += f[:1]
    if f.ndim == 2:
        out[:, 1:] += f[:, :-1]
        out[:, :1] += f[:, -1:]
        out[:, :-1] += f[:, 1:]
        out[:, -1:] += f[:, :1]
    out *= 1.0 / (h * h)
    return out


def background_laplacian(f, spec):
    """Laplacian of ``f`` for the background metric (phi = 0)."""
    if spec.kind == "round_sphere":
        return np.zeros(())
    h = spec.spacing
    if spec.periodic:
        return _periodic_laplacian(np.asarray(f, dtype=float), h)
    h, s_edge, cell = _polar(spec.grid)
    fm, fp = _reflect(f)
    return (s_edge[1:] * (fp - f) - s_edge[:-1] * (f - fm)) / (h * cell)


def background_gradient(f, spec):
    """Coordinate gradient components, as a tuple of arrays."""
    h = spec.spacing
    if spec.kind == "torus":
        return ((_roll(f, -1, 0) - _roll(f, 1, 0)) / (2 * h),
                (_roll(f, -1, 1) - _roll(f, 1, 1)) / (2 * h))
    if spec.kind == "circle":
        return ((_roll(f, -1) - _roll(f, 1)) / (2 * h),)
    if spec.kind == "rotsym_sphere":
        fm, fp = _reflect(f)
        return ((fp - fm) / (2 * h),)
    return ()


def _background_hessian(f, spec):
    """Hessian components of the background metric in an orthonormal frame.

    Returns ``(diag_components, offdiag)`` where offdiag is None in 1-D
    settings.  On the polar grid the azimuthal component is defined as the
    remainder of the conservative Laplacian so that the trace is exact.
    """
    h = spec.spacing
    if spec.kind == "torus":
        fxx = (_roll(f, -1, 0) - 2 * f + _roll(f, 1, 0)) / (h * h)
        fyy = (_roll(f, -1, 1) - 2 * f + _roll(f, 1, 1)) / (h * h)
        fpp = _roll(_roll(f, -1, 0), -1, 1)
        fpm = _roll(_roll(f, -1, 0), 1, 1)
        fmp = _roll(_roll(f, 1, 0), -1, 1)
        fmm = _roll(_roll(f, 1, 0), 1, 1)
        fxy = (fpp - fpm - fmp + fmm) / (4 * h * h)
        return [fxx, fyy], fxy
    if spec.kind == "circle":
        return [(_roll(f, -1) - 2 * f + _roll(f, 1)) / (h * h)], None
    fm, fp = _reflect(f)
    ftt = (fp - 2 * f + fm) / (h * h)
    return [ftt, background_laplacian(f, spec) - ftt], None


# --- metric state ------------------------------------------------------------

class MetricState:
    """Metric at one instant with curvature computed at construction.

    ``dof`` is the radius on ``round_sphere`` and the conformal exponent
    field ``phi`` on the other backends.
    """

    def __init__(self, spec, t, dof):
        self.spec = spec
        self.t = float(t)
        n = spec.n
        if spec.kind == "round_sphere":
            r = float(dof)
            if not r > 0:
                raise ValueError(f"radius must be positive, got {r}")
            self.dof = np.asarray(r)
            self.radius = r
            self.conformal = np.asarray(r * r)
            self.R = np.asarray(n * (n - 1) / (r * r))
            self.weights = np.asarray(sphere_area(n) * r ** n)
        else:
            phi = check_field(dof, spec).copy()
            if not np.all(np.isfinite(phi)):
                raise ValueError("conformal exponent must be finite")
            if spec.kind == "circle" and np.ptp(phi) > 0:
                raise ValueError("circle backend only supports constant phi")
            self.dof = phi
            self.conformal = np.exp(2 * phi)
            self.inv_conformal = 1.0 / self.conformal
            if spec.kind == "torus":
                self.R = -2.0 * self.inv_conformal * background_laplacian(phi, spec)
                self.weights = self.conformal * spec.spacing ** 2
            elif spec.kind == "circle":
                self.R = np.zeros(spec.shape)
                self.weights = self.conformal * spec.spacing
            else:
                self.R = self.inv_conformal * (2.0 - 2.0 * background_laplacian(phi, spec))
                _, _, cell = _polar(spec.grid)
                self.weights = 2 * pi * cell * self.conformal
        for arr in (self.dof, self.conformal, self.R, self.weights):
            arr.setflags(write=False)

    @property
    def n(self):
        return self.spec.n

    @cached_property
    def _dphi(self):
        return background_gradient(self.dof, self.spec)

    @property
    def ricci_norm_sq(self):
        """|Rc|^2 = R^2 / n for an Einstein metric."""
        return self.R ** 2 / self.n

    @property
    def volume(self):
        return float(np.sum(self.weights))

    def __repr__(self):
        return f"MetricState({self.spec.kind}, t={self.t:.6g})"


# --- operators ---------------------------------------------------------------

def laplacian(field, m):
    """Laplace-Beltrami operator of ``g(t)``."""
    f = check_field(field, m.spec)
    if m.spec.kind == "round_sphere":
        return np.zeros(())
    return m.inv_conformal * background_laplacian(f, m.spec)


def grad_inner(a, b, m):
    """Pointwise ``g(grad a, grad b)``."""
    fa = check_field(a, m.spec)
    fb = check_field(b, m.spec)
    if m.spec.kind == "round_sphere":
        return np.zeros(())
    ga = background_gradient(fa, m.spec)
    gb = ga if b is a else background_gradient(fb, m.spec)
    return m.inv_conformal * sum(x * y for x, y in zip(ga, gb))


def _covariant_hessian(u, m):
    """Covariant Hessian of u in the background orthonormal frame."""
    spec = m.spec
    diag, off = _background_hessian(u, spec)
    if spec.kind == "circle":
        return diag, off
    du = background_gradient(u, spec)
    dphi = m._dphi
    if spec.kind == "torus":
        ux, uy = du
        px, py = dphi
        cross = px * ux + py * uy
        hxx = diag[0] - 2 * px * ux + cross
        hyy = diag[1] - 2 * py * uy + cross
        hxy = off - px * uy - py * ux
        return [hxx, hyy], hxy
    pt_ut = dphi[0] * du[0]
    return [diag[0] - pt_ut, diag[1] + pt_ut], None


def _shifted_norm_sq(u, m, shift):
    """|Hess u + shift * g|^2_g with shift a scalar or field."""
    if m.spec.kind == "round_sphere":
        return m.n * np.asarray(shift) ** 2
    diag, off = _covariant_hessian(u, m)
    total = sum((d + shift * m.conformal) ** 2 for d in diag)
    if off is not None:
        total = total + 2 * off ** 2
    return total * m.inv_conformal ** 2


def hessian_norm_sq(field, m):
    """|grad grad u|^2 measured in g."""
    return _shifted_norm_sq(check_field(field, m.spec), m, 0.0)


def hessian_trace(field, m):
    """g^{ij} grad_i grad_j u, built from the Hessian components."""
    u = check_field(field, m.spec)
    if m.spec.kind == "round_sphere":
        return np.zeros(())
    diag, _ = _covariant_hessian(u, m)
    return m.inv_conformal * sum(diag)


def hessian_defect(field, m, kappa, lam, tau):
    """Pointwise |grad grad u + kappa Rc - lam/(2 tau) g|^2 in the metric g."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    u = check_field(field, m.spec)
    shift = kappa * m.R / m.n - lam / (2.0 * tau)
    return _shifted_norm_sq(u, m, shift)


def ricci_uu(field, m):
    """Rc(grad u, grad u)."""
    return m.R / m.n * grad_inner(field, field, m)


def integrate(field, m):
    """Integral of ``field`` against the Riemannian measure of ``g(t)``."""
    f = check_field(field, m.spec)
    return float(np.sum(f * m.weights))


def rm_norm_constant(n):
    """Constant C with |Rm| := C |R| (documented convention, sqrt(2)/2 in 2-D)."""
    if n < 2:
        return 0.0
    return 1.0 / sqrt(n * (n - 1))
