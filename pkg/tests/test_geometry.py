import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harnacklab import (ManifoldSpec, MetricState, ShapeMismatchError, grad_inner,
                        hessian_defect, hessian_norm_sq, integrate, laplacian, rm_norm_constant)
from harnacklab.geometry import hessian_trace, ricci_uu, sphere_area


def flat(spec):
    return MetricState(spec, 0.0, spec.default_dof())


def test_laplacian_of_constant_vanishes():
    for spec in (ManifoldSpec.torus(16), ManifoldSpec.rotsym_sphere(16), ManifoldSpec.circle(16)):
        assert np.max(np.abs(laplacian(spec.constant(3.0), flat(spec)))) < 1e-12


def test_flat_laplacian_of_sine_converges_at_second_order():
    errs = []
    for N in (16, 32, 64):
        spec = ManifoldSpec.torus(N)
        X, _ = spec.coordinates()
        lap = laplacian(np.sin(2 * np.pi * X), flat(spec))
        errs.append(np.max(np.abs(lap + 4 * np.pi ** 2 * np.sin(2 * np.pi * X))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.9)


def test_conformal_scaling_of_laplacian_and_gradient():
    spec = ManifoldSpec.torus(32)
    X, Y = spec.coordinates()
    f = np.sin(2 * np.pi * X) * np.cos(4 * np.pi * Y)
    m0 = flat(spec)
    m = MetricState(spec, 0.0, spec.constant(np.log(2.0)))
    np.testing.assert_allclose(laplacian(f, m), 0.25 * laplacian(f, m0), atol=1e-12)
    np.testing.assert_allclose(grad_inner(f, f, m), 0.25 * grad_inner(f, f, m0), atol=1e-12)


def test_grad_inner_flat_oracle():
    spec = ManifoldSpec.torus(128)
    X, _ = spec.coordinates()
    s = np.sin(2 * np.pi * X)
    g = grad_inner(s, s, flat(spec))
    assert np.max(np.abs(g - 4 * np.pi ** 2 * np.cos(2 * np.pi * X) ** 2)) < 0.1
    assert np.max(np.abs(grad_inner(spec.constant(1.0), s, flat(spec)))) == 0


def test_hessian_defect_constant_field_is_zero():
    spec = ManifoldSpec.torus(16)
    out = hessian_defect(spec.constant(2.0), flat(spec), kappa=0.7, lam=0.0, tau=0.5)
    assert np.max(np.abs(out)) == 0


def test_hessian_defect_on_sphere_einstein_closed_form():
    # R = n/(2 tau): |(R/n - 1/tau) g|^2 = n/(4 tau^2)
    tau = 0.5
    spec = ManifoldSpec.round_sphere(2, np.sqrt(2 * tau))
    m = MetricState(spec, 0.0, spec.r0)
    val = hessian_defect(np.asarray(0.3), m, kappa=1.0, lam=2.0, tau=tau)
    assert abs(float(val) - 2 / (4 * tau ** 2)) < 1e-12


def test_hessian_norm_flat_oracle():
    spec = ManifoldSpec.torus(128)
    X, _ = spec.coordinates()
    s = np.sin(2 * np.pi * X)
    hn = hessian_norm_sq(s, flat(spec))
    assert np.max(np.abs(hn - 16 * np.pi ** 4 * s ** 2)) / (16 * np.pi ** 4) < 1e-3


def test_hessian_defect_rejects_nonpositive_tau():
    spec = ManifoldSpec.torus(16)
    with pytest.raises(ValueError):
        hessian_defect(spec.zeros(), flat(spec), 1.0, 2.0, 0.0)


def test_integrals():
    t = ManifoldSpec.torus(32)
    assert abs(integrate(t.constant(1.0), flat(t)) - 1.0) < 1e-14
    X, _ = t.coordinates()
    assert abs(integrate(np.sin(2 * np.pi * X), flat(t))) < 1e-14
    s = ManifoldSpec.round_sphere(2, 1.0)
    assert abs(integrate(np.asarray(1.0), flat(s)) - 4 * np.pi) < 1e-12
    assert abs(sphere_area(3) - 2 * np.pi ** 2) < 1e-12


def test_shape_mismatch():
    spec = ManifoldSpec.torus(16)
    with pytest.raises(ShapeMismatchError):
        laplacian(np.zeros((8, 8)), flat(spec))


def test_rotsym_gauss_bonnet_and_round_metric():
    spec = ManifoldSpec.rotsym_sphere(32)
    theta = spec.coordinates()
    m = MetricState(spec, 0.0, 0.2 * np.cos(theta) ** 2)
    assert abs(integrate(m.R, m) - 8 * np.pi) < 1e-10
    m0 = flat(spec)
    np.testing.assert_allclose(m0.R, 2.0, atol=1e-12)
    assert abs(m0.volume - 4 * np.pi) < 1e-2


def test_rotsym_laplacian_of_first_harmonic():
    # cos(theta) is an eigenfunction with eigenvalue -2 on the unit sphere
    errs = []
    for N in (32, 64, 128):
        spec = ManifoldSpec.rotsym_sphere(N)
        c = np.cos(spec.coordinates())
        errs.append(np.max(np.abs(laplacian(c, flat(spec)) + 2 * c)))
    assert errs[2] < errs[1] < errs[0]
    assert np.log2(errs[1] / errs[2]) > 1.8


def test_einstein_contractions():
    spec = ManifoldSpec.torus(32)
    X, Y = spec.coordinates()
    phi = 0.1 * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y)
    m = MetricState(spec, 0.0, phi)
    u = np.cos(2 * np.pi * X + 0.3) + 0.5 * np.sin(2 * np.pi * Y)
    np.testing.assert_allclose(ricci_uu(u, m), 0.5 * m.R * grad_inner(u, u, m), atol=1e-12)
    np.testing.assert_allclose(m.ricci_norm_sq, 0.5 * m.R ** 2)
    np.testing.assert_allclose(hessian_trace(u, m), laplacian(u, m), atol=1e-9)


def test_rm_norm_constant():
    assert abs(rm_norm_constant(2) - np.sqrt(2) / 2) < 1e-15


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(1, 3))
def test_laplacian_is_self_adjoint(a, b, k):
    spec = ManifoldSpec.torus(16)
    X, Y = spec.coordinates()
    m = MetricState(spec, 0.0, 0.1 * np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y))
    f = np.sin(2 * np.pi * k * X) + a * np.cos(2 * np.pi * Y)
    g = np.cos(2 * np.pi * X) * (1 + b * np.sin(2 * np.pi * Y))
    lhs = integrate(laplacian(f, m) * g, m)
    rhs = integrate(f * laplacian(g, m), m)
    assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))
