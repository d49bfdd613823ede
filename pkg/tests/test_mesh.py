"""Grid, background profile, mollifier, and discrete-operator tests.

Operator accuracy is checked against analytic derivatives; quadrature
against closed-form integrals (sqrt(pi) for the gaussian).
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dvns1d import background_profile, build_mesh, integrate, mollify, norm
from dvns1d.errors import ConfigurationError, DomainError
from dvns1d.mesh import diffuse, div_flux, grad_c


# --------------------------------------------------------------------- mesh

def test_build_mesh_spacing():
    m = build_mesh(10.0, 1000)
    assert m.dx == 0.02
    assert m.N == 1000 and m.L == 10.0
    assert np.all(np.diff(m.x) > 0)
    assert m.x[0] == pytest.approx(-10.0 + 0.01, abs=1e-14)
    assert m.x[-1] == pytest.approx(10.0 - 0.01, abs=1e-14)


def test_build_mesh_cell_centers():
    m = build_mesh(2.0, 8)
    assert m.dx == 0.5
    assert np.allclose(m.x, [-1.75, -1.25, -0.75, -0.25, 0.25, 0.75, 1.25, 1.75], atol=1e-15)


@pytest.mark.parametrize("L,N", [(2.0, 7), (2.0, 0), (2.0, 8.5), (1.5, 64), (float("inf"), 64), (float("nan"), 64)])
def test_build_mesh_rejects(L, N):
    with pytest.raises(ConfigurationError):
        build_mesh(L, N)


def test_mesh_immutable():
    m = build_mesh(2.0, 8)
    with pytest.raises(Exception):
        m.dx = 1.0


# ------------------------------------------------------------------ profile

def test_profile_equal_ends_constant():
    m = build_mesh(10.0, 256)
    prof = background_profile(m, 1.0, 1.0)
    assert np.all(prof.values == 1.0)
    assert prof.rho_minus == prof.rho_plus == 1.0


def test_profile_transition():
    m = build_mesh(10.0, 512)
    prof = background_profile(m, 1.0, 2.0)
    v = prof.values
    # exactly constant outside the transition band
    assert np.all(v[m.x <= -1.0] == 1.0)
    assert np.all(v[m.x >= 1.0] == 2.0)
    assert np.all(v >= 1.0) and np.all(v <= 2.0)
    assert np.all(np.diff(v) >= 0.0)
    # midpoint symmetry of the smoothstep: v(x) + v(-x) = rho- + rho+
    assert np.max(np.abs(v + v[::-1] - 3.0)) <= 1e-14
    # slope bounded by the smoothstep maximum 15/8 scaled to the band
    assert np.max(np.abs(grad_c(v, m))) <= 0.9375 * 1.0 + 1e-6


def test_profile_rejects_bad_ends():
    m = build_mesh(2.0, 8)
    for lo, hi in ((0.0, 1.0), (1.0, -2.0), (float("nan"), 1.0)):
        with pytest.raises(ConfigurationError):
            background_profile(m, lo, hi)


# ----------------------------------------------------------------- mollify

def test_mollify_constant_preserved():
    m = build_mesh(10.0, 256)
    f = np.full(m.N, 3.7)
    assert np.allclose(mollify(f, m, 2), 3.7, atol=1e-13)


def test_mollify_identity_below_grid_scale():
    m = build_mesh(10.0, 128)  # dx = 0.15625
    f = np.sin(m.x)
    out = mollify(f, m, 1000)  # radius 1e-3 < dx
    assert np.array_equal(out, f)
    assert out is not f  # fresh array, not an alias


def test_mollify_mass_preservation(rng):
    m = build_mesh(10.0, 512)
    for _ in range(20):
        f = rng.normal(size=m.N)
        err = abs(integrate(mollify(f, m, 3), m) - integrate(f, m))
        assert err <= 1e-12 * integrate(np.abs(f), m)


def test_mollify_step():
    m = build_mesh(10.0, 1024)
    f = np.where(m.x > 0.0, 1.0, 0.0)
    out = mollify(f, m, 2)  # kernel support [-1/2, 1/2]
    # support widening is at most the kernel radius
    far = np.abs(m.x) > 0.5 + m.dx
    assert np.array_equal(out[far], f[far])
    assert np.all(np.diff(out) >= -1e-15)  # still a monotone ramp
    assert abs(integrate(out, m) - integrate(f, m)) <= 1e-12 * integrate(f, m)


@pytest.mark.parametrize("n", [0, -2, 1.5])
def test_mollify_bad_index(n):
    m = build_mesh(2.0, 8)
    with pytest.raises(ConfigurationError):
        mollify(np.ones(8), m, n)


# ------------------------------------------------------------------- grad_c

def test_grad_constant_and_affine_exact():
    m = build_mesh(2.0, 64)
    assert np.all(grad_c(np.full(m.N, 5.0), m) == 0.0)
    g = grad_c(m.x.copy(), m)
    assert np.max(np.abs(g - 1.0)) <= 1e-13  # one-sided ends included


def test_grad_quadratic():
    m = build_mesh(2.0, 400)  # dx = 0.01
    g = grad_c(m.x**2, m)
    assert np.max(np.abs(g - 2.0 * m.x)) <= 1e-10


def test_grad_second_order_convergence():
    errs = []
    for N in (256, 512):
        m = build_mesh(10.0, N)
        errs.append(np.max(np.abs(grad_c(np.sin(m.x), m) - np.cos(m.x))[2:-2]))
    ratio = errs[0] / errs[1]
    assert 3.4 <= ratio <= 4.6


# ----------------------------------------------------------------- div_flux

def test_div_constant_flux_zero():
    m = build_mesh(2.0, 32)
    assert np.all(div_flux(np.full(m.N, 2.5), m) == 0.0)


def test_div_telescopes(rng):
    m = build_mesh(10.0, 512)
    for _ in range(10):
        f = rng.normal(size=m.N) * 10.0
        total = np.sum(div_flux(f, m)) * m.dx
        assert abs(total - (f[-1] - f[0])) <= 1e-13 * max(1.0, np.max(np.abs(f)))


def test_div_accuracy_interior():
    errs = []
    for N in (256, 512):
        m = build_mesh(10.0, N)
        errs.append(np.max(np.abs(div_flux(np.sin(m.x), m) - np.cos(m.x))[1:-1]))
    assert 3.4 <= errs[0] / errs[1] <= 4.6


# ------------------------------------------------------------------ diffuse

def test_diffuse_constant_coefficient_quadratic():
    m = build_mesh(2.0, 64)
    out = diffuse(np.ones(m.N), m.x**2, m)
    assert np.max(np.abs(out[1:-1] - 2.0)) <= 1e-11
    # boundary rows are zeroed by construction
    assert out[0] == 0.0 and out[-1] == 0.0


def test_diffuse_constant_field_zero():
    m = build_mesh(2.0, 32)
    assert np.all(diffuse(np.linspace(1, 2, m.N), np.full(m.N, 4.0), m) == 0.0)


def test_diffuse_affine_coefficient():
    # d/dx((x+3) * d/dx x) = 1, exact for the arithmetic-mean face scheme
    m = build_mesh(2.0, 64)
    out = diffuse(m.x + 3.0, m.x.copy(), m)
    assert np.max(np.abs(out[1:-1] - 1.0)) <= 1e-12


def test_diffuse_negative_coefficient_raises():
    m = build_mesh(2.0, 8)
    with pytest.raises(DomainError):
        diffuse(np.array([1.0] * 7 + [-1e-3]), np.ones(8), m)


def test_diffuse_discrete_integration_by_parts():
    # int g * diffuse(a, f) = -int a * grad f * grad g + O(dx^2)
    # for fields vanishing in the boundary cells
    def mismatch(N):
        m = build_mesh(10.0, N)
        t = np.clip(m.x / 8.0, -1.0, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            bump = np.where(np.abs(t) < 1.0, np.exp(1.0 - 1.0 / np.maximum(1e-300, 1.0 - t * t)), 0.0)
        f = bump * np.sin(3.0 * m.x)
        g = bump * np.cos(2.0 * m.x)
        a = 2.0 + np.cos(m.x)
        lhs = integrate(g * diffuse(a, f, m), m)
        rhs = -integrate(a * grad_c(f, m) * grad_c(g, m), m)
        return abs(lhs - rhs)

    e1, e2 = mismatch(128), mismatch(256)
    assert e1 / e2 >= 3.0
    assert e2 <= 1e-3


# ---------------------------------------------------------------- integrate

def test_integrate_constant():
    m = build_mesh(2.0, 8)
    assert integrate(np.ones(8), m) == 4.0


def test_integrate_odd_field():
    m = build_mesh(2.0, 256)
    assert abs(integrate(m.x**3, m)) <= 1e-10


def test_integrate_gaussian():
    m = build_mesh(10.0, 4000)
    val = integrate(np.exp(-m.x**2), m)
    assert abs(val - math.sqrt(math.pi)) <= 1e-8


# --------------------------------------------------------------------- norm

def test_norm_examples():
    m = build_mesh(2.0, 8)
    assert norm(np.ones(8), m, "lp", p=2) == pytest.approx(2.0, abs=1e-14)
    assert norm(np.zeros(8), m, "lp", p=2) == 0.0
    assert norm(np.zeros(8), m, "linf") == 0.0
    assert norm(np.zeros(8), m, "h1") == 0.0
    f = np.zeros(8)
    f[3] = 7.0
    assert norm(f, m, "linf") == 7.0


def test_norm_lp_and_h1():
    m = build_mesh(2.0, 8)
    f = np.full(8, 2.0)
    assert norm(f, m, "lp", p=1) == pytest.approx(8.0, abs=1e-13)
    assert norm(f, m, "lp", p=4) == pytest.approx(2.0 * 4.0**0.25, rel=1e-13)
    # constant field: h1 collapses to l2
    assert norm(f, m, "h1") == pytest.approx(norm(f, m, "lp", p=2), rel=1e-14)


def test_norm_orlicz_split():
    m = build_mesh(2.0, 8)
    # everything below threshold: plain l2
    assert norm(np.full(8, 0.5), m, "orlicz", gamma=2.0) == pytest.approx(1.0, abs=1e-13)
    # everything above: gamma branch; here gamma=2 so again l2
    assert norm(np.full(8, 2.0), m, "orlicz", gamma=2.0) == pytest.approx(4.0, abs=1e-13)
    # mixed field, gamma=3: 0.5^2 on half the cells, 2^3 on the other half
    f = np.where(m.x < 0, 0.5, 2.0)
    want = math.sqrt(0.25 * 2.0 + 8.0 * 2.0)
    assert norm(f, m, "orlicz", gamma=3.0) == pytest.approx(want, rel=1e-13)


def test_norm_rejects():
    m = build_mesh(2.0, 8)
    f = np.ones(8)
    with pytest.raises(ConfigurationError):
        norm(f, m, "lp", p=0.5)
    with pytest.raises(ConfigurationError):
        norm(f, m, "lp")  # p missing
    with pytest.raises(ConfigurationError):
        norm(f, m, "orlicz")  # gamma missing
    with pytest.raises(ConfigurationError):
        norm(f, m, "total-variation")


@given(vals=st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=2, max_size=2))
def test_norm_lp_monotone_on_unit_support(vals):
    # |f| <= 1 supported on measure-1 set: Lp norms non-decreasing in p
    m = build_mesh(2.0, 8)  # dx = 0.5, two cells = measure 1
    f = np.zeros(8)
    f[3:5] = vals
    ps = [1, 2, 4, 8]
    ns = [norm(f, m, "lp", p=p) for p in ps]
    for lo, hi in zip(ns, ns[1:]):
        assert lo <= hi + 1e-12
