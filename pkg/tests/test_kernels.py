"""Backend parity and stencil-correctness tests for the hot kernels.

The numpy and numba paths evaluate the same expressions; primitive stencils
must agree bit for bit, the fused right-hand sides to a few ulps (libm pow
differences).
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from dvns1d import kernels


@pytest.fixture
def both_backends():
    if not kernels.HAVE_NUMBA:
        pytest.skip("numba backend not installed")
    saved = kernels.active_backend()
    yield
    kernels.use_backend(saved)


def _random_fields(n, seed):
    rng = np.random.default_rng(seed)
    rho = 0.2 + rng.random(n)
    w = rng.normal(size=n)
    return rho, w


# ----------------------------------------------------------- stencil oracles

def test_upwind_div_donor_cell_oracle():
    # independent loop implementation of the donor-cell flux
    dx = 0.5
    q = np.array([1.0, 2.0, 0.5, 3.0, 1.5, 0.25])
    w = np.array([0.3, -1.0, 0.7, 0.0, -0.2, 0.9])
    n = len(q)
    faces = np.zeros(n + 1)
    faces[0] = q[0] * w[0]
    faces[n] = q[-1] * w[-1]
    for i in range(1, n):
        wf = 0.5 * (w[i - 1] + w[i])
        faces[i] = wf * (q[i - 1] if wf >= 0.0 else q[i])
    want = (faces[1:] - faces[:-1]) / dx
    got = kernels.upwind_div(q, w, dx)
    assert np.array_equal(got, want)


def test_upwind_div_reduces_to_div_flux_for_uniform_velocity():
    rho, _ = _random_fields(64, 11)
    w = np.full(64, 1.3)
    got = kernels.upwind_div(rho, w, 0.1)
    # with w > 0 everywhere the donor is always the left cell
    faces = np.empty(65)
    faces[1:-1] = 1.3 * rho[:-1]
    faces[0] = rho[0] * 1.3
    faces[-1] = rho[-1] * 1.3
    want = (faces[1:] - faces[:-1]) / 0.1
    assert np.allclose(got, want, atol=1e-14)


def test_upwind_grad_direction():
    dx = 0.25
    f = np.arange(8, dtype=float) * dx  # f = x, both one-sided slopes exact
    ones = np.ones(8)
    assert np.allclose(kernels.upwind_grad(f, ones, dx), 1.0, atol=1e-14)
    assert np.allclose(kernels.upwind_grad(f, -ones, dx), 1.0, atol=1e-14)
    # direction actually switches: quadratic has distinct one-sided slopes
    g = (np.arange(8, dtype=float) * dx) ** 2
    bwd = kernels.upwind_grad(g, ones, dx)
    fwd = kernels.upwind_grad(g, -ones, dx)
    assert np.all(fwd[1:-1] > bwd[1:-1])


def test_stability_terms_oracle():
    rho, w = _random_fields(128, 5)
    smax, numax = kernels.stability_terms(rho, w, 0.75, 2.0, 1.0, 1.0, 0.25)
    assert smax == pytest.approx(np.max(np.abs(w) + np.sqrt(2.0 * rho)), rel=1e-14)
    assert numax == pytest.approx(np.max(np.maximum(rho**0.75, 0.25) / rho), rel=1e-14)


# ---------------------------------------------------------------- parity

PRIMS = ["grad_c", "div_flux", "diffuse", "upwind_div", "upwind_grad"]


@pytest.mark.parametrize("n", [16, 257])
def test_primitive_parity_bitwise(both_backends, n):
    rho, w = _random_fields(n, n)
    dx = 0.034
    results = {}
    for backend in ("numpy", "numba"):
        kernels.use_backend(backend)
        results[backend] = {
            "grad_c": kernels.grad_c(w, dx),
            "div_flux": kernels.div_flux(w, dx),
            "diffuse": kernels.diffuse(rho, w, dx),
            "upwind_div": kernels.upwind_div(rho, w, dx),
            "upwind_grad": kernels.upwind_grad(w, rho - 0.7, dx),
        }
    for name in PRIMS:
        a, b = results["numpy"][name], results["numba"][name]
        assert np.array_equal(a, b), f"{name} differs across backends"


@pytest.mark.parametrize("alpha", [0.75, 1.0])
def test_rhs_parity_ulp(both_backends, alpha):
    rho, w = _random_fields(192, 7)
    args = (0.05, alpha, 2.0, 1.0, 1.0, 0.0)
    out = {}
    for backend in ("numpy", "numba"):
        kernels.use_backend(backend)
        out[backend] = (kernels.rhs_u(rho, w, *args), kernels.rhs_v(rho, w, *args))
    for (a1, a2), (b1, b2) in [(out["numpy"][0], out["numba"][0]), (out["numpy"][1], out["numba"][1])]:
        scale = np.max(np.abs(a1)) + 1.0
        assert np.max(np.abs(a1 - b1)) <= 5e-12 * scale
        scale = np.max(np.abs(a2)) + 1.0
        assert np.max(np.abs(a2 - b2)) <= 5e-12 * scale


def test_rhs_u_oracle_constant_state():
    # constant density and velocity: all interior derivatives vanish
    # identically; the one-sided boundary rows carry ~1e-15 rounding noise,
    # which is why the stepper clamps the outermost cells
    rho = np.full(64, 1.7)
    u = np.full(64, 0.4)
    drho, dm = kernels.rhs_u(rho, u, 0.1, 1.0, 2.0, 1.0, 1.0, 0.0)
    assert np.all(drho == 0.0)
    assert np.all(dm[1:-1] == 0.0)
    assert np.max(np.abs(dm)) <= 1e-13


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_active_backend_roundtrip(both_backends):
    kernels.use_backend("numpy")
    assert kernels.active_backend() == "numpy"
    kernels.use_backend("numba")
    assert kernels.active_backend() == "numba"


def test_env_flag_selects_numpy():
    env = dict(os.environ, DVNS1D_NUMBA="0")
    code = "import dvns1d.kernels as k; print(k.active_backend())"
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "numpy"
