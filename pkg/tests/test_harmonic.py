import numpy as np
import scipy.linalg as sla
import pytest

from freewave import (CompatibilityViolation, HarmonicSolver, SurfaceProfile, SurfaceTrace,
                      dno_apply, harmonic_extend, neumann_extend, trace_gradient)
from freewave.errors import InvalidArgument
from freewave.harmonic import SigmaGrid, dno_of_field

from conftest import random_trace


def flat(n):
    return SurfaceProfile.flat(n)


def wavy(n, a=0.1):
    return SurfaceProfile.from_function(lambda x: a * np.cos(x), n)


def test_flat_dirichlet_oracle(solver):
    n = 64
    f = harmonic_extend(flat(n), SurfaceTrace.from_function(np.cos, n), m=64, solver=solver)
    exact = np.cos(f.grid.x)[None, :] * np.cosh(f.grid.y) / np.cosh(1.0)
    assert np.max(np.abs(f.values - exact)) < 1e-8


def test_constant_data_gives_constant(solver):
    f = harmonic_extend(wavy(32), SurfaceTrace(np.ones(32)), solver=solver)
    assert np.max(np.abs(f.values - 1.0)) < 1e-12


def test_spectral_convergence_in_vertical_levels():
    n = 32
    z = wavy(n)
    data = SurfaceTrace.from_function(np.cos, n)
    ref = dno_apply(z, data, m=48).values
    errs = [np.max(np.abs(dno_apply(z, data, m=m).values - ref)) for m in (8, 10, 12)]
    # spectral: each refinement gains well over the factor a fixed-order scheme would
    assert errs[1] < errs[0] / 20 and errs[2] < errs[1] / 20
    assert harmonic_extend(z, data, m=16).residual < 1e-8


def test_neumann_flat_oracle():
    n = 64
    f = neumann_extend(flat(n), SurfaceTrace.from_function(np.sin, n), m=48)
    exact = np.sin(f.grid.x)[None, :] * np.cosh(f.grid.y) / np.sinh(1.0)
    assert np.max(np.abs(f.values - exact)) < 1e-8


def test_neumann_zero_data():
    f = neumann_extend(wavy(32), SurfaceTrace(np.zeros(32)))
    assert np.max(np.abs(f.values)) < 1e-13


def test_neumann_incompatible_flux():
    with pytest.raises(CompatibilityViolation) as info:
        neumann_extend(flat(32), SurfaceTrace(np.ones(32)))
    assert info.value.flux == pytest.approx(2 * np.pi)


def test_neumann_normal_derivative_matches_data():
    n = 32
    z = wavy(n, 0.15)
    data = SurfaceTrace(np.sin(z.x) + 0.3 * np.cos(2 * z.x))
    # subtract the arc-length weighted mean so the net flux vanishes
    g = SigmaGrid(z, 24)
    w = np.sqrt(1 + g.hx**2)
    vals = data.values - np.sum(data.values * w) / np.sum(w)
    f = neumann_extend(z, SurfaceTrace(vals), m=24)
    normal = dno_of_field(f).values / w
    assert np.max(np.abs(normal - vals)) < 1e-9
    assert abs(g.integrate(f.values)) < 1e-12


def test_flat_dno_eigenvalue_mode_one(solver):
    out = dno_apply(flat(32), SurfaceTrace.from_function(np.cos, 32), solver=solver)
    assert np.allclose(out.values, np.tanh(1.0) * np.cos(out.x), atol=1e-12)


def test_dno_annihilates_constants(solver):
    out = dno_apply(wavy(32), SurfaceTrace(np.full(32, 3.0)), solver=solver)
    assert out.max_norm() <= 1e-10


def test_dno_self_adjoint(rng, solver):
    n = 64
    z = wavy(n)
    a = SurfaceTrace(random_trace(rng, n))
    b = SurfaceTrace(random_trace(rng, n))
    lhs = np.sum(a.values * dno_apply(z, b, solver=solver).values) * z.dx
    rhs = np.sum(dno_apply(z, a, solver=solver).values * b.values) * z.dx
    assert abs(lhs - rhs) < 1e-8


@pytest.mark.parametrize("amp", [0.05, 0.12, 0.2])
def test_energy_identity_and_zero_mean(rng, amp, solver):
    n = 64
    z = SurfaceProfile(amp * np.cos(grid := np.arange(n) * 2 * np.pi / n)
                       + 0.3 * amp * np.sin(2 * grid))
    phi = SurfaceTrace(random_trace(rng, n, scale=0.3))
    f = harmonic_extend(z, phi, solver=solver)
    G = dno_of_field(f)
    assert abs(f.dirichlet_energy() - np.sum(phi.values * G.values) * z.dx) < 1e-7
    assert abs(G.integral()) < 1e-10


def test_flat_spectrum_moderate_grid(solver):
    n, m = 64, 48
    for k in range(1, n // 4 + 1):
        out = dno_apply(flat(n), SurfaceTrace.from_function(lambda x: np.cos(k * x), n), m=m,
                        solver=solver)
        lam = out.values[0]
        assert abs(lam - k * np.tanh(k)) / (k * np.tanh(k)) < 1e-8


def test_trace_gradient_flat_oracle(solver):
    n = 64
    f = harmonic_extend(flat(n), SurfaceTrace.from_function(np.cos, n), m=32, solver=solver)
    tg = trace_gradient(f)
    assert np.max(np.abs(tg.fx.values + np.sin(f.grid.x))) < 1e-8
    assert np.max(np.abs(tg.fy.values - np.tanh(1.0) * np.cos(f.grid.x))) < 1e-8


def test_trace_gradient_of_constant(solver):
    f = harmonic_extend(wavy(32), SurfaceTrace(np.full(32, 2.0)), solver=solver)
    tg = trace_gradient(f)
    assert tg.fx.max_norm() < 1e-10 and tg.fy.max_norm() < 1e-10


def test_uniform_stream_trace_and_linear_growth(solver):
    n = 32
    f = harmonic_extend(flat(n), SurfaceTrace(np.zeros(n)), stream=1.0, solver=solver)
    tg = trace_gradient(f)
    assert np.all(tg.fx.values == 1.0) and np.all(tg.fy.values == 0.0)
    assert np.allclose(f.full_values(), f.grid.x[None, :] * np.ones((f.grid.m + 1, 1)))


def test_direct_and_krylov_agree():
    n = 64
    z = wavy(n, 0.2)
    data = SurfaceTrace(np.cos(z.x) + 0.2 * np.sin(3 * z.x))
    a = dno_apply(z, data, m=24, solver=HarmonicSolver(method="direct")).values
    b = dno_apply(z, data, m=24, solver=HarmonicSolver(method="krylov")).values
    assert np.max(np.abs(a - b)) < 1e-9


def test_factorization_is_cached():
    s = HarmonicSolver(method="direct")
    z = wavy(16)
    for j in range(3):
        dno_apply(z, SurfaceTrace(np.cos((j + 1) * z.x)), m=12, solver=s)
    assert s.stats["direct_factorizations"] == 1


def test_rejects_bad_arguments():
    with pytest.raises(InvalidArgument):
        harmonic_extend(flat(16), SurfaceTrace(np.zeros(16)), tol=0.0)
    with pytest.raises(InvalidArgument):
        harmonic_extend(flat(16), SurfaceTrace(np.zeros(32)))
    with pytest.raises(InvalidArgument):
        SigmaGrid(flat(16), m=4)


def test_flat_separable_path_matches_dense():
    n, m = 32, 16
    z = SurfaceProfile.flat(n, level=0.2)
    s = HarmonicSolver()
    g = SigmaGrid(z, m)
    rhs = np.cos(3 * g.x)
    fast = s.solve(g, top=("dirichlet", rhs))
    assert s.stats["separable_solves"] == 1
    lu = s._factor(g, "neumann", "dirichlet")
    full = np.zeros(g.shape)
    full[-1] = rhs
    dense = sla.lu_solve(lu, full.ravel()).reshape(g.shape)
    assert np.max(np.abs(fast - dense)) < 1e-12
