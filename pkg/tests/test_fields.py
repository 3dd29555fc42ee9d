import numpy as np
import pytest

from freewave import (InvalidArgument, SigmaGrid, SurfaceProfile, TorusGrid, VectorField2D,
                      arnold_bracket, leray_project, weyl_hodge)
from freewave.fields import enstrophy_gradient, normalized_inner


@pytest.fixture(scope="module")
def torus():
    return TorusGrid(48)


def stream_field(grid, psi):
    return VectorField2D(grid, grid.dy(psi), -grid.dx(psi))


def random_stream(grid, rng, kmax=3):
    X, Y = grid.mesh
    psi = np.zeros(grid.shape)
    for a in range(-kmax, kmax + 1):
        for b in range(-kmax, kmax + 1):
            psi += rng.normal() * np.cos(a * X + b * Y + rng.uniform(0, 2 * np.pi))
    return stream_field(grid, psi)


def test_leray_pure_gradient(torus):
    X, Y = torus.mesh
    parts = leray_project(VectorField2D.gradient_of(torus, np.sin(X) * np.sin(Y)))
    assert parts.div_free.max_norm() < 1e-8


def test_leray_idempotent_on_divergence_free(torus, rng):
    v = random_stream(torus, rng)
    parts = leray_project(v)
    assert (parts.div_free - v).max_norm() < 1e-12 * max(1.0, v.max_norm())
    assert parts.gradient_part.max_norm() < 1e-12 * max(1.0, v.max_norm())


def test_leray_recovers_known_parts(torus):
    X, Y = torus.mesh
    g = VectorField2D.gradient_of(torus, np.sin(X) * np.sin(Y))
    c = VectorField2D(torus, np.cos(Y), np.zeros(torus.shape))
    parts = leray_project(g + c)
    assert (parts.div_free - c).max_norm() < 1e-7
    assert (parts.gradient_part - g).max_norm() < 1e-7
    assert normalized_inner(parts.div_free, parts.gradient_part, g + c) < 1e-10


def strip(a=0.1, n=32, m=24):
    return SigmaGrid(SurfaceProfile.from_function(lambda x: a * np.cos(x), n), m)


@pytest.mark.parametrize("a", [0.0, 0.1])
def test_strip_leray(a):
    g = strip(a)
    x, y = g.x[None, :], g.y
    v = VectorField2D.gradient_of(g, np.cos(2 * x) * y**3) + VectorField2D(
        g, *[c for c in (g.grad(np.sin(x) * y**2)[1], -g.grad(np.sin(x) * y**2)[0])])
    parts = leray_project(v)
    assert np.max(np.abs(parts.div_free.divergence())) < 1e-8
    assert normalized_inner(parts.div_free, parts.gradient_part, v) < 1e-10
    top = parts.div_free.v[-1] - g.hx * parts.div_free.u[-1]
    assert np.max(np.abs(top)) < 1e-8 and np.max(np.abs(parts.div_free.v[0])) < 1e-8


def test_hodge_harmonic_gradient_flat():
    g = strip(0.0, m=32)
    x, y = g.x[None, :], g.y
    U = np.sin(x) * np.cosh(y)
    parts = weyl_hodge(VectorField2D.gradient_of(g, U))
    assert parts.w.max_norm() < 1e-7
    assert np.max(np.abs(parts.phi.values - U)) < 1e-7  # zero-mean already


def test_hodge_mean_flow():
    g = strip(0.0)
    v = VectorField2D(g, np.ones(g.shape), np.zeros(g.shape))
    parts = weyl_hodge(v)
    assert (parts.w - v).max_norm() < 1e-12
    assert parts.gradient_part.max_norm() < 1e-12


def test_hodge_linearity_and_uniqueness():
    g = strip(0.0, m=32)
    x, y = g.x[None, :], g.y
    h = VectorField2D.gradient_of(g, np.sin(x) * np.cosh(y))
    mean = VectorField2D(g, np.ones(g.shape), np.zeros(g.shape))
    parts = weyl_hodge(h + mean)
    assert (parts.w - mean).max_norm() < 1e-7
    assert (parts.gradient_part - h).max_norm() < 1e-7
    again = weyl_hodge(parts.w)
    assert again.gradient_part.max_norm() < 1e-8


def test_hodge_rejects_divergent_field():
    g = strip(0.1)
    x, y = g.x[None, :], g.y
    with pytest.raises(InvalidArgument, match="divergence"):
        weyl_hodge(VectorField2D.gradient_of(g, np.cos(x) * y**2))


def test_arnold_antisymmetry_and_diagonal(torus, rng):
    v, F, G = (random_stream(torus, rng) for _ in range(3))
    b = arnold_bracket(F, G, v)
    assert arnold_bracket(F, F, v) == 0.0
    assert abs(arnold_bracket(G, F, v) + b) <= 1e-12 * max(1.0, abs(b))


def test_arnold_bilinear(torus, rng):
    v, F1, F2, G = (random_stream(torus, rng) for _ in range(4))
    a, c = 0.7, -1.3
    lhs = arnold_bracket(a * F1 + c * F2, G, v)
    rhs = a * arnold_bracket(F1, G, v) + c * arnold_bracket(F2, G, v)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_enstrophy_casimir(torus, rng):
    v, G = random_stream(torus, rng), random_stream(torus, rng)
    C = enstrophy_gradient(v)
    scale = C.norm() * G.norm() * np.max(np.abs(v.curl()))
    assert abs(arnold_bracket(C, G, v)) < 1e-7 * scale


def test_arnold_needs_torus():
    g = strip(0.0)
    f = VectorField2D(g, np.ones(g.shape), np.zeros(g.shape))
    with pytest.raises(InvalidArgument):
        arnold_bracket(f, f, f)
