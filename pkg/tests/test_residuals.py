import numpy as np
import pytest

from freewave import (InvalidArgument, ProblemParams, SurfaceProfile, SurfaceTrace,
                      boost_identity_check, critical_lambda, harmonic_extend,
                      stream_bernoulli_residual, traveling_residuals)

N = 64


def linear_wave(a, n=N, k=1.0):
    x = np.arange(n) * 2 * np.pi / (k * n)
    zeta = SurfaceProfile(a * np.cos(k * x), 2 * np.pi / k)
    phi = SurfaceTrace(-a / np.tanh(k) * np.sin(k * x), 2 * np.pi / k)
    return zeta, phi


@pytest.mark.parametrize("lam,sigma", [(0.5, 0.0), (1.0, 0.2), (3.0, 1.0)])
def test_uniform_stream_has_zero_residuals(lam, sigma):
    rep = traveling_residuals(SurfaceProfile.flat(32), SurfaceTrace(np.zeros(32)),
                              ProblemParams(lam=lam, sigma=sigma))
    assert rep.max_norm <= 1e-12
    assert rep.bernoulli_constant == 0.5


def test_report_norms_match_traces():
    z, phi = linear_wave(0.01)
    rep = traveling_residuals(z, phi, ProblemParams(lam=critical_lambda(1.0)))
    assert rep.kinematic_norm == np.max(np.abs(rep.kinematic.values))
    assert rep.max_norm == max(rep.kinematic_norm, rep.bernoulli_norm)


def test_linear_wave_residual_is_quadratic():
    p = ProblemParams(lam=critical_lambda(1.0))
    z, phi = linear_wave(1e-3)
    r = traveling_residuals(z, phi, p).max_norm
    assert r <= 2.0 * 1e-6  # C a^2 with C of order one (measured ~0.86)


def test_converged_newton_wave_residuals(waves64):
    w = waves64[0.05]
    rep = traveling_residuals(w.zeta, w.phi_p_s, ProblemParams(lam=w.lam))
    assert rep.kinematic_norm < 1e-10 and rep.bernoulli_norm < 1e-10


def test_residuals_translation_invariant(waves64):
    w = waves64[0.05]
    p = ProblemParams(lam=w.lam)
    base = traveling_residuals(w.zeta, w.phi_p_s, p)
    for shift in (3, 17):
        rep = traveling_residuals(SurfaceProfile(np.roll(w.zeta.values, shift)),
                                  SurfaceTrace(np.roll(w.phi_p_s.values, shift)), p)
        assert abs(rep.kinematic_norm - base.kinematic_norm) < 1e-10
        assert abs(rep.bernoulli_norm - base.bernoulli_norm) < 1e-10


def test_stream_residual_flat_is_zero():
    r = stream_bernoulli_residual(SurfaceProfile.flat(32), ProblemParams(lam=2.0))
    assert r.max_norm() < 1e-12


def test_stream_residual_quadratic_at_threshold():
    p = ProblemParams(lam=critical_lambda(1.0))
    A = np.array([1e-4, 1e-3, 1e-2])
    R = [stream_bernoulli_residual(linear_wave(a)[0], p).max_norm() for a in A]
    assert np.polyfit(np.log(A), np.log(R), 1)[0] == pytest.approx(2.0, abs=0.1)


def test_critical_lambda_examples():
    assert critical_lambda(1e-6) == pytest.approx(1.0, abs=1e-9)
    assert critical_lambda(1.0) == pytest.approx(1.3130352854993315, rel=1e-14)
    assert critical_lambda(2.0) == pytest.approx(2.0746, abs=1e-4)
    ks = np.linspace(0.01, 10, 200)
    assert np.all(np.diff([critical_lambda(k) for k in ks]) > 0)
    with pytest.raises(InvalidArgument):
        critical_lambda(0.0)


def _boost_field(n=32):
    flat = SurfaceProfile.flat(n)
    return harmonic_extend(flat, SurfaceTrace.from_function(lambda x: 0.1 * np.cos(x), n),
                           m=24, stream=1.0)


def test_boost_identity_examples(rng):
    f = _boost_field()
    phi_t = rng.normal(size=f.values.shape)
    assert boost_identity_check(f, phi_t, 0.0, 0.0) < 1e-12
    assert boost_identity_check(f, phi_t, 0.5, 0.25) < 1e-10
    assert boost_identity_check(f, phi_t, 0.5, 0.0) == pytest.approx(0.25, abs=1e-12)


def test_boost_identity_rejects_wrong_shape():
    with pytest.raises(InvalidArgument):
        boost_identity_check(_boost_field(), np.zeros(3), 0.5, 0.25)
