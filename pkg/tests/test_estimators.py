import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from freewave import SurfaceProfile, SurfaceTrace, dno_apply
from freewave.estimators import DNOTransformer, StokesBranch
from freewave.residuals import critical_lambda


def test_stokes_branch_fit_predict():
    est = StokesBranch(n=32, degree=2).fit(np.array([0.01, 0.02, 0.03]))
    assert len(est.waves_) == 3
    assert abs(est.bifurcation_gap()) < 1e-6
    pred = est.predict([0.02])
    assert pred[0] == pytest.approx(est.lambdas_[1], abs=1e-12)
    assert est.intercept_ == pytest.approx(critical_lambda(1.0), abs=1e-6)


def test_stokes_branch_params_and_clone():
    est = StokesBranch(n=32, degree=3)
    assert est.get_params()["degree"] == 3
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        est.predict([0.01])


def test_dno_transformer_matches_function():
    n = 32
    zeta = 0.1 * np.cos(np.arange(n) * 2 * np.pi / n)
    X = np.random.default_rng(3).normal(size=(3, n))
    out = DNOTransformer(zeta=zeta).fit_transform(X)
    ref = dno_apply(SurfaceProfile(zeta), SurfaceTrace(X[1])).values
    assert out.shape == X.shape
    assert np.max(np.abs(out[1] - ref)) < 1e-12


def test_dno_transformer_rejects_width_change():
    t = DNOTransformer().fit(np.zeros((1, 16)))
    with pytest.raises(ValueError):
        t.transform(np.zeros((1, 32)))
