"""scikit-learn style wrappers.

``StokesBranch`` fits the traveling-wave branch lambda(a) by continuation
and predicts lambda from amplitudes with an even polynomial fitted to the
computed branch.  ``DNOTransformer`` maps rows of surface traces through the
Dirichlet-Neumann operator of a fixed surface.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .geometry import TWO_PI, ProblemParams, SurfaceProfile, SurfaceTrace
from .harmonic import DEFAULT_M, HarmonicSolver, dno_apply
from .residuals import critical_lambda
from .solvers import SolveOptions, continuation_sweep


class StokesBranch(RegressorMixin, BaseEstimator):
    """Even Stokes-wave branch at wavenumber ``k``.

    ``fit(X)`` takes amplitudes (one column, strictly increasing after
    sorting, first <= 0.02).  After fitting, ``waves_`` holds the solutions
    and ``coef_`` the coefficients of lambda(a) = c0 + c1 a^2 + ... + c_d a^(2d).
    """

    def __init__(self, k=1.0, n=64, m=DEFAULT_M, tol=1e-11, max_iter=12, degree=2, sigma=0.0):
        self.k = k
        self.n = n
        self.m = m
        self.tol = tol
        self.max_iter = max_iter
        self.degree = degree
        self.sigma = sigma

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False)
        a = np.sort(np.ravel(X))
        opts = SolveOptions(tol=self.tol, max_iter=self.max_iter, m=self.m)
        params = ProblemParams(sigma=self.sigma, period=TWO_PI / self.k)
        sweep = continuation_sweep(self.k, a, params, opts, n=self.n)
        if not sweep.waves:
            raise sweep.failure
        self.waves_ = sweep.waves
        self.failure_ = sweep.failure
        self.amplitudes_ = sweep.amplitudes
        self.lambdas_ = sweep.lambdas
        deg = min(self.degree, len(self.waves_) - 1)
        V = np.vander(self.amplitudes_**2, deg + 1, increasing=True)
        self.coef_ = np.linalg.lstsq(V, self.lambdas_, rcond=None)[0]
        self.intercept_ = float(self.coef_[0])
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        a = np.ravel(check_array(X, ensure_2d=False))
        return np.vander(a**2, self.coef_.size, increasing=True) @ self.coef_

    def bifurcation_gap(self) -> float:
        """Extrapolated lambda(0) minus the linear threshold k / tanh(k)."""
        check_is_fitted(self, "coef_")
        return self.intercept_ - critical_lambda(self.k)


class DNOTransformer(TransformerMixin, BaseEstimator):
    """Apply G(zeta) to each row of X (rows are traces on the surface grid)."""

    def __init__(self, zeta=None, period=TWO_PI, m=DEFAULT_M, tol=1e-8):
        self.zeta = zeta
        self.period = period
        self.m = m
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X)
        zeta = np.zeros(X.shape[1]) if self.zeta is None else np.asarray(self.zeta, dtype=float)
        self.profile_ = SurfaceProfile(zeta, self.period)
        self.n_features_in_ = X.shape[1]
        self.solver_ = HarmonicSolver()
        return self

    def transform(self, X):
        check_is_fitted(self, "profile_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} samples per row, got {X.shape[1]}")
        out = [dno_apply(self.profile_, SurfaceTrace(row, self.period), self.m, self.tol,
                         solver=self.solver_).values for row in X]
        return np.array(out)
