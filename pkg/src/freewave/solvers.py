"""Traveling waves by Newton iteration and by Rayleigh-quotient descent.

Newton route
    Unknowns are the cosine coefficients of zeta (mean included), the
    cosine coefficients of the slope of the periodic potential trace, and
    lambda.  Equations are the cosine projections of the Bernoulli residual,
    the sine projections of the kinematic residual and the amplitude pin
    ``(zeta(0) - zeta(pi/k)) / 2 = a``.  The Bernoulli constant is kept at 1/2,
    which leaves the mean level of the surface as an output of the solve.
    The Jacobian is built by forward differences of the residual map.

Rayleigh route
    Projected gradient descent of the quotient at fixed mass, see
    :func:`rayleigh_minimize`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (DegenerateQuotient, FlatCollapse, InvalidArgument, MaxIterExceeded,
                     ResolutionInsufficient, SolverDivergence)
from .functionals import EnergyReport, rayleigh_quotient, traveling_functional
from .geometry import ProblemParams, SurfaceProfile, SurfaceTrace, TWO_PI
from .harmonic import DEFAULT_M, HarmonicSolver, PotentialField
from .residuals import (ResidualReport, critical_lambda, stream_bernoulli_residual,
                        traveling_residuals)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-11
    max_iter: int = 12
    jacobian_step: float = 1e-7
    m: int = DEFAULT_M
    symmetric: bool = True
    harmonic_tol: float = 1e-7
    alias_ratio: float = 1e-10
    # Rayleigh descent
    step0: float = 0.5
    backtrack: float = 0.5
    min_step: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidArgument("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgument("max_iter must be a positive integer")
        if not self.jacobian_step > 0:
            raise InvalidArgument("jacobian_step must be positive")


@dataclass(frozen=True)
class TravelingWave:
    zeta: SurfaceProfile
    phi_p_s: SurfaceTrace
    lam: float
    k: float
    amplitude: float
    residuals: ResidualReport
    energy: EnergyReport
    iterations: int = 0
    history: tuple = ()
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.zeta.n)

    @property
    def mean_level(self) -> float:
        return self.zeta.mean()

    @property
    def params(self) -> ProblemParams:
        return ProblemParams(lam=self.lam, sigma=self.residuals.sigma, period=self.zeta.period)

    def summary(self):
        return {
            "k": self.k, "n": self.n, "amplitude": self.amplitude, "lambda": self.lam,
            "mean_level": self.mean_level, "iterations": self.iterations,
            "kinematic_max": self.residuals.kinematic_norm,
            "bernoulli_max": self.residuals.bernoulli_norm,
            "residual_max": self.residuals.max_norm,
            "energy": self.energy.as_dict(),
        }


def amplitude_of(zeta: SurfaceProfile) -> float:
    """Half the difference between the surface at x = 0 and at x = period/2.

    Uses the odd cosine coefficients so that it is exact for band-limited
    profiles even when period/2 is not a grid point.
    """
    modes = zeta.modes
    n = zeta.n
    c = 2.0 * modes.real
    c[0] = modes[0].real
    if n % 2 == 0:
        c[-1] = modes[-1].real
    return float(np.sum(c[1::2]))


class _EvenWaveMap:
    """Residual map for even waves in coefficient space."""

    def __init__(self, n, k, params, opts, solver):
        self.n = n
        self.k = k
        self.N = n // 2 - 1
        self.period = TWO_PI / k
        self.params = params
        self.opts = opts
        self.solver = solver
        x = np.arange(n) * self.period / n
        j = np.arange(self.N + 1)
        self.cos = np.cos(np.outer(x, j * k))          # (n, N+1)
        self.sin = np.sin(np.outer(x, j[1:] * k))      # (n, N)
        self.odd = (j % 2 == 1).astype(float)
        self.size = 2 * self.N + 2

    def unpack(self, u):
        N = self.N
        a = u[: N + 1]
        beta = u[N + 1: 2 * N + 1]
        lam = u[-1]
        zeta = SurfaceProfile(self.cos @ a, self.period)
        jk = np.arange(1, N + 1) * self.k
        phi = SurfaceTrace(self.sin @ (beta / jk), self.period)
        return zeta, phi, lam

    def pack(self, zeta: SurfaceProfile, phi: SurfaceTrace, lam):
        N = self.N
        zm = np.fft.rfft(zeta.values) / self.n
        pm = np.fft.rfft(phi.values) / self.n
        a = 2.0 * zm.real[: N + 1]
        a[0] = zm[0].real
        jk = np.arange(1, N + 1) * self.k
        beta = -2.0 * pm.imag[1: N + 1] * jk
        return np.concatenate([a, beta, [lam]])

    def residual_report(self, u):
        zeta, phi, lam = self.unpack(u)
        params = self.params.replace(lam=lam, period=self.period)
        return traveling_residuals(zeta, phi, params, self.opts.m, self.opts.harmonic_tol,
                                   solver=self.solver)

    def __call__(self, u, amplitude):
        rep = self.residual_report(u)
        N = self.N
        bm = np.fft.rfft(rep.bernoulli.values) / self.n
        km = np.fft.rfft(rep.kinematic.values) / self.n
        bern = 2.0 * bm.real[: N + 1]
        bern[0] = bm[0].real
        kin = -2.0 * km.imag[1: N + 1]
        pin = self.odd @ u[: N + 1] - amplitude
        return np.concatenate([bern, kin, [pin]]), rep

    def lam_column(self, u):
        """Exact derivative of the equations with respect to lambda."""
        col = np.zeros(self.size)
        col[: self.N + 1] = u[: self.N + 1]
        return col


class _GeneralWaveMap(_EvenWaveMap):
    """Residual map without the even symmetry; a phase pin fixes translations."""

    def __init__(self, n, k, params, opts, solver):
        super().__init__(n, k, params, opts, solver)
        N = self.N
        self.size = 4 * N + 2

    def unpack(self, u):
        N = self.N
        a = u[: N + 1]
        b = u[N + 1: 2 * N + 1]
        pc = u[2 * N + 1: 3 * N + 1]
        ps = u[3 * N + 1: 4 * N + 1]
        lam = u[-1]
        zeta = SurfaceProfile(self.cos @ a + self.sin @ b, self.period)
        phi = SurfaceTrace(self.cos[:, 1:] @ pc + self.sin @ ps, self.period)
        return zeta, phi, lam

    def pack(self, zeta, phi, lam):
        N = self.N
        zm = np.fft.rfft(zeta.values) / self.n
        pm = np.fft.rfft(phi.values) / self.n
        a = 2.0 * zm.real[: N + 1]
        a[0] = zm[0].real
        b = -2.0 * zm.imag[1: N + 1]
        pc = 2.0 * pm.real[1: N + 1]
        ps = -2.0 * pm.imag[1: N + 1]
        return np.concatenate([a, b, pc, ps, [lam]])

    def __call__(self, u, amplitude):
        rep = self.residual_report(u)
        N = self.N
        bm = np.fft.rfft(rep.bernoulli.values) / self.n
        km = np.fft.rfft(rep.kinematic.values) / self.n
        bc = 2.0 * bm.real[: N + 1]
        bc[0] = bm[0].real
        bs = -2.0 * bm.imag[1: N + 1]
        kc = 2.0 * km.real[1: N + 1]
        ks = -2.0 * km.imag[1: N + 1]
        pin = self.odd @ u[: N + 1] - amplitude
        phase = u[N + 1]
        return np.concatenate([bc, bs, kc, ks, [pin, phase]]), rep

    def lam_column(self, u):
        col = np.zeros(self.size + 1)
        col[: 2 * self.N + 1] = u[: 2 * self.N + 1]
        return col


def _wave_map(n, k, params, opts, solver):
    cls = _EvenWaveMap if opts.symmetric else _GeneralWaveMap
    return cls(n, k, params, opts, solver)


def _jacobian(F, u, F0, amplitude, step, lam_column):
    cols = []
    for j in range(u.size - 1):
        h = step * max(1.0, abs(u[j]))
        up = u.copy()
        up[j] += h
        cols.append((F(up, amplitude)[0] - F0) / h)
    cols.append(lam_column(u))
    return np.column_stack(cols)


def linear_guess(n, k, amplitude, params, opts):
    """First-order Stokes wave: zeta = a cos(kx), phi_p = -a/tanh(k) sin(kx)."""
    wm = _wave_map(n, k, params, opts, None)
    period = TWO_PI / k
    x = np.arange(n) * period / n
    zeta = SurfaceProfile(amplitude * np.cos(k * x), period)
    phi = SurfaceTrace(-amplitude / np.tanh(k) * np.sin(k * x), period)
    return wm.pack(zeta, phi, critical_lambda(k))


def tail_ratio(values) -> float:
    """Largest |mode| in the top quarter of the spectrum over the largest |mode| overall."""
    modes = np.abs(np.fft.rfft(values))[1:]
    if modes.size == 0 or modes.max() == 0.0:
        return 0.0
    q = modes.size - modes.size // 4
    return float(modes[q:].max() / modes.max())


def _build_wave(wm, u, k, amplitude, rep, iterations, history, params):
    zeta, phi, lam = wm.unpack(u)
    p = params.replace(lam=lam, period=wm.period)
    energy = traveling_functional(zeta, phi, p, wm.opts.m, wm.opts.harmonic_tol, solver=wm.solver)
    return TravelingWave(zeta, phi, float(lam), float(k), amplitude_of(zeta), rep, energy,
                         iterations, tuple(history))


def newton_traveling(k: float, amplitude_target: float, params: ProblemParams | None = None,
                     opts: SolveOptions | None = None, n: int = 64, initial=None,
                     solver: HarmonicSolver | None = None) -> TravelingWave:
    """Traveling wave of wavenumber k and amplitude ``amplitude_target``.

    ``initial`` may be a previous :class:`TravelingWave` (used as the
    starting iterate); otherwise the linear wave at lambda = k/tanh(k) is
    used.  Raises :class:`MaxIterExceeded` carrying the best iterate when
    the residual does not drop below ``opts.tol``.
    """
    opts = opts or SolveOptions()
    params = params or ProblemParams()
    if not np.isfinite(amplitude_target) or amplitude_target < 0:
        raise InvalidArgument("amplitude must be nonnegative")
    if not np.isfinite(k) or k <= 0:
        raise InvalidArgument("wavenumber must be positive")
    if n < 32 or n % 2:
        raise InvalidArgument(f"n must be even and >= 32, got {n}")
    solver = solver or HarmonicSolver()
    wm = _wave_map(n, k, params, opts, solver)

    if initial is not None:
        if initial.zeta.n == n:
            zeta0, phi0 = initial.zeta, initial.phi_p_s
        else:
            zeta0 = SurfaceProfile(_resample(initial.zeta.values, n), wm.period)
            phi0 = SurfaceTrace(_resample(initial.phi_p_s.values, n), wm.period)
        u = wm.pack(zeta0, phi0, initial.lam)
        # rescale the odd part toward the new amplitude
        a0 = amplitude_of(zeta0)
        if a0 > 0 and amplitude_target > 0:
            u[: wm.N + 1] *= np.where(wm.odd > 0, amplitude_target / a0, 1.0)
    else:
        u = linear_guess(n, k, amplitude_target, params, opts)

    history = []
    best = None
    for it in range(opts.max_iter + 1):
        F0, rep = wm(u, amplitude_target)
        norm = rep.max_norm
        history.append(norm)
        log.debug("newton k=%g a=%g it=%d residual=%.3e", k, amplitude_target, it, norm)
        if best is None or norm < best[0]:
            best = (norm, u.copy(), rep, it)
        if norm < opts.tol and abs(F0[-1 if opts.symmetric else -2]) < opts.tol:
            wave = _build_wave(wm, u, k, amplitude_target, rep, it, history, params)
            ratio = tail_ratio(wave.zeta.values)
            if amplitude_target > 0 and ratio > opts.alias_ratio:
                raise ResolutionInsufficient(
                    f"top-quarter spectral content {ratio:.2e} exceeds {opts.alias_ratio:.0e}; "
                    "increase n", tail_ratio=ratio)
            return wave
        if it == opts.max_iter or not np.all(np.isfinite(F0)):
            break
        if it >= 3 and norm > 0.5 * history[-2] and norm < 1e-6:
            # stalled near the discretization floor; more steps will not help
            break
        J = _jacobian(wm, u, F0, amplitude_target, opts.jacobian_step, wm.lam_column)
        if opts.symmetric:
            du = np.linalg.solve(J, -F0)
        else:
            du = np.linalg.lstsq(J, -F0, rcond=None)[0]
        u = u + du
        try:
            wm.unpack(u)
        except InvalidArgument:
            break
    norm, ub, rep, it = best
    wave = _build_wave(wm, ub, k, amplitude_target, rep, it, history, params)
    ratio = tail_ratio(wave.zeta.values)
    if amplitude_target > 0 and ratio > opts.alias_ratio:
        raise ResolutionInsufficient(
            f"Newton stalled at residual {norm:.3e} with top-quarter spectral content "
            f"{ratio:.2e}; increase n", tail_ratio=ratio)
    raise MaxIterExceeded(
        f"Newton did not converge for k={k}, amplitude={amplitude_target}: "
        f"best residual {norm:.3e} after {len(history) - 1} iterations",
        best=wave, history=history)


def _resample(values, n):
    """Band-limited resampling of periodic samples onto n points."""
    values = np.asarray(values)
    m = values.size
    fk = np.fft.rfft(values) / m
    out = np.zeros(n // 2 + 1, dtype=complex)
    keep = min(fk.size, out.size)
    out[:keep] = fk[:keep]
    if n < m:
        out[-1] = out[-1].real
    return np.fft.irfft(out * n, n)


@dataclass
class SweepResult:
    waves: list
    failure: Exception | None = None

    @property
    def complete(self) -> bool:
        return self.failure is None

    @property
    def amplitudes(self):
        return np.array([w.amplitude for w in self.waves])

    @property
    def lambdas(self):
        return np.array([w.lam for w in self.waves])


def continuation_sweep(k: float, amplitudes, params: ProblemParams | None = None,
                       opts: SolveOptions | None = None, n: int = 64,
                       solver: HarmonicSolver | None = None) -> SweepResult:
    """Follow the branch through increasing amplitudes, seeding each solve.

    The first failure truncates the branch; the exception is kept in
    ``SweepResult.failure``.
    """
    amplitudes = [float(a) for a in amplitudes]
    if any(b <= a for a, b in zip(amplitudes, amplitudes[1:])):
        raise InvalidArgument("amplitudes must be strictly increasing")
    if amplitudes and amplitudes[0] > 0.02:
        raise InvalidArgument("continuation must start at a small amplitude (<= 0.02)")
    solver = solver or HarmonicSolver()
    waves = []
    for a in amplitudes:
        seed = waves[-1] if waves else None
        if len(waves) >= 2:
            seed = _extrapolated_seed(waves[-2], waves[-1], a)
        try:
            waves.append(newton_traveling(k, a, params, opts, n=n, initial=seed, solver=solver))
        except (MaxIterExceeded, ResolutionInsufficient, SolverDivergence, InvalidArgument) as exc:
            log.warning("sweep stopped at amplitude %g: %s", a, exc)
            return SweepResult(waves, exc)
    return SweepResult(waves)


def _extrapolated_seed(w1, w2, a):
    """Secant prediction of the next branch point in amplitude."""
    da = w2.amplitude - w1.amplitude
    if da <= 0:
        return w2
    t = (a - w2.amplitude) / da
    try:
        zeta = SurfaceProfile(w2.zeta.values + t * (w2.zeta.values - w1.zeta.values), w2.zeta.period)
    except InvalidArgument:
        return w2
    phi = SurfaceTrace(w2.phi_p_s.values + t * (w2.phi_p_s.values - w1.phi_p_s.values),
                       w2.zeta.period)
    return replace(w2, zeta=zeta, phi_p_s=phi, lam=w2.lam + t * (w2.lam - w1.lam))


@dataclass(frozen=True)
class RayleighSolution:
    zeta: SurfaceProfile
    lam: float
    psi: PotentialField
    residual: SurfaceTrace
    iterations: int
    quotients: tuple
    masses: tuple
    converged: bool = True

    @property
    def residual_norm(self) -> float:
        return self.residual.max_norm()


def _mass_project(values, mass, period):
    return values - values.mean() + mass / period


def rayleigh_minimize(mass_m: float, k: float = 1.0, params_init: ProblemParams | None = None,
                      opts: SolveOptions | None = None, n: int = 64, initial=None,
                      solver: HarmonicSolver | None = None) -> RayleighSolution:
    """Projected gradient descent of the Rayleigh quotient at fixed mass.

    The outer gradient is ``-[(grad psi)^2 + 1 + 2 R zeta]`` on the surface
    with R the current quotient; its mean is removed so that every iterate
    keeps ``int zeta dx = mass_m`` (the mean is also reset exactly each
    step).  Steps are accepted only if the quotient does not increase.
    Stops when the stream-Bernoulli residual with lambda = R drops below
    ``opts.tol``.
    """
    opts = opts or SolveOptions(tol=1e-6, max_iter=500)
    params = params_init or ProblemParams()
    if not np.isfinite(mass_m):
        raise InvalidArgument("mass must be finite")
    if not np.isfinite(k) or k <= 0:
        raise InvalidArgument("wavenumber must be positive")
    period = TWO_PI / k
    solver = solver or HarmonicSolver()
    if initial is None:
        if mass_m == 0.0:
            raise InvalidArgument("mass 0 needs an initial non-flat profile")
        x = np.arange(n) * period / n
        values = mass_m / period + 0.05 * np.cos(k * x)
    else:
        values = np.asarray(getattr(initial, "values", initial), dtype=float)
    zeta = SurfaceProfile(_mass_project(values, mass_m, period), period)

    def evaluate(z):
        try:
            rq = rayleigh_quotient(z, params, opts.m, opts.harmonic_tol, solver=solver)
        except DegenerateQuotient as exc:
            raise FlatCollapse(str(exc)) from exc
        if rq.denominator < 1e-14 * period:
            raise FlatCollapse(f"int zeta^2 = {rq.denominator:.2e}: iterates collapsed to flat")
        return rq

    rq = evaluate(zeta)
    quotients, masses = [rq.value], [zeta.integral()]
    step = opts.step0
    best = None
    for it in range(opts.max_iter + 1):
        res = _stream_residual_any(zeta, rq)
        norm = res.max_norm()
        if best is None or norm < best[0]:
            best = (norm, zeta, rq, res, it)
        log.debug("rayleigh it=%d R=%.12g residual=%.3e step=%.2e", it, rq.value, norm, step)
        if norm < opts.tol:
            return RayleighSolution(zeta, rq.value, rq.psi, res, it, tuple(quotients),
                                    tuple(masses))
        if it == opts.max_iter:
            break
        g = rq.psi.grid
        speed2 = (g.ds(rq.psi.values)[-1] / g.h) ** 2 * (1.0 + g.hx**2)
        grad = -(speed2 + 1.0 + 2.0 * rq.value * zeta.values)
        direction = grad - grad.mean()
        accepted = False
        while step >= opts.min_step:
            trial = _mass_project(zeta.values - step * direction, mass_m, period)
            try:
                z_new = SurfaceProfile(trial, period)
                rq_new = evaluate(z_new)
            except (InvalidArgument, SolverDivergence):
                step *= opts.backtrack
                continue
            if rq_new.value <= rq.value:
                accepted = True
                break
            step *= opts.backtrack
        if not accepted:
            break
        zeta, rq = z_new, rq_new
        quotients.append(rq.value)
        masses.append(zeta.integral())
        step = min(step / opts.backtrack, opts.step0)
    norm, zb, rqb, resb, it = best
    sol = RayleighSolution(zb, rqb.value, rqb.psi, resb, it, tuple(quotients), tuple(masses),
                           converged=False)
    raise MaxIterExceeded(
        f"Rayleigh descent stopped with stream-Bernoulli residual {norm:.3e} "
        f"(tol {opts.tol:.1e}) after {len(quotients) - 1} accepted steps",
        best=sol, history=list(quotients))


def _stream_residual_any(zeta, rq):
    """Stream-Bernoulli residual with lambda = R, valid for any sign of R."""
    g = rq.psi.grid
    psi_y = g.ds(rq.psi.values)[-1] / g.h
    speed2 = psi_y**2 * (1.0 + g.hx**2)
    return SurfaceTrace(speed2 + 2.0 * rq.value * zeta.values - 1.0, zeta.period)
