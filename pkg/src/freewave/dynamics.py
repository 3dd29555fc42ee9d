"""Canonical time evolution of the surface variables (zeta, phi_s).

The evolved potential variable is the surface trace
``phi_s(x, t) = phi(x, 1 + zeta(x, t), t)``.  Differentiating the trace
gives ``phi_s_t = phi_t + phi_y zeta_t``, so with the Bernoulli equation at
fixed points

    zeta_t  = G(zeta) phi_s
    phi_s_t = -|grad phi|^2 / 2 - lam zeta + sigma kappa + phi_y G(zeta) phi_s

The second line is minus the fixed-trace gradient of the Hamiltonian; the
fixed-space gradient from :mod:`freewave.functionals` differs from it by
``phi_y G(zeta) phi_s``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import BlowUp, InvalidArgument, InvalidProfile, SolverDivergence
from .functionals import GradientPair, capillary_energy, potential_energy
from .geometry import ProblemParams, SurfaceProfile, SurfaceTrace, curvature
from .harmonic import (DEFAULT_M, DEFAULT_TOL, HarmonicSolver, dno_of_field, harmonic_extend,
                       trace_gradient)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CanonicalState:
    zeta: SurfaceProfile
    phi_s: SurfaceTrace
    t: float = 0.0

    def __post_init__(self):
        self.zeta._same_grid(self.phi_s)

    @property
    def n(self) -> int:
        return self.zeta.n


@dataclass(frozen=True)
class CanonicalRHS:
    zeta_dot: SurfaceTrace
    phi_dot: SurfaceTrace
    energy: float


def _rhs(state: CanonicalState, params: ProblemParams, m, tol, solver):
    field_ = harmonic_extend(state.zeta, state.phi_s, m, tol, solver=solver)
    G = dno_of_field(field_).values
    tg = trace_gradient(field_)
    fx, fy = tg.fx.values, tg.fy.values
    phi_dot = -0.5 * (fx**2 + fy**2) - params.lam * state.zeta.values + fy * G
    if params.sigma:
        phi_dot = phi_dot + params.sigma * curvature(state.zeta).values
    kinetic = 0.5 * float(np.sum(state.phi_s.values * G) * state.zeta.dx)
    energy = kinetic + potential_energy(state.zeta, params) + capillary_energy(state.zeta, params)
    period = state.zeta.period
    return CanonicalRHS(SurfaceTrace(G, period), SurfaceTrace(phi_dot, period), energy)


def canonical_rhs(state: CanonicalState, params: ProblemParams, m: int = DEFAULT_M,
                  tol: float = DEFAULT_TOL, solver=None) -> CanonicalRHS:
    """Time derivatives of (zeta, phi_s); also reports H at the state."""
    return _rhs(state, params, m, tol, solver or HarmonicSolver())


def hamiltonian_gradients(state: CanonicalState, params: ProblemParams, m: int = DEFAULT_M,
                          tol: float = DEFAULT_TOL, solver=None) -> GradientPair:
    """Fixed-trace gradients (dH/dzeta, dH/dphi_s) of the Hamiltonian."""
    r = canonical_rhs(state, params, m, tol, solver)
    return GradientPair(-r.phi_dot, r.zeta_dot)


def canonical_bracket(grad_f: GradientPair, grad_g: GradientPair) -> float:
    """{F, G} = int (dF/dphi dG/dzeta - dF/dzeta dG/dphi) dx."""
    fz, fp = grad_f.d_zeta, grad_f.d_phi
    gz, gp = grad_g.d_zeta, grad_g.d_phi
    for a in (fp, gz, gp):
        fz._same_grid(a)
    return float(np.sum(fp.values * gz.values - fz.values * gp.values) * fz.dx)


def mass_gradient(zeta: SurfaceProfile) -> GradientPair:
    one = SurfaceTrace(np.ones(zeta.n), zeta.period)
    return GradientPair(one, SurfaceTrace(np.zeros(zeta.n), zeta.period))


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    times: np.ndarray
    energy: np.ndarray
    mass: np.ndarray

    @property
    def final(self) -> CanonicalState:
        return self.states[-1]

    def relative_energy_drift(self) -> float:
        e0 = self.energy[0]
        scale = abs(e0) if e0 != 0.0 else 1.0
        return float(np.max(np.abs(self.energy - e0)) / scale)

    def mass_drift(self) -> float:
        return float(np.max(np.abs(self.mass - self.mass[0])))


def _advance(state, k, dt, period):
    z = state.zeta.values + dt * k[0]
    p = state.phi_s.values + dt * k[1]
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(p))):
        raise FloatingPointError("non-finite state")
    return CanonicalState(SurfaceProfile(z, period), SurfaceTrace(p, period), state.t)


def evolve(state0: CanonicalState, params: ProblemParams, dt: float, n_steps: int,
           integrator: str = "rk4", m: int = DEFAULT_M, tol: float = DEFAULT_TOL,
           solver: HarmonicSolver | None = None, keep_every: int = 1) -> Trajectory:
    """Classical RK4 integration, logging H and mass at every step.

    The log has ``n_steps + 1`` entries including t = 0; snapshots are kept
    every ``keep_every`` steps (and always the last one).  A non-finite
    value or an invalid surface aborts with :class:`BlowUp` carrying the
    last good state.
    """
    if integrator != "rk4":
        raise InvalidArgument(f"unknown integrator {integrator!r}")
    if not (np.isfinite(dt) and dt > 0):
        raise InvalidArgument("dt must be positive")
    if int(n_steps) != n_steps or n_steps < 0:
        raise InvalidArgument("n_steps must be a nonnegative integer")
    solver = solver or HarmonicSolver()
    period = state0.zeta.period

    def f(s):
        r = _rhs(s, params, m, tol, solver)
        return (r.zeta_dot.values, r.phi_dot.values), r.energy

    state = state0
    k1, e = f(state)
    cfl = dt * float(np.max(np.abs(k1[0])))
    if cfl >= state.zeta.dx:
        raise InvalidArgument(f"time step too large: dt*max|zeta_t| = {cfl:.3e} >= dx")
    times, energy, mass = [state.t], [e], [state.zeta.integral()]
    states = [state]
    for step in range(1, int(n_steps) + 1):
        try:
            k2, _ = f(_advance(state, k1, 0.5 * dt, period))
            k3, _ = f(_advance(state, k2, 0.5 * dt, period))
            k4, _ = f(_advance(state, k3, dt, period))
            incr = [(a + 2 * b + 2 * c + d) / 6.0 for a, b, c, d in zip(k1, k2, k3, k4)]
            new = _advance(state, incr, dt, period)
            state = CanonicalState(new.zeta, new.phi_s, state0.t + step * dt)
            k1, e = f(state)
        except (FloatingPointError, InvalidProfile, SolverDivergence) as exc:
            raise BlowUp(f"evolution failed at step {step} (t = {state.t:.6g}): {exc}",
                         last_state=state) from exc
        times.append(state.t)
        energy.append(e)
        mass.append(state.zeta.integral())
        if step % keep_every == 0 or step == n_steps:
            states.append(state)
        log.debug("step %d t=%.6g H=%.16g", step, state.t, e)
    return Trajectory(tuple(states), np.array(times), np.array(energy), np.array(mass))


def rest_frame_state(wave) -> CanonicalState:
    """Lab-frame initial data of a traveling wave.

    Removing the uniform stream leaves (zeta, phi_p); this state translates
    toward -x at unit speed with no drift of the potential gauge.
    """
    return CanonicalState(wave.zeta, wave.phi_p_s, 0.0)


def standing_wave_state(n: int, amplitude: float, k: int = 1, period: float = 2 * np.pi,
                        ) -> CanonicalState:
    """zeta = a cos(k x), phi_s = 0: a superposition of two counter-propagating waves."""
    x = np.arange(n) * period / n
    k0 = 2 * np.pi / period
    zeta = SurfaceProfile(amplitude * np.cos(k * k0 * x), period)
    return CanonicalState(zeta, SurfaceTrace(np.zeros(n), period), 0.0)


def linear_frequency(k: float, lam: float = 1.0, depth: float = 1.0) -> float:
    """omega = sqrt(lam k tanh(k depth))."""
    return float(np.sqrt(lam * k * np.tanh(k * depth)))
