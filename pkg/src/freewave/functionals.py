"""Energies and their variational gradients.

Conventions
-----------
* Gradients with respect to the surface are *vertical* variations.
* ``d_zeta`` of the Zakharov energy holds the harmonic function fixed in
  space (not its surface trace).  The fixed-trace gradient used for time
  stepping lives in :mod:`freewave.dynamics`.
* Capillary energy is ``sigma * (arc_length - period)`` so that the flat
  surface carries zero energy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuotient
from .geometry import (ProblemParams, SurfaceProfile, SurfaceTrace, curvature,
                       fourier_derivative, spectral_derivative, surface_integrals)
from .harmonic import (DEFAULT_M, DEFAULT_TOL, PotentialField, dno_of_field, harmonic_extend,
                       stream_function, trace_gradient)


@dataclass(frozen=True)
class EnergyReport:
    kinetic: float
    potential: float
    capillary: float

    @property
    def total(self) -> float:
        return self.kinetic + self.potential + self.capillary

    def as_dict(self):
        return {"kinetic": self.kinetic, "potential": self.potential,
                "capillary": self.capillary, "total": self.total}


@dataclass(frozen=True)
class GradientPair:
    d_zeta: SurfaceTrace
    d_phi: SurfaceTrace


def potential_energy(zeta: SurfaceProfile, params: ProblemParams) -> float:
    return 0.5 * params.lam * surface_integrals(zeta).mass2


def capillary_energy(zeta: SurfaceProfile, params: ProblemParams) -> float:
    if params.sigma == 0.0:
        return 0.0
    # arc length minus period without the cancellation of sqrt(1+s^2) - 1
    s2 = fourier_derivative(zeta, 1).values ** 2
    return params.sigma * float(np.sum(s2 / (np.sqrt(1.0 + s2) + 1.0)) * zeta.dx)


def capillary_gradient(zeta: SurfaceProfile, params: ProblemParams) -> SurfaceTrace:
    """Vertical gradient of the renormalized surface energy, ``-sigma * kappa``."""
    return SurfaceTrace(-params.sigma * curvature(zeta).values, zeta.period)


def _pair(zeta, a, b) -> float:
    return float(np.sum(a * b) * zeta.dx)


def zakharov_energy(zeta: SurfaceProfile, phi_s: SurfaceTrace, params: ProblemParams,
                    m: int = DEFAULT_M, tol: float = DEFAULT_TOL, solver=None) -> EnergyReport:
    """Kinetic + gravitational + capillary energy of the state (zeta, phi_s).

    Kinetic energy is evaluated on the surface as 1/2 <phi_s, G(zeta) phi_s>.
    """
    field_ = harmonic_extend(zeta, phi_s, m, tol, solver=solver)
    kinetic = 0.5 * _pair(zeta, phi_s.values, dno_of_field(field_).values)
    return EnergyReport(kinetic, potential_energy(zeta, params), capillary_energy(zeta, params))


def kinetic_energy_volume(field_: PotentialField) -> float:
    """1/2 of the Dirichlet integral, by volume quadrature."""
    return 0.5 * field_.dirichlet_energy()


def gradients_from_field(field_: PotentialField, params: ProblemParams) -> GradientPair:
    zeta = field_.grid.zeta
    tg = trace_gradient(field_)
    d_zeta = (0.5 * (tg.fx.values**2 + tg.fy.values**2) + params.lam * zeta.values
              + capillary_gradient(zeta, params).values)
    return GradientPair(SurfaceTrace(d_zeta, zeta.period), dno_of_field(field_))


def zakharov_gradients(zeta: SurfaceProfile, phi_s: SurfaceTrace, params: ProblemParams,
                       m: int = DEFAULT_M, tol: float = DEFAULT_TOL, solver=None) -> GradientPair:
    """(dH/dzeta, dH/dphi) with the spatial harmonic function held fixed."""
    field_ = harmonic_extend(zeta, phi_s, m, tol, solver=solver)
    return gradients_from_field(field_, params)


def traveling_functional(zeta: SurfaceProfile, phi_periodic_s: SurfaceTrace,
                         params: ProblemParams, m: int = DEFAULT_M, tol: float = DEFAULT_TOL,
                         solver=None) -> EnergyReport:
    """Renormalized moving-frame energy for phi = x + phi_p.

    Using  (grad phi)^2 - 1 = 2 d(phi_p)/dx + |grad phi_p|^2  and the
    divergence theorem,

        1/2 iint [(grad phi)^2 - 1] = -int phi_p zeta_x dx + 1/2 <phi_p, G phi_p>,

    which is the kinetic entry of the report.
    """
    field_ = harmonic_extend(zeta, phi_periodic_s, m, tol, solver=solver)
    zx = spectral_derivative(zeta.values, 1, zeta.period)
    p = phi_periodic_s.values
    kinetic = -_pair(zeta, p, zx) + 0.5 * _pair(zeta, p, dno_of_field(field_).values)
    return EnergyReport(kinetic, potential_energy(zeta, params), capillary_energy(zeta, params))


def traveling_gradient(zeta: SurfaceProfile, phi_periodic_s: SurfaceTrace,
                       params: ProblemParams, m: int = DEFAULT_M, tol: float = DEFAULT_TOL,
                       solver=None) -> GradientPair:
    """First variation of the renormalized functional.

    ``d_phi`` is the kinematic residual and ``d_zeta`` the Bernoulli
    residual (vertical variation, spatial potential held fixed).
    """
    field_ = harmonic_extend(zeta, phi_periodic_s, m, tol, stream=1.0, solver=solver)
    tg = trace_gradient(field_)
    d_zeta = (0.5 * (tg.fx.values**2 + tg.fy.values**2 - 1.0) + params.lam * zeta.values
              + capillary_gradient(zeta, params).values)
    return GradientPair(SurfaceTrace(d_zeta, zeta.period), dno_of_field(field_))


@dataclass(frozen=True)
class RayleighResult:
    value: float
    numerator: float
    denominator: float
    psi: PotentialField


def rayleigh_quotient(zeta: SurfaceProfile, params: ProblemParams | None = None,
                      m: int = DEFAULT_M, tol: float = DEFAULT_TOL, solver=None) -> RayleighResult:
    """Quotient iint[(grad psi)^2 - 1] / int zeta^2 at the harmonic minimizer psi.

    psi = 0 on the bottom and 1 on the surface; for fixed zeta the inner
    minimization over psi is exactly the harmonic solve.
    """
    denominator = surface_integrals(zeta).mass2
    if denominator <= 0.0:
        raise DegenerateQuotient("int zeta^2 = 0: the quotient is 0/0 for the flat surface")
    psi = stream_function(zeta, m, tol, solver=solver)
    numerator = psi.dirichlet_energy() - float(np.sum(zeta.depth) * zeta.dx)
    return RayleighResult(numerator / denominator, numerator, denominator, psi)


def dirichlet_numerator(zeta: SurfaceProfile, psi_values, grid) -> float:
    """iint [(grad psi)^2 - 1] for an arbitrary trial psi on ``grid``."""
    fx, fy = grid.grad(np.asarray(psi_values))
    return grid.integrate(fx**2 + fy**2) - float(np.sum(zeta.depth) * zeta.dx)
