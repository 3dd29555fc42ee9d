"""Surface residuals of the traveling-wave and stream-function problems.

In the frame moving with the wave the speed is scaled to one, so the
potential is ``phi = x + phi_p`` with periodic ``phi_p`` and the Bernoulli
constant is 1/2.  In the stream-function formulation the constant is 1
(``(grad psi)^2 + 2 lam zeta = 1``).  Both constants are recorded in the
reports rather than assumed downstream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .geometry import ProblemParams, SurfaceProfile, SurfaceTrace
from .harmonic import DEFAULT_M, DEFAULT_TOL, PotentialField, stream_function
from .functionals import traveling_gradient

MOVING_FRAME_BERNOULLI = 0.5
STREAM_BERNOULLI = 1.0


@dataclass(frozen=True)
class ResidualReport:
    kinematic: SurfaceTrace
    bernoulli: SurfaceTrace
    lam: float
    sigma: float
    bernoulli_constant: float = MOVING_FRAME_BERNOULLI

    @property
    def kinematic_norm(self) -> float:
        return self.kinematic.max_norm()

    @property
    def bernoulli_norm(self) -> float:
        return self.bernoulli.max_norm()

    @property
    def max_norm(self) -> float:
        return max(self.kinematic_norm, self.bernoulli_norm)

    def as_dict(self):
        return {"kinematic_max": self.kinematic_norm, "bernoulli_max": self.bernoulli_norm,
                "lambda": self.lam, "sigma": self.sigma,
                "bernoulli_constant": self.bernoulli_constant}


def traveling_residuals(zeta: SurfaceProfile, phi_periodic_s: SurfaceTrace,
                        params: ProblemParams, m: int = DEFAULT_M, tol: float = DEFAULT_TOL,
                        solver=None) -> ResidualReport:
    """Kinematic and Bernoulli residuals of phi = x + phi_p on the surface.

    kinematic = phi_y - zeta_x phi_x
    bernoulli = (phi_x^2 + phi_y^2)/2 + lam zeta - sigma kappa - 1/2
    """
    g = traveling_gradient(zeta, phi_periodic_s, params, m, tol, solver=solver)
    return ResidualReport(g.d_phi, g.d_zeta, params.lam, params.sigma)


def stream_bernoulli_residual(zeta: SurfaceProfile, params: ProblemParams, m: int = DEFAULT_M,
                              tol: float = DEFAULT_TOL, psi: PotentialField | None = None,
                              solver=None) -> SurfaceTrace:
    """``(grad psi)^2 + 2 lam zeta - 1`` on the surface.

    psi is the harmonic function with psi = 0 on the bottom, 1 on the surface.
    Along the surface psi_x = -zeta_x psi_y, so (grad psi)^2 = psi_y^2 (1 + zeta_x^2).
    """
    if psi is None:
        psi = stream_function(zeta, m, tol, solver=solver)
    g = psi.grid
    psi_y = g.ds(psi.values)[-1] / g.h
    speed2 = psi_y**2 * (1.0 + g.hx**2)
    return SurfaceTrace(speed2 + 2.0 * params.lam * zeta.values - STREAM_BERNOULLI, zeta.period)


def critical_lambda(k: float, depth: float = 1.0) -> float:
    """Linear bifurcation value ``k / tanh(k)`` of the flat stream (unit depth)."""
    if not np.isfinite(k) or k <= 0:
        raise InvalidArgument(f"wavenumber must be positive, got {k}")
    kh = k * depth
    if kh < 1e-4:
        # series of x / tanh(x) avoids cancellation
        return 1.0 + kh**2 / 3.0 - kh**4 / 45.0
    return float(kh / np.tanh(kh))


def boost_identity_check(phi_field: PotentialField, phi_t, c: float, q_rate: float) -> float:
    """Galilean boost audit of the unsteady Bernoulli combination.

    The boosted potential is phi'(x', y, t') = phi(x' + c t', y, t') - c x + q(t').
    Its moving-frame derivatives are formed by the chain rule on the grid
    (d/dt' = d/dt + c d/dx, d/dx' = d/dx) and compared with the
    stationary-frame choice ``q' = c^2``:

        max | phi'_t' + |grad' phi'|^2 / 2 - (phi_t + |grad phi|^2 / 2 + c^2 / 2) |

    which vanishes for ``q_rate == c**2`` and equals ``|q_rate - c**2|``
    otherwise.  ``phi_t`` are samples of the time derivative at fixed (x, y)
    on the field's nodes.
    """
    phi_t = np.asarray(getattr(phi_t, "values", phi_t), dtype=float)
    fx, fy = phi_field.gradient()
    if phi_t.shape != fx.shape:
        raise InvalidArgument("phi_t must be sampled on the field's nodes")
    # phi' = phi - c x + q;  x = x' + c t'
    dphi_dtp = phi_t + c * fx - c * c + q_rate
    fxp = fx - c
    lhs = dphi_dtp + 0.5 * (fxp**2 + fy**2)
    rhs = phi_t + 0.5 * (fx**2 + fy**2) + 0.5 * c * c
    return float(np.max(np.abs(lhs - rhs)))
