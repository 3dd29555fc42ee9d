"""Free-surface water waves on a periodic strip of unit depth.

Spectral sigma-coordinate Laplace solver, Dirichlet-Neumann operator,
Hamiltonian energies and gradients, traveling-wave solvers, canonical time
evolution, and vector-field diagnostics.
"""
__version__ = "0.1.0"

from .errors import (BlowUp, CompatibilityViolation, DegenerateQuotient, FlatCollapse,
                     FreewaveError, InvalidArgument, InvalidProfile, MaxIterExceeded,
                     ResolutionInsufficient, SolverDivergence)
from .geometry import (ProblemParams, SurfaceProfile, SurfaceTrace, curvature,
                       fourier_derivative, normal_to_vertical, surface_integrals,
                       vertical_to_normal)
from .harmonic import (HarmonicSolver, PotentialField, SigmaGrid, dno_apply, harmonic_extend,
                       neumann_extend, stream_function, trace_gradient)
from .functionals import (EnergyReport, GradientPair, capillary_energy, capillary_gradient,
                          rayleigh_quotient, traveling_functional, traveling_gradient,
                          zakharov_energy, zakharov_gradients)
from .residuals import (ResidualReport, boost_identity_check, critical_lambda,
                        stream_bernoulli_residual, traveling_residuals)
from .solvers import (RayleighSolution, SolveOptions, SweepResult, TravelingWave,
                      continuation_sweep, newton_traveling, rayleigh_minimize)
from .dynamics import (CanonicalState, canonical_bracket, canonical_rhs, evolve,
                       hamiltonian_gradients)
from .fields import (TorusGrid, VectorField2D, arnold_bracket, leray_project, weyl_hodge)
