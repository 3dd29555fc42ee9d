"""Laplace's equation on the periodic strip ``0 <= y <= 1 + zeta(x)``.

The domain is mapped to the rectangle ``0 <= s <= 1`` through
``y = s * h(x)`` with ``h = 1 + zeta``.  Derivatives are Fourier in x and
Chebyshev (Gauss-Lobatto) in s, so in mapped coordinates

    d/dx|_y = d/dx|_s - s (h_x / h) d/ds,      d/dy = (1 / h) d/ds,

and the Laplacian is the composition of these two operators.  Interior
collocation rows are multiplied by ``h**2`` before solving.

Variable naming: x is horizontal and y vertical.  Where a 3D formula reads
``phi_z - phi_x zeta_x - phi_y zeta_y`` the 2D version used here is
``phi_y - zeta_x phi_x``.

A uniform stream ``c * x`` is carried analytically by :class:`PotentialField`
(``stream`` attribute); only the periodic correction is solved for.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import CompatibilityViolation, InvalidArgument, SolverDivergence
from .geometry import SurfaceProfile, SurfaceTrace, spectral_derivative, wavenumbers

DEFAULT_M = 24
DEFAULT_TOL = 1e-8


def cheb(m: int):
    """Chebyshev-Lobatto points on [0, 1] (bottom first) and d/ds matrix."""
    t = np.cos(np.pi * np.arange(m + 1) / m)
    c = np.ones(m + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(m + 1)
    dt = t[:, None] - t[None, :]
    D = np.outer(c, 1.0 / c) / (dt + np.eye(m + 1))
    D -= np.diag(D.sum(axis=1))
    s = (1.0 - t) / 2.0
    return s, -2.0 * D


def clenshaw_curtis(m: int) -> np.ndarray:
    """Quadrature weights on [0, 1] for the points of :func:`cheb`."""
    theta = np.pi * np.arange(m + 1) / m
    w = np.zeros(m + 1)
    v = np.ones(m - 1)
    if m % 2 == 0:
        w[0] = w[m] = 1.0 / (m**2 - 1)
        for k in range(1, m // 2):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k**2 - 1)
        v -= np.cos(m * theta[1:-1]) / (m**2 - 1)
    else:
        w[0] = w[m] = 1.0 / m**2
        for k in range(1, (m - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k**2 - 1)
    w[1:-1] = 2.0 * v / m
    return w / 2.0


class SigmaGrid:
    """Mapped n x (m+1) lattice over the fluid domain of ``zeta``.

    Arrays on the grid have shape ``(m + 1, n)``: row j is the level
    ``s_j`` (row 0 is the bottom, row m the free surface).
    """

    def __init__(self, zeta: SurfaceProfile, m: int = DEFAULT_M):
        if int(m) != m or m < 8:
            raise InvalidArgument(f"vertical level count must be >= 8, got {m}")
        self.zeta = zeta
        self.m = int(m)
        self.s, self.Ds = cheb(self.m)
        self.Dss = self.Ds @ self.Ds
        self.ws = clenshaw_curtis(self.m)
        self.h = zeta.depth
        self.hx = spectral_derivative(zeta.values, 1, zeta.period)
        self.S = self.s[:, None] * (self.hx / self.h)[None, :]

    @property
    def n(self) -> int:
        return self.zeta.n

    @property
    def period(self) -> float:
        return self.zeta.period

    @property
    def shape(self):
        return (self.m + 1, self.n)

    @property
    def x(self) -> np.ndarray:
        return self.zeta.x

    @property
    def y(self) -> np.ndarray:
        """Physical heights of all nodes."""
        return self.s[:, None] * self.h[None, :]

    def key(self):
        return (self.zeta.values.tobytes(), self.zeta.period, self.m)

    def dx(self, U):
        return spectral_derivative(U, 1, self.period)

    def ds(self, U):
        return np.matmul(self.Ds, U)

    def grad(self, U):
        """Physical (d/dx, d/dy) of a grid function."""
        Us = self.ds(U)
        return self.dx(U) - self.S * Us, Us / self.h

    def laplacian(self, U):
        ux, uy = self.grad(U)
        return self.grad(ux)[0] + self.grad(uy)[1]

    def divergence(self, u, v):
        return self.grad(u)[0] + self.grad(v)[1]

    def integrate(self, F) -> float:
        """Quadrature of F over the fluid domain (dx dy = h ds dx)."""
        return float(np.sum(self.ws[:, None] * F * self.h[None, :]) * self.zeta.dx)

    def surface_flux(self, U):
        """(phi_y - zeta_x phi_x) on the surface for the grid function U."""
        Us_top = self.ds(U)[..., -1, :]
        Ux_top = self.dx(U[..., -1, :])
        return Us_top * (1.0 + self.hx**2) / self.h - self.hx * Ux_top


@dataclass(frozen=True)
class PotentialField:
    """Scalar field ``stream * x + values`` on a sigma grid.

    ``values`` holds the periodic part on all nodes; ``residual`` is the
    max-norm of the discrete Laplacian at interior nodes after the solve.
    """

    grid: SigmaGrid
    values: np.ndarray
    stream: float = 0.0
    residual: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise InvalidArgument(f"field shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise SolverDivergence("non-finite potential values", residual=np.inf)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def gradient(self):
        """Cartesian velocity components on all nodes."""
        fx, fy = self.grid.grad(self.values)
        return fx + self.stream, fy

    def surface_values(self) -> SurfaceTrace:
        """Trace of the periodic part on the free surface."""
        return SurfaceTrace(self.values[-1], self.grid.period)

    def full_values(self) -> np.ndarray:
        return self.values + self.stream * self.grid.x[None, :]

    def laplacian_residual(self) -> float:
        lap = self.grid.laplacian(self.values)
        return float(np.max(np.abs(lap[1:-1]))) if lap.shape[0] > 2 else 0.0

    def dirichlet_energy(self) -> float:
        """Integral of |grad(phi)|**2 over the domain."""
        fx, fy = self.gradient()
        return self.grid.integrate(fx**2 + fy**2)


# Boundary-condition codes for the generic strip solve.
DIRICHLET = "dirichlet"
NEUMANN = "neumann"


class HarmonicSolver:
    """Solver context with caches keyed on the surface geometry.

    ``method`` is ``"direct"`` (dense LU, cached per geometry and boundary
    type), ``"krylov"`` (GMRES preconditioned by the mean-depth flat strip,
    Dirichlet top only) or ``"auto"``.  A context is not thread safe; use
    one per worker.
    """

    def __init__(self, method: str = "auto", krylov_threshold: int = 600, max_cache: int = 8,
                 krylov_rtol: float = 1e-13):
        if method not in ("auto", "direct", "krylov"):
            raise InvalidArgument(f"unknown solve method {method!r}")
        self.method = method
        self.krylov_threshold = krylov_threshold
        self.max_cache = max_cache
        self.krylov_rtol = krylov_rtol
        self._grids: dict = {}
        self._lu: dict = {}
        self._prec: dict = {}
        self.stats = {"direct_factorizations": 0, "krylov_solves": 0, "krylov_iterations": 0,
                      "separable_solves": 0}

    def grid(self, zeta: SurfaceProfile, m: int = DEFAULT_M) -> SigmaGrid:
        key = (zeta.values.tobytes(), zeta.period, int(m))
        g = self._grids.get(key)
        if g is None:
            g = SigmaGrid(zeta, m)
            self._remember(self._grids, key, g)
        return g

    def _remember(self, cache, key, value):
        if len(cache) >= self.max_cache:
            cache.pop(next(iter(cache)))
        cache[key] = value

    # -- operator -----------------------------------------------------------
    @staticmethod
    def _apply(grid: SigmaGrid, U, bottom: str, top: str):
        """Collocation operator: scaled Laplacian inside, boundary rows at the ends."""
        out = grid.laplacian(U) * grid.h**2
        Us = grid.ds(U)
        if bottom == NEUMANN:
            out[..., 0, :] = Us[..., 0, :]
        else:
            out[..., 0, :] = U[..., 0, :]
        if top == NEUMANN:
            out[..., -1, :] = grid.surface_flux(U)
        else:
            out[..., -1, :] = U[..., -1, :]
        return out

    def _dense(self, grid, bottom, top):
        N = grid.m + 1
        n = grid.n
        eye = np.eye(N * n).reshape(N * n, N, n)
        cols = self._apply(grid, eye, bottom, top)
        return cols.reshape(N * n, N * n).T

    def _factor(self, grid, bottom, top):
        key = grid.key() + (bottom, top)
        lu = self._lu.get(key)
        if lu is None:
            A = self._dense(grid, bottom, top)
            lu = sla.lu_factor(A, check_finite=False)
            self.stats["direct_factorizations"] += 1
            self._remember(self._lu, key, lu)
        return lu

    def _preconditioner(self, grid, bottom):
        hbar = float(np.mean(grid.h))
        key = (grid.n, grid.period, grid.m, hbar, bottom)
        P = self._prec.get(key)
        if P is None:
            kk = wavenumbers(grid.n, grid.period)
            # the discrete x-Laplacian (two first derivatives) annihilates the Nyquist mode
            kk[-1] = 0.0
            N = grid.m + 1
            mats = np.empty((kk.size, N, N))
            for i, kappa in enumerate(kk):
                A = grid.Dss - (hbar * kappa) ** 2 * np.eye(N)
                A[0] = grid.Ds[0] if bottom == NEUMANN else np.eye(N)[0]
                A[-1] = np.eye(N)[-1]
                mats[i] = np.linalg.inv(A)
            P = mats
            self._remember(self._prec, key, P)
        return P

    def _flat_inverse(self, grid, bottom):
        """Mode-by-mode inverse of the constant-depth operator (Dirichlet top)."""
        P = self._preconditioner(grid, bottom)
        shape = grid.shape
        n = grid.n

        def apply(v):
            R = np.fft.rfft(v.reshape(shape), axis=1)
            X = np.einsum("kij,jk->ik", P, R)
            return np.fft.irfft(X, n, axis=1).ravel()
        return apply

    def _krylov(self, grid, rhs, bottom):
        shape = grid.shape
        prec = self._flat_inverse(grid, bottom)

        def op(v):
            return self._apply(grid, v.reshape(shape), bottom, DIRICHLET).ravel()

        b = rhs.ravel()
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            return np.zeros(shape)
        # right preconditioning keeps the monitored residual equal to the true one
        AP = LinearOperator((b.size, b.size), matvec=lambda y: op(prec(y)), dtype=float)
        iters = [0]

        def count(_):
            iters[0] += 1

        x = np.zeros_like(b)
        r = b
        for _ in range(3):
            y, _info = gmres(AP, r, rtol=self.krylov_rtol, atol=0.0, restart=60, maxiter=4,
                             callback=count, callback_type="pr_norm")
            x = x + prec(y)
            r_new = b - op(x)
            if np.linalg.norm(r_new) >= 0.5 * np.linalg.norm(r):
                break
            r = r_new
        self.stats["krylov_solves"] += 1
        self.stats["krylov_iterations"] += iters[0]
        return x.reshape(shape)

    def solve(self, grid: SigmaGrid, interior=None, bottom=(NEUMANN, None), top=(DIRICHLET, None)):
        """Solve the boundary-value problem on ``grid``.

        ``interior`` is the right-hand side of the (unscaled) Laplacian at
        interior nodes; ``bottom``/``top`` are ``(kind, data)`` pairs where
        Neumann data are ``d/ds`` values at the bottom and flux values
        ``phi_y - zeta_x phi_x`` at the top.
        """
        bkind, bdata = bottom
        tkind, tdata = top
        if NEUMANN == bkind == tkind:
            raise InvalidArgument("pure Neumann problems go through solve_neumann")
        rhs = np.zeros(grid.shape)
        if interior is not None:
            rhs[1:-1] = (np.asarray(interior) * grid.h**2)[1:-1]
        if bdata is not None:
            rhs[0] = bdata
        if tdata is not None:
            rhs[-1] = tdata
        if tkind == DIRICHLET and not np.any(grid.hx) and np.ptp(grid.h) == 0.0:
            # constant depth separates in x: the flat-strip preconditioner is exact
            self.stats["separable_solves"] += 1
            return self._flat_inverse(grid, bkind)(rhs).reshape(grid.shape)
        method = self.method
        if method == "auto":
            method = "krylov" if grid.shape[0] * grid.shape[1] > self.krylov_threshold else "direct"
        if method == "krylov" and tkind == DIRICHLET:
            return self._krylov(grid, rhs, bkind)
        lu = self._factor(grid, bkind, tkind)
        return sla.lu_solve(lu, rhs.ravel(), check_finite=False).reshape(grid.shape)

    def solve_neumann(self, grid: SigmaGrid, interior=None, bottom_ds=None, top_flux=None):
        """Pure Neumann problem with zero-mean gauge.

        The discrete operator has two null vectors: constants, and the
        x-Nyquist mode (-1)^j constant in s, whose spectral x-derivative is
        zero.  Two bordering columns add unknown multiples of both patterns to
        the top-flux rows (absorbing the discrete solvability defects) and two
        rows fix the volume mean of both patterns to zero.  Returns
        ``(U, defect)`` with ``defect`` the constant absorbed by the top flux.
        """
        key = grid.key() + ("neumann-bordered",)
        lu = self._lu.get(key)
        size = grid.shape[0] * grid.shape[1]
        alt = (-1.0) ** np.arange(grid.n)
        if lu is None:
            A = np.zeros((size + 2, size + 2))
            A[:size, :size] = self._dense(grid, NEUMANN, NEUMANN)
            for c, pattern in enumerate((np.ones(grid.n), alt)):
                top_rows = np.zeros(grid.shape)
                top_rows[-1] = pattern
                A[:size, size + c] = -top_rows.ravel()
                A[size + c, :size] = (grid.ws[:, None] * (grid.h * pattern)[None, :]).ravel()
            lu = sla.lu_factor(A, check_finite=False)
            self.stats["direct_factorizations"] += 1
            self._remember(self._lu, key, lu)
        rhs = np.zeros(size + 2)
        R = np.zeros(grid.shape)
        if interior is not None:
            R[1:-1] = (np.asarray(interior) * grid.h**2)[1:-1]
        if bottom_ds is not None:
            R[0] = bottom_ds
        if top_flux is not None:
            R[-1] = top_flux
        rhs[:size] = R.ravel()
        sol = sla.lu_solve(lu, rhs, check_finite=False)
        return sol[:size].reshape(grid.shape), float(sol[size])


def _context(solver):
    return solver if solver is not None else HarmonicSolver()


def _check_trace(zeta: SurfaceProfile, trace: SurfaceTrace):
    if trace.n != zeta.n or not np.isclose(trace.period, zeta.period):
        raise InvalidArgument("trace and profile grids differ")


def _finish(grid, U, stream, tol, what):
    field_ = PotentialField(grid, U, stream=stream)
    res = field_.laplacian_residual()
    if not np.isfinite(res) or res >= tol:
        raise SolverDivergence(f"{what}: Laplacian residual {res:.3e} not below tol {tol:.1e}",
                               residual=res)
    return PotentialField(grid, U, stream=stream, residual=res)


def harmonic_extend(zeta: SurfaceProfile, surface_dirichlet: SurfaceTrace, m: int = DEFAULT_M,
                    tol: float = DEFAULT_TOL, stream: float = 0.0, solver=None) -> PotentialField:
    """Harmonic function with the given surface values and no bottom flux.

    With ``stream != 0`` the returned field is ``stream * x + periodic`` and
    ``surface_dirichlet`` prescribes the periodic part of the trace; ``x``
    itself is harmonic with zero bottom flux and needs no solve.
    """
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    _check_trace(zeta, surface_dirichlet)
    ctx = _context(solver)
    grid = ctx.grid(zeta, m)
    U = ctx.solve(grid, bottom=(NEUMANN, None), top=(DIRICHLET, surface_dirichlet.values))
    return _finish(grid, U, stream, tol, "harmonic_extend")


def neumann_extend(zeta: SurfaceProfile, surface_neumann: SurfaceTrace, m: int = DEFAULT_M,
                   tol: float = DEFAULT_TOL, solver=None, bottom_neumann=None) -> PotentialField:
    """Harmonic function whose outward normal derivative on the surface is given.

    ``bottom_neumann`` optionally gives the outward normal derivative on
    ``y = 0`` (default zero).  The net flux must vanish; the result has zero
    mean over the domain.
    """
    _check_trace(zeta, surface_neumann)
    zx = spectral_derivative(zeta.values, 1, zeta.period)
    top_flux = surface_neumann.values * np.sqrt(1.0 + zx**2)
    flux = float(np.sum(top_flux) * zeta.dx)
    bottom_ds = None
    if bottom_neumann is not None:
        bvals = np.asarray(getattr(bottom_neumann, "values", bottom_neumann), dtype=float)
        flux += float(np.sum(bvals) * zeta.dx)
        # outward normal at the bottom is -y, and d/dy = (1/h) d/ds
        bottom_ds = -bvals * zeta.depth
    if abs(flux) > 1e-10:
        raise CompatibilityViolation(f"Neumann data carry net flux {flux:.3e}", flux=flux)
    ctx = _context(solver)
    grid = ctx.grid(zeta, m)
    U, _ = ctx.solve_neumann(grid, bottom_ds=bottom_ds, top_flux=top_flux)
    return _finish(grid, U, 0.0, tol, "neumann_extend")


def dno_apply(zeta: SurfaceProfile, phi_s: SurfaceTrace, m: int = DEFAULT_M,
              tol: float = DEFAULT_TOL, solver=None) -> SurfaceTrace:
    """Dirichlet-Neumann operator: ``phi_y - zeta_x phi_x`` on the surface."""
    field_ = harmonic_extend(zeta, phi_s, m, tol, solver=solver)
    return dno_of_field(field_)


def dno_of_field(field_: PotentialField) -> SurfaceTrace:
    g = field_.grid
    flux = g.surface_flux(field_.values) - g.hx * field_.stream
    return SurfaceTrace(flux, g.period)


@dataclass(frozen=True)
class TraceGradient:
    fx: SurfaceTrace
    fy: SurfaceTrace


def trace_gradient(field_: PotentialField) -> TraceGradient:
    """Cartesian gradient of the field evaluated on the free surface."""
    g = field_.grid
    U = field_.values
    Us_top = g.ds(U)[-1]
    fx = g.dx(U[-1]) - (g.hx / g.h) * Us_top + field_.stream
    fy = Us_top / g.h
    return TraceGradient(SurfaceTrace(fx, g.period), SurfaceTrace(fy, g.period))


def stream_function(zeta: SurfaceProfile, m: int = DEFAULT_M, tol: float = DEFAULT_TOL,
                    solver=None) -> PotentialField:
    """Harmonic psi with psi = 0 on the bottom and psi = 1 on the surface.

    Solved as ``psi = s + chi`` with chi vanishing on both boundaries.
    """
    ctx = _context(solver)
    grid = ctx.grid(zeta, m)
    base = np.repeat(grid.s[:, None], grid.n, axis=1)
    chi = ctx.solve(grid, interior=-grid.laplacian(base), bottom=(DIRICHLET, None),
                    top=(DIRICHLET, None))
    return _finish(grid, base + chi, 0.0, tol, "stream_function")
