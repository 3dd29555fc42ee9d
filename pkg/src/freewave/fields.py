"""Vector fields on the periodic strip and the flat torus.

* :func:`leray_project` splits any field into a divergence-free part with
  zero normal flux and a gradient.
* :func:`weyl_hodge` splits a divergence-free strip field into a part
  tangent to the boundary and the gradient of a harmonic function.
* :func:`arnold_bracket` evaluates the vorticity bracket of two
  divergence-free functional gradients on the torus.

Scalar potentials are gauge-fixed to zero mean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .geometry import TWO_PI, SurfaceProfile
from .harmonic import DEFAULT_M, DEFAULT_TOL, HarmonicSolver, PotentialField, SigmaGrid

TORUS = "torus"
STRIP = "strip"


class TorusGrid:
    """Uniform ny x nx grid on [0, Lx) x [0, Ly) with spectral derivatives."""

    def __init__(self, nx: int = 64, ny: int | None = None, Lx: float = TWO_PI,
                 Ly: float | None = None):
        ny = nx if ny is None else ny
        Ly = Lx if Ly is None else Ly
        for n in (nx, ny):
            if int(n) != n or n < 4 or n % 2:
                raise InvalidArgument(f"torus sizes must be even and >= 4, got {n}")
        self.nx, self.ny, self.Lx, self.Ly = int(nx), int(ny), float(Lx), float(Ly)
        kx = TWO_PI / self.Lx * np.fft.fftfreq(self.nx, 1.0 / self.nx)
        ky = TWO_PI / self.Ly * np.fft.fftfreq(self.ny, 1.0 / self.ny)
        # first-derivative symbols drop the Nyquist mode
        kx[self.nx // 2] = 0.0
        ky[self.ny // 2] = 0.0
        self.KX, self.KY = np.meshgrid(kx, ky)

    @property
    def shape(self):
        return (self.ny, self.nx)

    @property
    def mesh(self):
        x = np.arange(self.nx) * self.Lx / self.nx
        y = np.arange(self.ny) * self.Ly / self.ny
        return np.meshgrid(x, y)

    def dx(self, U):
        return np.real(np.fft.ifft2(1j * self.KX * np.fft.fft2(U)))

    def dy(self, U):
        return np.real(np.fft.ifft2(1j * self.KY * np.fft.fft2(U)))

    def grad(self, U):
        return self.dx(U), self.dy(U)

    def divergence(self, u, v):
        return self.dx(u) + self.dy(v)

    def integrate(self, F) -> float:
        return float(np.sum(F) * (self.Lx / self.nx) * (self.Ly / self.ny))


@dataclass(frozen=True)
class VectorField2D:
    """Components (u, v) on a :class:`TorusGrid` or a :class:`SigmaGrid`."""

    grid: object
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        v = np.array(self.v, dtype=float)
        if u.shape != self.grid.shape or v.shape != self.grid.shape:
            raise InvalidArgument("vector components must match the grid shape")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise InvalidArgument("vector components must be finite")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def domain_kind(self) -> str:
        return TORUS if isinstance(self.grid, TorusGrid) else STRIP

    @classmethod
    def gradient_of(cls, grid, U):
        return cls(grid, *grid.grad(np.asarray(U, dtype=float)))

    def divergence(self):
        return self.grid.divergence(self.u, self.v)

    def curl(self):
        """Scalar vorticity d v / dx - d u / dy."""
        return self.grid.grad(self.v)[0] - self.grid.grad(self.u)[1]

    def inner(self, other: "VectorField2D") -> float:
        self._check(other)
        return self.grid.integrate(self.u * other.u + self.v * other.v)

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self), 0.0)))

    def max_norm(self) -> float:
        return float(max(np.max(np.abs(self.u)), np.max(np.abs(self.v))))

    def _check(self, other):
        if other.grid is not self.grid and other.grid.shape != self.grid.shape:
            raise InvalidArgument("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return VectorField2D(self.grid, self.u + other.u, self.v + other.v)

    def __sub__(self, other):
        self._check(other)
        return VectorField2D(self.grid, self.u - other.u, self.v - other.v)

    def __mul__(self, c):
        return VectorField2D(self.grid, c * self.u, c * self.v)

    __rmul__ = __mul__


@dataclass(frozen=True)
class LerayParts:
    div_free: VectorField2D
    gradient_part: VectorField2D
    potential: np.ndarray


@dataclass(frozen=True)
class HodgeParts:
    w: VectorField2D
    phi: PotentialField

    @property
    def gradient_part(self) -> VectorField2D:
        return VectorField2D(self.phi.grid, *self.phi.gradient())


def _torus_poisson(grid: TorusGrid, rhs):
    """Zero-mean solution of the discrete Laplacian D.D p = rhs."""
    K2 = grid.KX**2 + grid.KY**2
    fr = np.fft.fft2(rhs)
    with np.errstate(divide="ignore", invalid="ignore"):
        fp = np.where(K2 > 0, -fr / np.where(K2 > 0, K2, 1.0), 0.0)
    return np.real(np.fft.ifft2(fp))


def _strip_top_flux(grid: SigmaGrid, vf: VectorField2D):
    """Unnormalized normal flux v - zeta_x u on the surface."""
    return vf.v[-1] - grid.hx * vf.u[-1]


def leray_project(vf: VectorField2D, tol: float = DEFAULT_TOL,
                  solver: HarmonicSolver | None = None) -> LerayParts:
    """Split ``vf`` into a divergence-free part with zero normal flux and a gradient.

    On the torus this is exact in Fourier space.  On the strip the
    potential solves the Neumann problem with the divergence as source and
    the boundary normal flux of ``vf`` as data.
    """
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    grid = vf.grid
    if isinstance(grid, TorusGrid):
        p = _torus_poisson(grid, vf.divergence())
    else:
        solver = solver or HarmonicSolver()
        p, _ = solver.solve_neumann(grid, interior=vf.divergence(),
                                    bottom_ds=vf.v[0] * grid.h,
                                    top_flux=_strip_top_flux(grid, vf))
    gp = VectorField2D.gradient_of(grid, p)
    return LerayParts(vf - gp, gp, p)


def weyl_hodge(vf: VectorField2D, tol: float = 1e-8,
               solver: HarmonicSolver | None = None) -> HodgeParts:
    """``v = w + grad(phi)`` with phi harmonic and w tangent to both boundaries.

    The input must be divergence free; the largest discrete divergence
    relative to the largest component must stay below ``tol``.
    """
    grid = vf.grid
    if not isinstance(grid, SigmaGrid):
        raise InvalidArgument("weyl_hodge needs a strip field")
    scale = max(vf.max_norm(), 1.0)
    div = float(np.max(np.abs(vf.divergence())))
    if div > tol * scale:
        raise InvalidArgument(f"field is not divergence free: max |div v| = {div:.3e}")
    solver = solver or HarmonicSolver()
    U, _ = solver.solve_neumann(grid, bottom_ds=vf.v[0] * grid.h,
                                top_flux=_strip_top_flux(grid, vf))
    phi = PotentialField(grid, U, residual=float(np.max(np.abs(grid.laplacian(U)[1:-1]))))
    w = vf - VectorField2D(grid, *phi.gradient())
    return HodgeParts(w, phi)


def normalized_inner(a: VectorField2D, b: VectorField2D, reference: VectorField2D) -> float:
    """|<a, b>| / ||reference||^2; zero when the reference vanishes."""
    ref = reference.inner(reference)
    if ref == 0.0:
        return 0.0
    return abs(a.inner(b)) / ref


def arnold_bracket(grad_f: VectorField2D, grad_g: VectorField2D, v: VectorField2D,
                   project: bool = True) -> float:
    """Vorticity bracket  iint grad_f . (omega z x grad_g)  on the torus.

    ``z x (a, b) = (-b, a)``, so the integrand is omega (f2 g1 - f1 g2).
    The gradients are Leray-projected first unless ``project`` is False.
    """
    for f in (grad_f, grad_g, v):
        if not isinstance(f.grid, TorusGrid):
            raise InvalidArgument("arnold_bracket is evaluated on the torus only")
    grad_f._check(grad_g)
    grad_f._check(v)
    if project:
        grad_f = leray_project(grad_f).div_free
        grad_g = leray_project(grad_g).div_free
    omega = v.curl()
    return v.grid.integrate(omega * (grad_f.v * grad_g.u - grad_f.u * grad_g.v))


def enstrophy_gradient(v: VectorField2D) -> VectorField2D:
    """Gradient of the Casimir 1/2 iint omega^2, i.e. (omega_y, -omega_x)."""
    wx, wy = v.grid.grad(v.curl())
    return VectorField2D(v.grid, wy, -wx)


def strip_grid(zeta: SurfaceProfile, m: int = DEFAULT_M) -> SigmaGrid:
    return SigmaGrid(zeta, m)
