"""Periodic free-surface profiles and spectral calculus along the surface.

All x-derivatives are taken in Fourier space on a uniform grid of even size.
Variations of the surface are *vertical* (``delta zeta``); the conversion from
normal variations is :func:`normal_to_vertical`.  Gradients that are only
defined modulo a constant (e.g. the area gradient under a mass constraint)
are returned in the vertical gauge without removing the mean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidProfile

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ProblemParams:
    """Physical parameters of the nondimensional problem.

    ``lam`` is the inverse Froude number squared, ``sigma`` the surface
    tension coefficient and ``mass`` the per-period constraint value used by
    the Rayleigh-quotient route.
    """

    lam: float = 1.0
    sigma: float = 0.0
    period: float = TWO_PI
    mass: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise InvalidArgument(f"lambda must be positive, got {self.lam}")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise InvalidArgument(f"sigma must be nonnegative, got {self.sigma}")
        if not np.isfinite(self.period) or self.period <= 0:
            raise InvalidArgument(f"period must be positive, got {self.period}")

    @property
    def k0(self) -> float:
        return TWO_PI / self.period

    def replace(self, **changes) -> "ProblemParams":
        values = dict(lam=self.lam, sigma=self.sigma, period=self.period, mass=self.mass)
        values.update(changes)
        return ProblemParams(**values)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def wavenumbers(n: int, period: float) -> np.ndarray:
    """Angular wavenumbers of ``np.fft.rfft`` output for n samples over ``period``."""
    return TWO_PI / period * np.arange(n // 2 + 1)


def grid_x(n: int, period: float = TWO_PI) -> np.ndarray:
    return np.arange(n) * (period / n)


@dataclass(frozen=True)
class _Periodic:
    values: np.ndarray
    period: float = TWO_PI

    def __post_init__(self):
        v = np.asarray(self.values)
        if np.iscomplexobj(v):
            raise InvalidProfile("samples must be real")
        v = _frozen(v)
        if v.ndim != 1:
            raise InvalidProfile("samples must be one-dimensional")
        if v.size < 4 or v.size % 2:
            raise InvalidProfile(f"sample count must be even and >= 4, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise InvalidProfile("samples must be finite")
        if not self.period > 0:
            raise InvalidArgument("period must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return grid_x(self.n, self.period)

    @property
    def dx(self) -> float:
        return self.period / self.n

    @property
    def modes(self) -> np.ndarray:
        """Complex Fourier coefficients, normalized so that mode 0 is the mean."""
        return np.fft.rfft(self.values) / self.n

    @property
    def k(self) -> np.ndarray:
        return wavenumbers(self.n, self.period)

    def integral(self) -> float:
        return float(np.sum(self.values) * self.dx)

    def mean(self) -> float:
        return float(np.mean(self.values))

    def _same_grid(self, other) -> None:
        if other.n != self.n or not np.isclose(other.period, self.period):
            raise InvalidArgument("grids do not match")


@dataclass(frozen=True)
class SurfaceTrace(_Periodic):
    """A function restricted to the free surface, sampled on the x-grid."""

    @classmethod
    def from_function(cls, func, n, period=TWO_PI):
        return cls(func(grid_x(n, period)), period)

    @classmethod
    def from_modes(cls, modes, n, period=TWO_PI):
        return cls(np.fft.irfft(np.asarray(modes) * n, n), period)

    def __add__(self, other):
        if isinstance(other, _Periodic):
            self._same_grid(other)
            return SurfaceTrace(self.values + other.values, self.period)
        return SurfaceTrace(self.values + other, self.period)

    def __sub__(self, other):
        if isinstance(other, _Periodic):
            self._same_grid(other)
            return SurfaceTrace(self.values - other.values, self.period)
        return SurfaceTrace(self.values - other, self.period)

    def __mul__(self, scalar):
        return SurfaceTrace(self.values * scalar, self.period)

    __rmul__ = __mul__

    def __neg__(self):
        return SurfaceTrace(-self.values, self.period)

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class SurfaceProfile(_Periodic):
    """Free-surface elevation zeta on a uniform periodic grid.

    The fluid occupies ``0 <= y <= 1 + zeta(x)``; profiles that touch or cross
    the bottom are rejected.
    """

    def __post_init__(self):
        super().__post_init__()
        if np.any(1.0 + self.values <= 0.0):
            raise InvalidProfile("surface must stay above the bottom: 1 + zeta > 0")

    @property
    def samples(self) -> np.ndarray:
        return self.values

    @property
    def depth(self) -> np.ndarray:
        """Local depth ``h = 1 + zeta``."""
        return 1.0 + self.values

    @classmethod
    def flat(cls, n, period=TWO_PI, level=0.0):
        return cls(np.full(n, float(level)), period)

    @classmethod
    def from_function(cls, func, n, period=TWO_PI):
        return cls(func(grid_x(n, period)), period)

    @classmethod
    def from_modes(cls, modes, n, period=TWO_PI):
        return cls(np.fft.irfft(np.asarray(modes) * n, n), period)

    @classmethod
    def from_cosines(cls, coeffs, n, period=TWO_PI):
        """Even profile ``sum_j coeffs[j] cos(j k0 x)``."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size > n // 2 + 1:
            raise InvalidArgument("too many cosine modes for the grid")
        modes = np.zeros(n // 2 + 1, dtype=complex)
        modes[: coeffs.size] = coeffs
        modes[1:] *= 0.5
        if coeffs.size == n // 2 + 1:
            modes[-1] = coeffs[-1]
        return cls.from_modes(modes, n, period)

    def shifted(self, offset: float) -> "SurfaceProfile":
        """Profile translated by ``offset`` in x (spectral interpolation)."""
        return SurfaceProfile(spectral_shift(self.values, offset, self.period), self.period)

    def trace(self, values) -> SurfaceTrace:
        return SurfaceTrace(values, self.period)


def spectral_shift(values, offset, period=TWO_PI) -> np.ndarray:
    """Return samples of f(x - offset) for band-limited periodic f."""
    values = np.asarray(values, dtype=float)
    n = values.size
    fk = np.fft.rfft(values)
    k = wavenumbers(n, period)
    phase = np.exp(-1j * k * offset)
    if n % 2 == 0:
        # the Nyquist mode is real on the grid; keep only its real projection
        phase[-1] = np.cos(k[-1] * offset)
    return np.fft.irfft(fk * phase, n)


def spectral_derivative(values, order=1, period=TWO_PI) -> np.ndarray:
    """Order-th x-derivative of periodic samples via the FFT."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    k = wavenumbers(n, period)
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[-1] = 0.0
    return np.fft.irfft(np.fft.rfft(values, axis=-1) * mult, n, axis=-1)


def fourier_derivative(f, order: int = 1):
    """Spectral derivative of a profile or trace; returns the same kind.

    >>> import numpy as np
    >>> z = SurfaceProfile.from_function(lambda x: 0.1 * np.cos(3 * x), 16)
    >>> round(float(fourier_derivative(z, 2).values[0]), 12)
    -0.9
    """
    if isinstance(order, bool) or int(order) != order or order <= 0:
        raise InvalidArgument(f"derivative order must be a positive integer, got {order}")
    d = spectral_derivative(f.values, int(order), f.period)
    # derivatives of a valid profile need not satisfy 1 + f > 0
    return SurfaceTrace(d, f.period)


def _slope(zeta: SurfaceProfile) -> np.ndarray:
    return spectral_derivative(zeta.values, 1, zeta.period)


def curvature(zeta: SurfaceProfile) -> SurfaceTrace:
    """Curvature of the graph, positive where the surface is convex toward +y.

    kappa = zeta_xx / (1 + zeta_x**2)**1.5, evaluated as the x-derivative of
    zeta_x / sqrt(1 + zeta_x**2) so that its mean vanishes to round-off.
    """
    zx = _slope(zeta)
    return SurfaceTrace(
        spectral_derivative(zx / np.sqrt(1.0 + zx**2), 1, zeta.period), zeta.period
    )


@dataclass(frozen=True)
class SurfaceIntegrals:
    arc_length: float
    mass: float
    mass2: float


def surface_integrals(zeta: SurfaceProfile) -> SurfaceIntegrals:
    """Arc length, integral of zeta and of zeta**2 over one period."""
    zx = _slope(zeta)
    dx = zeta.dx
    return SurfaceIntegrals(
        arc_length=float(np.sum(np.sqrt(1.0 + zx**2)) * dx),
        mass=float(np.sum(zeta.values) * dx),
        mass2=float(np.sum(zeta.values**2) * dx),
    )


def normal_to_vertical(delta_sigma: SurfaceTrace, zeta: SurfaceProfile) -> SurfaceTrace:
    """Convert a normal variation of the surface into the vertical one.

    For the level set z - zeta = 0 the gradient norm is sqrt(1 + zeta_x**2),
    and delta_zeta = |grad| * delta_sigma.
    """
    zeta._same_grid(delta_sigma)
    return SurfaceTrace(np.sqrt(1.0 + _slope(zeta) ** 2) * delta_sigma.values, zeta.period)


def vertical_to_normal(delta_zeta: SurfaceTrace, zeta: SurfaceProfile) -> SurfaceTrace:
    zeta._same_grid(delta_zeta)
    return SurfaceTrace(delta_zeta.values / np.sqrt(1.0 + _slope(zeta) ** 2), zeta.period)


def surface_slope(zeta: SurfaceProfile) -> SurfaceTrace:
    return SurfaceTrace(_slope(zeta), zeta.period)
