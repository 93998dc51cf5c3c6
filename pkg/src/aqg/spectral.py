"""
Fourier-space operator toolkit on a doubly periodic box.

Fields are stored as complex Fourier-series amplitudes in numpy FFT order,
normalised so that a constant field ``c`` has ``coeff(0, 0) == c``.  Axis 0
of every array runs along x1 and axis 1 along x2.

Norm convention: ``||f||^2 = area * sum_k w(k) |c_k|^2`` so that analytic
values on the box are reproduced exactly (``||cos x1||^2 = 2 pi^2`` on the
2 pi x 2 pi box).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "SpectralField",
    "VelocityField",
    "DissipationParams",
    "SobolevIndex",
    "InvalidFieldError",
    "forward_transform",
    "inverse_transform",
    "fractional_partial",
    "fractional_laplacian",
    "riesz_velocity",
    "friedrichs_project",
    "sobolev_norm",
    "dissipation_symbol",
    "anisotropic_symbol",
    "random_bandlimited",
    "two_thirds_mask",
    "resample",
]

TWO_PI = 2.0 * np.pi
HERMITIAN_RTOL = 1e-12


class InvalidFieldError(ValueError):
    """Coefficients do not describe a real-valued field."""


@dataclass(frozen=True)
class GridSpec:
    """Rectangular periodic grid with ``n1 x n2`` points and periods ``l1, l2``."""

    n1: int
    n2: int
    l1: float = TWO_PI
    l2: float = TWO_PI

    def __post_init__(self):
        for name in ("n1", "n2"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 8, got {n!r}")
        for name in ("l1", "l2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def shape(self):
        return (self.n1, self.n2)

    @property
    def area(self):
        return self.l1 * self.l2

    @property
    def size(self):
        return self.n1 * self.n2

    @cached_property
    def k1(self):
        """Signed integer wavenumbers along x1 in FFT order; Nyquist is +n1/2."""
        return _signed_modes(self.n1)

    @cached_property
    def k2(self):
        return _signed_modes(self.n2)

    @cached_property
    def xi1(self):
        """Physical wavenumbers along x1, shape ``(n1, 1)``."""
        return (TWO_PI / self.l1 * self.k1)[:, None]

    @cached_property
    def xi2(self):
        """Physical wavenumbers along x2, shape ``(1, n2)``."""
        return (TWO_PI / self.l2 * self.k2)[None, :]

    @cached_property
    def xi1_odd(self):
        # odd symbols (i xi) are ambiguous on the Nyquist line; zero it there
        out = self.xi1.copy()
        out[self.n1 // 2, 0] = 0.0
        return out

    @cached_property
    def xi2_odd(self):
        out = self.xi2.copy()
        out[0, self.n2 // 2] = 0.0
        return out

    @cached_property
    def xi_abs(self):
        """|xi| on the full spectral grid."""
        return np.sqrt(self.xi1 ** 2 + self.xi2 ** 2)

    @cached_property
    def nyquist_mask(self):
        """True on modes off the Nyquist row and column."""
        m = np.ones(self.shape, dtype=bool)
        m[self.n1 // 2, :] = False
        m[:, self.n2 // 2] = False
        return m

    def coordinates(self):
        """Physical grid ``(x1, x2)`` as broadcastable arrays."""
        x1 = self.l1 * np.arange(self.n1) / self.n1
        x2 = self.l2 * np.arange(self.n2) / self.n2
        return x1[:, None], x2[None, :]

    def refine(self, factor=2):
        return GridSpec(self.n1 * factor, self.n2 * factor, self.l1, self.l2)


def _signed_modes(n):
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = n // 2
    return k


def _conj_reflect(c):
    """Return ``conj(c[-k1, -k2])`` (indices modulo the grid)."""
    return np.conj(np.roll(c[::-1, ::-1], 1, axis=(0, 1)))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real scalar field on ``grid``."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def coeff(self, k1, k2):
        """Coefficient at signed integer wavenumber ``(k1, k2)``."""
        return self.coeffs[int(k1) % self.grid.n1, int(k2) % self.grid.n2]

    def physical(self):
        return inverse_transform(self)

    @property
    def mean(self):
        return self.coeffs[0, 0].real

    def hermitian_defect(self):
        """Largest ``|c(k) - conj(c(-k))|`` relative to ``max |c|``."""
        scale = np.max(np.abs(self.coeffs))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(self.coeffs - _conj_reflect(self.coeffs))) / scale)

    def symmetrized(self):
        """Project onto real fields by averaging with the conjugate reflection."""
        return SpectralField(self.grid, 0.5 * (self.coeffs + _conj_reflect(self.coeffs)))

    def without_mean(self):
        c = self.coeffs.copy()
        c[0, 0] = 0.0
        return SpectralField(self.grid, c)

    def with_coeffs(self, coeffs):
        return SpectralField(self.grid, coeffs)

    def _check(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def inner(self, other):
        """L2 inner product ``(self, other)`` with the area factor."""
        self._check(other)
        return float(self.grid.area * np.real(np.vdot(other.coeffs, self.coeffs)))


@dataclass(frozen=True, eq=False)
class VelocityField:
    u1: SpectralField
    u2: SpectralField

    def divergence(self):
        g = self.u1.grid
        return SpectralField(g, 1j * g.xi1_odd * self.u1.coeffs + 1j * g.xi2_odd * self.u2.coeffs)

    def physical(self):
        return inverse_transform(self.u1), inverse_transform(self.u2)


@dataclass(frozen=True)
class DissipationParams:
    """Exponents and viscosities of the dissipation mu|d1|^{2 alpha} + nu|d2|^{2 beta}."""

    alpha: float
    beta: float
    mu: float = 1.0
    nu: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        for name in ("mu", "nu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SobolevIndex:
    s: float
    homogeneous: bool = False

    def __post_init__(self):
        if not np.isfinite(self.s):
            raise ValueError("Sobolev index must be finite")

    def norm(self, f):
        return sobolev_norm(f, self.s, self.homogeneous)


def forward_transform(physical, grid):
    """Real grid values -> Fourier-series amplitudes (exactly Hermitian)."""
    a = np.asarray(physical, dtype=float)
    if a.shape != grid.shape:
        raise ValueError(f"array shape {a.shape} does not match grid {grid.shape}")
    full = _hermitian_extend(sfft.rfft2(a, norm="forward"), grid.n2)
    # columns k2 = 0 and n2/2 are only Hermitian to roundoff; make them exact
    return SpectralField(grid, 0.5 * (full + _conj_reflect(full)))


def _hermitian_extend(half, n2):
    n1 = half.shape[0]
    full = np.empty((n1, n2), dtype=complex)
    h = n2 // 2 + 1
    full[:, :h] = half
    # columns n2/2+1 .. n2-1 hold -k2 for k2 = n2/2-1 .. 1
    rows = (-np.arange(n1)) % n1
    full[:, h:] = np.conj(half[rows, 1:n2 // 2][:, ::-1])
    return full


def inverse_transform(f):
    """Fourier-series amplitudes -> real grid values.

    Raises InvalidFieldError when the coefficients break Hermitian symmetry
    by more than 1e-12 relative.
    """
    defect = f.hermitian_defect()
    if defect > HERMITIAN_RTOL:
        raise InvalidFieldError(f"coefficients are not Hermitian (defect {defect:.3e})")
    return sfft.irfft2(f.coeffs[:, : f.grid.n2 // 2 + 1], s=f.grid.shape, norm="forward")


def fractional_partial(f, axis, sigma):
    """Apply ``|d_axis|^sigma`` (multiplier ``|xi_axis|^sigma``, ``|0|^0 = 1``)."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if axis == 1:
        xi = f.grid.xi1
    elif axis == 2:
        xi = f.grid.xi2
    else:
        raise ValueError("axis must be 1 or 2")
    return SpectralField(f.grid, np.abs(xi) ** sigma * f.coeffs)


def fractional_laplacian(f, sigma):
    """Apply ``|nabla|^sigma``; the zero mode is annihilated for sigma > 0."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return SpectralField(f.grid, f.grid.xi_abs ** sigma * f.coeffs)


def _riesz_multipliers(grid):
    k = grid.xi_abs.copy()
    k[0, 0] = 1.0
    m1 = -1j * grid.xi2_odd / k
    m2 = 1j * grid.xi1_odd / k
    m1[0, 0] = 0.0
    m2[0, 0] = 0.0
    return m1, m2


def riesz_velocity(theta):
    """Velocity ``u = R^perp theta = (-R2 theta, R1 theta)``; zero at xi = 0."""
    m1, m2 = _riesz_multipliers(theta.grid)
    return VelocityField(
        SpectralField(theta.grid, m1 * theta.coeffs),
        SpectralField(theta.grid, m2 * theta.coeffs),
    )


def friedrichs_project(f, radius):
    """Sharp cutoff keeping modes with ``|xi| < radius``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    return SpectralField(f.grid, np.where(f.grid.xi_abs < radius, f.coeffs, 0.0))


def sobolev_weight(grid, s, homogeneous=False):
    if homogeneous:
        k2 = grid.xi_abs ** 2
        k2[0, 0] = 1.0
        w = k2 ** s
        w[0, 0] = 0.0
        return w
    return (1.0 + grid.xi_abs ** 2) ** s


def sobolev_norm(f, s=0.0, homogeneous=False):
    """``||f||_{H^s}`` or, if ``homogeneous``, ``||f||_{Hdot^s}`` (mean excluded)."""
    w = sobolev_weight(f.grid, s, homogeneous)
    return float(np.sqrt(f.grid.area * np.sum(w * np.abs(f.coeffs) ** 2)))


def anisotropic_symbol(xi1, xi2, alpha, beta):
    """``A(xi) = |xi1|^{2 alpha} + |xi2|^{2 beta}``."""
    return np.abs(xi1) ** (2 * alpha) + np.abs(xi2) ** (2 * beta)


def dissipation_symbol(xi1, xi2, p):
    """``mu |xi1|^{2 alpha} + nu |xi2|^{2 beta}``; broadcasts over arrays."""
    return p.mu * np.abs(xi1) ** (2 * p.alpha) + p.nu * np.abs(xi2) ** (2 * p.beta)


def two_thirds_mask(grid):
    """Modes kept by the two-thirds rule: ``|k_i| < n_i / 3`` on both axes."""
    keep1 = 3 * np.abs(grid.k1) < grid.n1
    keep2 = 3 * np.abs(grid.k2) < grid.n2
    return keep1[:, None] & keep2[None, :]


def random_bandlimited(grid, seed, kmin=1, kmax=None, amplitude=1.0, slope=0.0):
    """Random real mean-zero field with energy on integer shells ``kmin <= |k| <= kmax``.

    ``amplitude`` is the RMS grid value; ``slope`` tilts the coefficient
    magnitudes as ``|k|^-slope``.  The default ``kmax`` keeps the field inside
    the two-thirds band.
    """
    rng = np.random.default_rng(seed)
    if kmax is None:
        kmax = (min(grid.n1, grid.n2) - 1) // 3
    kk = np.sqrt(grid.k1[:, None] ** 2 + grid.k2[None, :] ** 2)
    shell = (kk >= kmin) & (kk <= kmax) & grid.nyquist_mask
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    kk[0, 0] = 1.0
    c = np.where(shell, c * kk ** (-float(slope)), 0.0)
    c = 0.5 * (c + _conj_reflect(c))
    c[0, 0] = 0.0
    rms = np.sqrt(np.sum(np.abs(c) ** 2))
    if rms > 0:
        c *= amplitude / rms
    return SpectralField(grid, c)


def resample(f, grid):
    """Carry ``f`` to another grid of the same box by copying shared modes.

    Modes absent on the target grid are dropped; new modes are zero.  The
    Nyquist lines of both grids are left empty.
    """
    src = f.grid
    if (src.l1, src.l2) != (grid.l1, grid.l2):
        raise ValueError("resampling requires identical periods")
    out = np.zeros(grid.shape, dtype=complex)
    m1 = min(src.n1, grid.n1) // 2
    m2 = min(src.n2, grid.n2) // 2
    r1 = np.r_[0:m1, -m1 + 1:0]
    r2 = np.r_[0:m2, -m2 + 1:0]
    out[np.ix_(r1 % grid.n1, r2 % grid.n2)] = f.coeffs[np.ix_(r1 % src.n1, r2 % src.n2)]
    return SpectralField(grid, out)
