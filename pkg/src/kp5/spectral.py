"""Truncated Fourier representation of real zero-x-mean fields on [0, 2pi)^2.

Coefficients follow the analytic Fourier series convention

    u(x, y) = sum_{m,n} c(m, n) exp(i(m x + n y)),
    c(m, n) = (1 / (nx ny)) sum_{j,k} u(x_j, y_k) exp(-i(m x_j + n y_k)),

and are stored in FFT order, shape ``(nx, ny)``. The Nyquist row and column
are kept at zero so that the reality symmetry c(-m, -n) = conj(c(m, n)) is
well defined on every stored mode.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import IntegrityError
from .symbols import bump_eta, check_dyadic, dyadic_scales

TWO_PI = 2.0 * np.pi
MULTIPLIER_KINDS = ("dx", "dx2", "dx5", "dx_inv", "dx_inv_dy", "dx_inv_dy2")


def fft_workers() -> int:
    try:
        return max(1, int(os.environ.get("KP5_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int

    def __post_init__(self):
        for name in ("nx", "ny"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 4 or v % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {v!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def m_range(self) -> tuple[int, int]:
        return (-self.nx // 2 + 1, self.nx // 2)

    @property
    def n_range(self) -> tuple[int, int]:
        return (-self.ny // 2 + 1, self.ny // 2)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        x = TWO_PI * np.arange(self.nx) / self.nx
        y = TWO_PI * np.arange(self.ny) / self.ny
        return np.meshgrid(x, y, indexing="ij")


@lru_cache(maxsize=64)
def _wavenumbers(nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.fft.fftfreq(nx, 1.0 / nx)
    n = np.fft.fftfreq(ny, 1.0 / ny)
    m[nx // 2] = nx // 2
    n[ny // 2] = ny // 2
    mm, nn = np.meshgrid(m, n, indexing="ij")
    mm.setflags(write=False)
    nn.setflags(write=False)
    return mm, nn


def wavenumbers(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Read-only integer-valued (float) arrays m, n in FFT layout."""
    return _wavenumbers(grid.nx, grid.ny)


@lru_cache(maxsize=64)
def _admissible(nx: int, ny: int) -> np.ndarray:
    mm, nn = _wavenumbers(nx, ny)
    mask = (mm != 0) & (np.abs(mm) < nx // 2) & (np.abs(nn) < ny // 2)
    mask.setflags(write=False)
    return mask


def admissible_mask(grid: GridSpec) -> np.ndarray:
    """True on modes that may carry energy: m != 0 and not Nyquist."""
    return _admissible(grid.nx, grid.ny)


def index_of(grid: GridSpec, m: int, n: int) -> tuple[int, int]:
    lo_m, hi_m = grid.m_range
    lo_n, hi_n = grid.n_range
    if not (lo_m <= m <= hi_m and lo_n <= n <= hi_n):
        raise IndexError(f"mode ({m}, {n}) not resolved on {grid.nx}x{grid.ny} grid")
    return m % grid.nx, n % grid.ny


@dataclass(frozen=True)
class PhysicalField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise IntegrityError("physical field has non-finite values")

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "PhysicalField":
        X, Y = grid.points()
        return cls(grid, np.asarray(func(X, Y), dtype=np.float64))


@dataclass(frozen=True)
class SpectralField:
    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(f"coeffs shape {self.coeffs.shape} != grid {self.grid.shape}")

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_modes(cls, grid: GridSpec, modes) -> "SpectralField":
        """Build from ``(m, n, value)`` triples, symmetrizing for reality.

        Each listed mode contributes value at (m, n) and its conjugate at
        (-m, -n); listing both members of a pair therefore adds twice. Modes
        with m = 0 are dropped by the zero-x-mean projection.
        """
        c = np.zeros(grid.shape, dtype=np.complex128)
        for m, n, value in modes:
            i, j = index_of(grid, m, n)
            ci, cj = index_of(grid, -m, -n)
            c[i, j] += value
            c[ci, cj] += np.conj(value)
        return cls(grid, project(grid, c))

    def coeff(self, m: int, n: int) -> complex:
        return complex(self.coeffs[index_of(self.grid, m, n)])

    def check_invariants(self, tol: float = 1e-10) -> None:
        scale = max(1.0, float(np.max(np.abs(self.coeffs), initial=0.0)))
        if np.any(self.coeffs[0, :] != 0):
            raise IntegrityError("zero-x-mean violated: c(0, n) != 0")
        if reality_defect(self.coeffs) > tol * scale:
            raise IntegrityError("reality symmetry violated")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def l2_norm(self) -> float:
        return float(TWO_PI * np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))


def _same_grid(a: SpectralField, b: SpectralField) -> None:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def reflect(c: np.ndarray) -> np.ndarray:
    """Array r with r(m, n) = c(-m, -n) in FFT layout."""
    return np.roll(c[::-1, ::-1], 1, axis=(0, 1))


def reality_defect(c: np.ndarray) -> float:
    return float(np.max(np.abs(c - np.conj(reflect(c))), initial=0.0))


def project(grid: GridSpec, c: np.ndarray) -> np.ndarray:
    """Zero the m = 0 row and both Nyquist lines."""
    return np.where(admissible_mask(grid), c, 0.0)


def fft2(values: np.ndarray) -> np.ndarray:
    nx, ny = values.shape
    return sfft.fft2(values, workers=fft_workers()) / (nx * ny)


def ifft2(coeffs: np.ndarray) -> np.ndarray:
    nx, ny = coeffs.shape
    return sfft.ifft2(coeffs, workers=fft_workers()) * (nx * ny)


def to_spectral(u: PhysicalField) -> SpectralField:
    return SpectralField(u.grid, project(u.grid, fft2(u.values)))


def to_physical(f: SpectralField) -> PhysicalField:
    c = f.coeffs
    scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
    if reality_defect(c) > 1e-10 * scale:
        raise IntegrityError("reality symmetry violated beyond 1e-10")
    z = ifft2(c)
    return PhysicalField(f.grid, np.ascontiguousarray(z.real))


def multiplier_symbol(grid: GridSpec, kind: str) -> np.ndarray:
    mm, nn = wavenumbers(grid)
    safe = np.where(mm == 0, 1.0, mm)
    if kind == "dx":
        sym = 1j * mm
    elif kind == "dx2":
        sym = -(mm**2) + 0j
    elif kind == "dx5":
        sym = (1j * mm) ** 5
    elif kind == "dx_inv":
        sym = 1.0 / (1j * safe)
    elif kind == "dx_inv_dy":
        sym = nn / safe + 0j
    elif kind == "dx_inv_dy2":
        sym = 1j * nn**2 / safe
    else:
        raise ValueError(f"unknown multiplier kind {kind!r}; expected one of {MULTIPLIER_KINDS}")
    return np.where(admissible_mask(grid), sym, 0.0)


def apply_multiplier(f: SpectralField, kind: str) -> SpectralField:
    return SpectralField(f.grid, f.coeffs * multiplier_symbol(f.grid, kind))


def omega_array(grid: GridSpec) -> np.ndarray:
    """omega(m, n) in floating point on admissible modes, 0 elsewhere."""
    mm, nn = wavenumbers(grid)
    safe = np.where(mm == 0, 1.0, mm)
    return np.where(admissible_mask(grid), mm**5 + nn**2 / safe, 0.0)


def semigroup(f: SpectralField, t: float) -> SpectralField:
    """U(t): multiply c(m, n) by exp(-i t omega(m, n))."""
    phase = np.exp(-1j * float(t) * omega_array(f.grid))
    return SpectralField(f.grid, project(f.grid, f.coeffs * phase))


def lp_project(f: SpectralField, M: int, mode: str = "sharp") -> SpectralField:
    """Littlewood-Paley projection onto |m| ~ M.

    ``sharp`` uses the indicator of I_M (neighbouring sets overlap);
    ``smooth`` uses eta_M(m), and the smooth pieces sum to the identity.
    """
    M = check_dyadic(M, "M")
    mm, _ = wavenumbers(f.grid)
    if mode == "sharp":
        am = np.abs(mm)
        w = ((5 * M <= 8 * am) & (5 * am <= 8 * M)).astype(np.float64)
    elif mode == "smooth":
        w = bump_eta(M, mm)
    else:
        raise ValueError(f"mode must be 'sharp' or 'smooth', got {mode!r}")
    return SpectralField(f.grid, f.coeffs * w)


def lp_scales(grid: GridSpec) -> list[int]:
    """Dyadic scales whose smooth projections cover every resolved m."""
    out = dyadic_scales(grid.nx)
    return out


def random_field(grid: GridSpec, rng: np.random.Generator, kmax: int | None = None,
                 decay: float = 0.0, amplitude: float = 1.0) -> SpectralField:
    """Random band-limited field satisfying both invariants.

    Modes with |m|, |n| <= kmax get complex Gaussian coefficients scaled by
    (1 + m^2 + n^2)^(-decay/2); the result is then symmetrized.
    """
    mm, nn = wavenumbers(grid)
    c = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    c *= (1.0 + mm**2 + nn**2) ** (-decay / 2.0)
    if kmax is not None:
        c = np.where((np.abs(mm) <= kmax) & (np.abs(nn) <= kmax), c, 0.0)
    c = 0.5 * (c + np.conj(reflect(c)))
    c = project(grid, c)
    return SpectralField(grid, amplitude * c)
