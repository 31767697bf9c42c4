"""Mass, energy and the weighted E^sigma norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    TWO_PI,
    GridSpec,
    SpectralField,
    admissible_mask,
    ifft2,
    to_physical,
    wavenumbers,
)
from .symbols import weight_p_array

AREA = TWO_PI**2
# E^infinity is represented as "every e_sigma_norm finite up to this sigma"
SIGMA_CAP = 16.0


@dataclass(frozen=True)
class NormReport:
    mass: float
    energy: float
    e_norm: float
    l2: float
    linf: float


def _parseval(f: SpectralField, weight_sq) -> float:
    return float(AREA * np.sum(weight_sq * np.abs(f.coeffs) ** 2))


def _inv_m2(grid: GridSpec) -> np.ndarray:
    mm, nn = wavenumbers(grid)
    safe = np.where(mm == 0, 1.0, mm)
    return np.where(admissible_mask(grid), nn**2 / safe**2, 0.0)


def padded_size(n: int) -> int:
    p = (3 * n + 1) // 2
    return p + (p % 2)


def pad_coeffs(c: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Embed FFT-layout coefficients into a larger FFT-layout array."""
    nx, ny = c.shape
    px, py = shape
    out = np.zeros(shape, dtype=np.complex128)
    mi = np.fft.fftfreq(nx, 1.0 / nx).astype(int)
    ni = np.fft.fftfreq(ny, 1.0 / ny).astype(int)
    out[np.ix_(mi % px, ni % py)] = c
    return out


def truncate_coeffs(c: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    px, py = c.shape
    nx, ny = shape
    mi = np.fft.fftfreq(nx, 1.0 / nx).astype(int)
    ni = np.fft.fftfreq(ny, 1.0 / ny).astype(int)
    return c[np.ix_(mi % px, ni % py)]


def cubic_integral(f: SpectralField) -> float:
    """Integral of u^3, exact for the band-limited field (3/2 padding)."""
    shape = (padded_size(f.grid.nx), padded_size(f.grid.ny))
    u = ifft2(pad_coeffs(f.coeffs, shape)).real
    return float(AREA * np.mean(u**3))


def mass(f: SpectralField) -> float:
    return _parseval(f, 1.0)


def energy_quadratic(f: SpectralField) -> float:
    mm, _ = wavenumbers(f.grid)
    return _parseval(f, mm**4 + _inv_m2(f.grid))


def energy(f: SpectralField) -> float:
    """int (dx^2 u)^2 + (dx^-1 dy u)^2 - u^3/3."""
    return energy_quadratic(f) - cubic_integral(f) / 3.0


def e_sigma_norm(f: SpectralField, sigma: float = 2.0) -> float:
    if sigma < 2:
        raise ValueError(f"sigma must be >= 2, got {sigma}")
    mm, nn = wavenumbers(f.grid)
    w = (1.0 + mm**2) ** (sigma / 2.0) * weight_p_array(mm, nn)
    return float(np.sqrt(_parseval(f, w**2)))


def e_norm_defining(f: SpectralField) -> float:
    """(|u|^2 + |dx^2 u|^2 + |dx^-1 dy u|^2)^(1/2) in L^2."""
    mm, _ = wavenumbers(f.grid)
    return float(np.sqrt(_parseval(f, 1.0 + mm**4 + _inv_m2(f.grid))))


def in_E_infinity(f: SpectralField, cap: float = SIGMA_CAP) -> bool:
    return all(np.isfinite(e_sigma_norm(f, s)) for s in np.arange(2.0, cap + 1.0))


def norm_report(f: SpectralField) -> NormReport:
    values = to_physical(f).values
    return NormReport(
        mass=mass(f),
        energy=energy(f),
        e_norm=e_sigma_norm(f, 2.0),
        l2=float(np.sqrt(mass(f))),
        linf=float(np.max(np.abs(values), initial=0.0)),
    )
