"""Periodic 2-D grids, field containers and Fourier multipliers.

Transform convention (fixed across the package): forward transforms are
unnormalized, inverse transforms carry the 1/(Nx*Ny) factor, i.e. the
``scipy.fft`` defaults. Arrays are stored row-major with y outer and x inner,
so a field on a grid has shape ``(Ny, Nx)`` and the Fourier coefficients are
indexed ``[ky_index, kx_index]``.

Odd-order symbols (d/dx, d/dx**3, the anti-derivative, ...) are zeroed on the
unpaired Nyquist mode, which has no well-defined sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "REG_DELTA",
    "SpectralGrid",
    "RealField",
    "SpectralField",
    "make_grid",
    "apply_derivative",
    "antideriv_x",
    "project_constraint",
    "spectral_translate",
    "reflect_x",
]

#: Imaginary shift added to kx in the singular symbol 1/kx (double epsilon).
REG_DELTA = float(np.finfo(float).eps)


def _fft_wavenumbers(n: int, length: float) -> np.ndarray:
    # FFT ordering 0, 1, ..., n/2-1, -n/2, ..., -1, scaled by 1/L
    return np.fft.fftfreq(n, d=1.0 / n) / length


@dataclass(frozen=True)
class SpectralGrid:
    """Periodic grid on [-pi*Lx, pi*Lx) x [-pi*Ly, pi*Ly).

    ``Lx``/``Ly`` are half-period scales: the period in x is ``2*pi*Lx`` and
    the wavenumbers are integers divided by ``Lx``.
    """

    Nx: int
    Ny: int
    Lx: float
    Ly: float

    def __post_init__(self):
        for name in ("Nx", "Ny"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {n!r}")
            object.__setattr__(self, name, int(n))
        for name in ("Lx", "Ly"):
            length = getattr(self, name)
            if not np.isfinite(length) or length <= 0:
                raise ValueError(f"{name} must be positive, got {length!r}")
            object.__setattr__(self, name, float(length))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.Ny, self.Nx)

    @property
    def size(self) -> int:
        return self.Nx * self.Ny

    @property
    def hx(self) -> float:
        return 2 * np.pi * self.Lx / self.Nx

    @property
    def hy(self) -> float:
        return 2 * np.pi * self.Ly / self.Ny

    @property
    def area(self) -> float:
        return 4 * np.pi**2 * self.Lx * self.Ly

    @cached_property
    def x(self) -> np.ndarray:
        return -np.pi * self.Lx + self.hx * np.arange(self.Nx)

    @cached_property
    def y(self) -> np.ndarray:
        return -np.pi * self.Ly + self.hy * np.arange(self.Ny)

    @cached_property
    def kx(self) -> np.ndarray:
        return _fft_wavenumbers(self.Nx, self.Lx)

    @cached_property
    def ky(self) -> np.ndarray:
        return _fft_wavenumbers(self.Ny, self.Ly)

    @cached_property
    def kx_half(self) -> np.ndarray:
        """x-wavenumbers of the real-FFT layout, 0 .. Nx/2 (Nyquist last)."""
        return np.arange(self.Nx // 2 + 1) / self.Lx

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates ``(X, Y)`` with shape ``(Ny, Nx)``."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def wavenumbers(self, half: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable ``(KX, KY)``: shapes ``(1, nkx)`` and ``(Ny, 1)``."""
        kx = self.kx_half if half else self.kx
        return kx[None, :], self.ky[:, None]

    def nyquist_x(self, half: bool = False) -> int:
        """Column index of the x-Nyquist mode in the given layout."""
        return self.Nx // 2

    def nyquist_y(self) -> int:
        return self.Ny // 2

    def odd_kx(self, half: bool = False) -> np.ndarray:
        """kx row with the Nyquist entry zeroed (for odd-order symbols)."""
        kx = (self.kx_half if half else self.kx).copy()
        kx[self.Nx // 2] = 0.0
        return kx

    def odd_ky(self) -> np.ndarray:
        ky = self.ky.copy()
        ky[self.Ny // 2] = 0.0
        return ky


def make_grid(Nx: int, Ny: int, Lx: float, Ly: float) -> SpectralGrid:
    return SpectralGrid(Nx, Ny, Lx, Ly)


@dataclass(frozen=True, eq=False)
class RealField:
    """Physical-space samples of a field on ``grid``, shape ``(Ny, Nx)``."""

    grid: SpectralGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != self.grid.shape:
            raise ValueError(
                f"values have shape {values.shape}, grid expects {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def to_spectral(self) -> SpectralField:
        return SpectralField(self.grid, sfft.fft2(self.values))

    def __add__(self, other: RealField) -> RealField:
        _check_same_grid(self.grid, other.grid)
        return RealField(self.grid, self.values + other.values)

    def __sub__(self, other: RealField) -> RealField:
        _check_same_grid(self.grid, other.grid)
        return RealField(self.grid, self.values - other.values)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients in full FFT layout, shape ``(Ny, Nx)``."""

    grid: SpectralGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coeffs have shape {coeffs.shape}, grid expects {self.grid.shape}"
            )
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def to_physical(self) -> np.ndarray:
        """Complex physical-space samples."""
        return sfft.ifft2(self.coeffs)

    def to_real(self) -> RealField:
        """Inverse transform, discarding the (rounding-level) imaginary part."""
        return RealField(self.grid, sfft.ifft2(self.coeffs).real)

    def hermitian_defect(self) -> float:
        """max |c(-k) - conj(c(k))|, zero for coefficients of a real field."""
        c = self.coeffs
        flipped = np.roll(c[::-1, ::-1], 1, axis=(0, 1))
        return float(np.max(np.abs(flipped - np.conj(c))))


def _check_same_grid(a: SpectralGrid, b: SpectralGrid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def _as_spectral(f) -> SpectralField:
    if isinstance(f, RealField):
        return f.to_spectral()
    return f


def apply_derivative(f: SpectralField, axis: str, order: int) -> SpectralField:
    """Multiply by ``(i k_axis)**order``; Nyquist zeroed for odd orders."""
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if int(order) != order or order < 1:
        raise ValueError(f"order must be a positive integer, got {order!r}")
    f = _as_spectral(f)
    grid = f.grid
    if axis == "x":
        k = grid.odd_kx() if order % 2 else grid.kx
        symbol = ((1j * k) ** order)[None, :]
    else:
        k = grid.odd_ky() if order % 2 else grid.ky
        symbol = ((1j * k) ** order)[:, None]
    return SpectralField(grid, f.coeffs * symbol)


def antideriv_symbol(kx: np.ndarray, lam: float = 1.0) -> np.ndarray:
    """Regularized symbol -i/(kx + i*lam*delta), exactly 0 where kx == 0."""
    out = np.zeros(kx.shape, dtype=complex)
    nz = kx != 0
    out[nz] = -1j / (kx[nz] + 1j * lam * REG_DELTA)
    return out


def antideriv_x(f: SpectralField, lam: float = 1.0) -> SpectralField:
    """Anti-derivative in x on zero-x-mean data.

    The kx = 0 column (and the Nyquist column, odd symbol) is set to zero,
    so the result is the anti-derivative of ``f`` minus its x-mean.
    """
    f = _as_spectral(f)
    symbol = antideriv_symbol(f.grid.odd_kx(), lam)
    return SpectralField(f.grid, f.coeffs * symbol[None, :])


def project_constraint(f: RealField) -> RealField:
    """Remove the x-mean of every row (zero the kx = 0 Fourier column)."""
    coeffs = sfft.fft(f.values, axis=1)
    coeffs[:, 0] = 0.0
    values = sfft.ifft(coeffs, axis=1)
    if not f.is_complex:
        values = values.real
    return RealField(f.grid, values)


def spectral_translate(f: SpectralField, shift_x: float) -> SpectralField:
    """Periodic translation: the result samples f(x + shift_x, y)."""
    f = _as_spectral(f)
    phase = np.exp(1j * f.grid.kx * shift_x)
    return SpectralField(f.grid, f.coeffs * phase[None, :])


def reflect_x(values: np.ndarray) -> np.ndarray:
    """Samples of f(-x, y): grid index j maps to (Nx - j) mod Nx."""
    return np.roll(values[..., ::-1], 1, axis=-1)
