"""Linear propagator symbols, integrating factors and the exact linear KP flow.

Every model is written as ``d/dt u_hat + i*theta*u_hat = N(u_hat)``; a
:class:`SymbolTable` stores ``theta`` on one Fourier layout and hands out the
integrating factors ``exp(-i*theta*dt)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import REG_DELTA, RealField, SpectralGrid, project_constraint

__all__ = [
    "SymbolTable",
    "kp_symbol",
    "kdv_symbol",
    "ds_symbol",
    "exact_linear_evolve",
]


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """Linear symbol ``theta`` on a grid.

    ``half`` selects the real-FFT layout (``Ny x (Nx/2+1)``) used for real
    models; otherwise the table covers the full FFT layout.
    """

    grid: SpectralGrid
    theta: np.ndarray = field(repr=False)
    half: bool = False

    def factor(self, dt: float) -> np.ndarray:
        """Integrating factor ``exp(-i*theta*dt)``."""
        with np.errstate(under="ignore", over="ignore"):
            return np.exp(-1j * self.theta * dt)


def _kp_theta(grid, lam, epsilon, sigma, half, transverse):
    kx, ky = grid.wavenumbers(half)
    kx_odd = grid.odd_kx(half)[None, :]
    theta = np.zeros((grid.Ny, kx.shape[1]), dtype=complex)
    if transverse:
        # lam*ky^2/(kx + i*lam*delta); at kx = 0 this is -i*ky^2/delta, whose
        # factor underflows to exactly 0 for ky != 0 and dt > 0
        theta += lam * ky**2 / (kx_odd + 1j * lam * REG_DELTA)
        theta[:, grid.Nx // 2] = 0.0
    theta -= epsilon**2 * kx_odd**3
    theta -= 1j * sigma * kx**2
    return theta


def kp_symbol(
    grid: SpectralGrid,
    lam: int,
    epsilon: float,
    sigma: float = 0.0,
    half: bool = False,
) -> SymbolTable:
    """KP / regularized dKP symbol.

    ``theta = lam*ky**2/(kx + i*lam*delta) - epsilon**2*kx**3 - i*sigma*kx**2``.
    The odd-in-kx part is dropped on the Nyquist column, where the mode is then
    only damped by the dissipative term.
    """
    if lam not in (-1, 1):
        raise ValueError(f"lambda must be +1 or -1, got {lam!r}")
    if epsilon < 0 or sigma < 0:
        raise ValueError("epsilon and sigma must be non-negative")
    return SymbolTable(grid, _kp_theta(grid, lam, epsilon, sigma, half, True), half)


def kdv_symbol(grid: SpectralGrid, epsilon: float, half: bool = False) -> SymbolTable:
    """Pure KdV symbol ``-epsilon**2*kx**3`` (no transverse term)."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return SymbolTable(grid, _kp_theta(grid, 1, epsilon, 0.0, half, False), half)


def ds_symbol(grid: SpectralGrid, lam: int, eta: float) -> SymbolTable:
    """Davey-Stewartson linear part in comoving coordinates (xi, y).

    ``exp(-i*theta*dt) = exp(i*dt*(3*eta*kxi**2 - lam*ky**2/eta))``.
    """
    if lam != 1:
        raise ValueError("unsupported DS regime: only lambda = +1 is implemented")
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    kx, ky = grid.wavenumbers()
    theta = -(3 * eta * kx**2 - lam * ky**2 / eta) + 0j
    return SymbolTable(grid, theta, False)


def exact_linear_evolve(
    u0: RealField, t: float, lam: int, epsilon: float
) -> RealField:
    """Exact solution of the linear KP flow after time ``t``.

    Data that violate the zero-x-mean constraint are projected first. The
    kx = 0 column is identically zero; the unpaired Nyquist column is left
    untouched (its odd symbol is zero).
    """
    if lam not in (-1, 1):
        raise ValueError(f"lambda must be +1 or -1, got {lam!r}")
    grid = u0.grid
    u_hat = sfft.fft2(project_constraint(u0).values)
    regular = grid.kx != 0
    regular[grid.Nx // 2] = False
    ky2 = grid.ky[:, None] ** 2
    kxr = grid.kx[regular][None, :]
    propagator = np.ones(grid.shape, dtype=complex)
    propagator[:, regular] = np.exp(-1j * t * (lam * ky2 / kxr - epsilon**2 * kxr**3))
    propagator[:, 0] = 0.0
    return RealField(grid, sfft.ifft2(u_hat * propagator).real)
