"""Model definitions and nonlinear tendencies.

Each model is ``d/dt u_hat + i*theta*u_hat = N(u_hat)``. The public
``*_nonlinear`` functions work on :class:`SpectralField` values (full FFT
layout); :func:`build_tendency` returns the array-level closure the
integrator calls four times per step, on the real-FFT layout for the real
models.

Products are formed in physical space without dealiasing unless requested.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .grid import SpectralField, SpectralGrid
from .linear import SymbolTable, ds_symbol, kdv_symbol, kp_symbol

__all__ = [
    "ModelKind",
    "ModelSpec",
    "DSState",
    "kp_nonlinear",
    "dkp_nonlinear",
    "ds_mean_field",
    "ds_nonlinear",
    "model_symbols",
    "build_tendency",
    "dealias_mask",
]


class ModelKind(enum.IntEnum):
    KP = 0
    DKP_REG = 1
    KDV = 2
    DS = 3


@dataclass(frozen=True)
class ModelSpec:
    """Which equation to solve and its parameters.

    ``lam`` is the transverse sign (KP-I: -1, KP-II: +1), ``epsilon`` the
    dispersion scale, ``sigma`` the dissipation of the regularized dKP model
    and ``eta`` the DS carrier wavenumber.
    """

    kind: ModelKind
    lam: int = 1
    epsilon: float = 0.0
    sigma: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        kind = ModelKind(self.kind) if not isinstance(self.kind, str) else ModelKind[self.kind]
        object.__setattr__(self, "kind", kind)
        if self.lam not in (-1, 1):
            raise ValueError(f"lambda must be +1 or -1, got {self.lam!r}")
        if self.epsilon < 0 or self.sigma < 0:
            raise ValueError("epsilon and sigma must be non-negative")
        if kind is ModelKind.KP:
            if not self.epsilon > 0:
                raise ValueError("KP requires epsilon > 0 (use DKP_REG for epsilon = 0)")
            if self.sigma != 0:
                raise ValueError("KP requires sigma = 0 (dissipation belongs to DKP_REG)")
        elif kind is ModelKind.DKP_REG:
            if self.epsilon != 0:
                raise ValueError("DKP_REG requires epsilon = 0")
        elif kind is ModelKind.KDV:
            if self.sigma != 0:
                raise ValueError("KDV requires sigma = 0")
        elif kind is ModelKind.DS:
            if self.lam != 1:
                raise ValueError("unsupported DS regime: only lambda = +1 is implemented")
            if not self.eta > 0:
                raise ValueError(f"DS requires eta > 0, got {self.eta!r}")

    @property
    def is_complex(self) -> bool:
        return self.kind is ModelKind.DS

    @property
    def requires_constraint(self) -> bool:
        """Models with the singular transverse term need zero-x-mean data."""
        return self.kind in (ModelKind.KP, ModelKind.DKP_REG)

    # convenience constructors
    @classmethod
    def kp(cls, lam: int, epsilon: float) -> ModelSpec:
        return cls(ModelKind.KP, lam=lam, epsilon=epsilon)

    @classmethod
    def dkp(cls, lam: int, sigma: float = 0.0) -> ModelSpec:
        return cls(ModelKind.DKP_REG, lam=lam, sigma=sigma)

    @classmethod
    def kdv(cls, epsilon: float) -> ModelSpec:
        return cls(ModelKind.KDV, epsilon=epsilon)

    @classmethod
    def ds(cls, eta: float = 1.0) -> ModelSpec:
        return cls(ModelKind.DS, lam=1, eta=eta)


@dataclass(frozen=True, eq=False)
class DSState:
    """DS envelope on the comoving grid (xi, y) at slow time ``tau``."""

    psi: SpectralField
    tau: float = 0.0

    @property
    def grid(self) -> SpectralGrid:
        return self.psi.grid

    def values(self) -> np.ndarray:
        return self.psi.to_physical()


def model_symbols(model: ModelSpec, grid: SpectralGrid, half: bool) -> SymbolTable:
    if model.kind is ModelKind.KP:
        return kp_symbol(grid, model.lam, model.epsilon, 0.0, half)
    if model.kind is ModelKind.DKP_REG:
        return kp_symbol(grid, model.lam, 0.0, model.sigma, half)
    if model.kind is ModelKind.KDV:
        return kdv_symbol(grid, model.epsilon, half)
    if half:
        raise ValueError("DS is complex-valued and needs the full FFT layout")
    return ds_symbol(grid, model.lam, model.eta)


def kp_nonlinear(u_hat: SpectralField) -> SpectralField:
    """``-(i kx / 2) * FFT(u**2)``, the KP/KdV/dKP tendency."""
    grid = u_hat.grid
    u = sfft.ifft2(u_hat.coeffs).real
    return SpectralField(grid, -0.5j * grid.odd_kx()[None, :] * sfft.fft2(u * u))


def dkp_nonlinear(u_hat: SpectralField) -> SpectralField:
    # dissipation lives in the symbol; the quadratic term is the KP one
    return kp_nonlinear(u_hat)


def _mean_field_multiplier(grid: SpectralGrid, eta: float, lam: int) -> np.ndarray:
    kx, ky = grid.wavenumbers()
    num = -eta * kx**2
    den = 3 * eta**2 * kx**2 + lam * ky**2
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den != 0, num / den, 0.0)


def ds_mean_field(psi_hat: SpectralField, eta: float, lam: int = 1) -> SpectralField:
    """Mean field ``phi_hat = -eta kxi^2 / (3 eta^2 kxi^2 + lam ky^2) * FFT(|psi|^2)``.

    The (0, 0) mode, where the multiplier is 0/0, is set to zero.
    """
    if lam != 1:
        raise ValueError("unsupported DS regime: only lambda = +1 is implemented")
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta!r}")
    grid = psi_hat.grid
    psi = sfft.ifft2(psi_hat.coeffs)
    dens = sfft.fft2(np.abs(psi) ** 2)
    return SpectralField(grid, _mean_field_multiplier(grid, eta, lam) * dens)


def ds_nonlinear(psi_hat: SpectralField, eta: float, lam: int = 1) -> SpectralField:
    """``-i * FFT((|psi|^2 / (6 eta) + eta * phi) * psi)``."""
    grid = psi_hat.grid
    psi = sfft.ifft2(psi_hat.coeffs)
    phi = sfft.ifft2(ds_mean_field(psi_hat, eta, lam).coeffs).real
    potential = np.abs(psi) ** 2 / (6 * eta) + eta * phi
    return SpectralField(grid, -1j * sfft.fft2(potential * psi))


def dealias_mask(grid: SpectralGrid, half: bool) -> np.ndarray:
    """2/3-rule mask: keep |k| < (2/3) k_max in both directions."""
    kx, ky = grid.wavenumbers(half)
    keep_x = np.abs(kx) * grid.Lx < grid.Nx / 3
    keep_y = np.abs(ky) * grid.Ly < grid.Ny / 3
    return (keep_x & keep_y).astype(float)


def build_tendency(
    model: ModelSpec,
    grid: SpectralGrid,
    v_form: bool = False,
    dealias: bool = False,
):
    """Array-level tendency ``N(state, t)`` for the integrator.

    Real models use the real-FFT layout. With ``v_form`` the state is
    ``v_hat = u_hat / (i kx)``; the kx = 0 column is then identically zero and
    the Nyquist column stores ``u_hat`` itself, so ``u_hat = m * v_hat`` with
    ``m = i kx`` (0 at kx = 0, 1 at Nyquist).
    """
    shape = grid.shape
    if model.kind is ModelKind.DS:
        if v_form:
            raise ValueError("the v formulation applies to the real KP-type models only")
        mult = _mean_field_multiplier(grid, model.eta, model.lam)
        eta = model.eta
        mask = dealias_mask(grid, False) if dealias else None

        def ds_tendency(psi_hat, t):
            psi = sfft.ifft2(psi_hat)
            dens = psi.real**2 + psi.imag**2
            phi = sfft.ifft2(mult * sfft.fft2(dens)).real
            out = sfft.fft2((dens / (6 * eta) + eta * phi) * psi)
            out *= -1j
            if mask is not None:
                out *= mask
            return out

        return ds_tendency

    kx_odd = grid.odd_kx(half=True)
    if v_form:
        coef = np.where(kx_odd != 0, -0.5, 0.0)[None, :] + 0j
        to_u = v_to_u_multiplier(grid)
    else:
        coef = (-0.5j * kx_odd)[None, :]
        to_u = None
    if dealias:
        coef = coef * dealias_mask(grid, True)

    def kp_tendency(state, t):
        u_hat = state if to_u is None else state * to_u
        u = sfft.irfft2(u_hat, s=shape)
        u *= u
        out = sfft.rfft2(u)
        out *= coef
        return out

    return kp_tendency


def v_to_u_multiplier(grid: SpectralGrid) -> np.ndarray:
    """Row ``m`` with ``u_hat = m * v_hat`` on the real-FFT layout."""
    m = 1j * grid.kx_half
    m[0] = 0.0
    m[grid.Nx // 2] = 1.0
    return m[None, :]
