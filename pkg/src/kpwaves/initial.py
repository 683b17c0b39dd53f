"""Initial data: solitons, radial sech^2 derivatives and the modulated packet."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .analysis import check_carrier_resolved
from .grid import RealField, SpectralGrid, project_constraint

__all__ = [
    "InitFamily",
    "InitSpec",
    "line_soliton",
    "lump_soliton",
    "perturbed_line_soliton",
    "radial_dx_sech2",
    "dx_sech2_profile",
    "modulated_packet",
    "make_initial",
]

# edge values above this make the periodic extension visibly non-smooth
_EDGE_TOL = 1e-14


class InitFamily(enum.Enum):
    LINE_SOLITON = "LINE_SOLITON"
    LUMP = "LUMP"
    PERTURBED_LINE = "PERTURBED_LINE"
    RADIAL_DX_SECH2 = "RADIAL_DX_SECH2"
    MODULATED_PACKET = "MODULATED_PACKET"


@dataclass(frozen=True)
class InitSpec:
    family: InitFamily
    x0: float = 0.0
    c: float = 1.0
    delta: float = 0.0
    amplitude: float = 1.0
    nu: float = 1.0
    epsilon: float = 0.1
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", InitFamily(self.family))
        if self.nu < 0:
            raise ValueError(f"nu must be non-negative, got {self.nu!r}")


def _sech2(z):
    return 1.0 / np.cosh(z) ** 2


def _warn_edges(name: str, values: np.ndarray, check_y: bool = True) -> None:
    edge = np.max(np.abs(values[:, 0]))
    if check_y:
        edge = max(edge, np.max(np.abs(values[0, :])))
    if edge > _EDGE_TOL:
        warnings.warn(
            f"{name}: boundary value {edge:.2e} exceeds {_EDGE_TOL:g}; "
            "the periodic extension is not smooth",
            RuntimeWarning,
            stacklevel=3,
        )


def line_soliton(grid: SpectralGrid, x0: float = 0.0, t: float = 0.0) -> RealField:
    """KdV 1-soliton ``12 sech^2(x - x0 - 4 t)`` (epsilon = 1), y-independent."""
    x, _ = grid.meshgrid()
    return RealField(grid, 12.0 * _sech2(x - x0 - 4.0 * t))


def lump_soliton(grid: SpectralGrid, c: float = 1.0, t: float = 0.0) -> RealField:
    """KP-I lump (epsilon = 1); decays only algebraically, like 1/y^2."""
    if not c > 0:
        raise ValueError(f"lump speed c must be positive, got {c!r}")
    x, y = grid.meshgrid()
    xs = x - 3.0 * c * t
    a = c * xs**2
    b = 3.0 * c**2 * y**2
    return RealField(grid, 24.0 * c * (1.0 - a + b) / (1.0 + a + b) ** 2)


def perturbed_line_soliton(grid: SpectralGrid, x0: float = 0.0, delta: float = 0.0) -> RealField:
    """``12 sech^2(x - x0 + delta cos(0.2 y))``."""
    x, y = grid.meshgrid()
    return RealField(grid, 12.0 * _sech2(x - x0 + delta * np.cos(0.2 * y)))


def dx_sech2_profile(r):
    """``-d/dr sech^2(r) = 2 sech^2(r) tanh(r)``."""
    return 2.0 * _sech2(r) * np.tanh(r)


def _radial_values(grid: SpectralGrid, nu: float) -> np.ndarray:
    x, y = grid.meshgrid()
    r = np.sqrt(x**2 + nu * y**2)
    out = np.zeros(grid.shape)
    nz = r > 0
    # -d/dx sech^2(R) = 2 sech^2(R) tanh(R) x / R, limit 0 at R = 0
    out[nz] = dx_sech2_profile(r[nz]) * x[nz] / r[nz]
    return out


def radial_dx_sech2(grid: SpectralGrid, A: float = 1.0, nu: float = 1.0) -> RealField:
    """``-A d/dx sech^2(R_nu)``, ``R_nu = sqrt(x^2 + nu y^2)``; odd in x.

    ``A = 6, nu = 1`` are the large-amplitude KP data, ``A = 1`` the DS
    envelope. ``nu = 0`` gives y-independent (KdV-sector) data.
    """
    if nu < 0:
        raise ValueError(f"nu must be non-negative, got {nu!r}")
    values = A * _radial_values(grid, nu)
    # nu = 0 data are constant in y, hence trivially periodic there
    _warn_edges("radial_dx_sech2", values, check_y=nu > 0)
    return RealField(grid, values)


@dataclass(frozen=True, eq=False)
class PacketData:
    """Result of :func:`modulated_packet`."""

    field: RealField
    unprojected: RealField
    kx0_residual: float


def modulated_packet(grid: SpectralGrid, epsilon: float, projected_only: bool = True):
    """``2 eps psi_I(x, y) cos(x / eps)`` with the kx = 0 modes removed.

    ``psi_I = -d/dx sech^2(R)``. Returns the projected field, or a
    :class:`PacketData` with the unprojected samples and the largest removed
    kx = 0 coefficient (in the inverse-transform normalization, i.e. the size
    of the removed row means) when ``projected_only`` is false.
    """
    check_carrier_resolved(grid, epsilon)
    x, _ = grid.meshgrid()
    raw = RealField(grid, 2.0 * epsilon * _radial_values(grid, 1.0) * np.cos(x / epsilon))
    residual = float(np.max(np.abs(sfft.fft(raw.values, axis=1)[:, 0]))) / grid.Nx
    projected = project_constraint(raw)
    if projected_only:
        return projected
    return PacketData(projected, raw, residual)


def make_initial(spec: InitSpec, grid: SpectralGrid) -> RealField:
    """Dispatch an :class:`InitSpec` to its constructor."""
    fam = spec.family
    if fam is InitFamily.LINE_SOLITON:
        return line_soliton(grid, spec.x0, spec.t0)
    if fam is InitFamily.LUMP:
        return lump_soliton(grid, spec.c, spec.t0)
    if fam is InitFamily.PERTURBED_LINE:
        return perturbed_line_soliton(grid, spec.x0, spec.delta)
    if fam is InitFamily.RADIAL_DX_SECH2:
        return radial_dx_sech2(grid, spec.amplitude, spec.nu)
    return modulated_packet(grid, spec.epsilon)
