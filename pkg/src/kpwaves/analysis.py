"""Conserved quantities, error norms, asymptotic reconstruction and fits."""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.fft as sfft
from scipy import optimize, stats

from .grid import (
    RealField,
    SpectralField,
    SpectralGrid,
    antideriv_x,
    apply_derivative,
    spectral_translate,
)

__all__ = [
    "DiagnosticsSeries",
    "FitResult",
    "Energy",
    "mass",
    "wave_energy",
    "energy",
    "err_mass",
    "max_x_gradient",
    "field_diff_norms",
    "reconstruct_uapp",
    "hopf_break_time",
    "power_law_fit",
    "conserved_energy_variant",
]


def _quadrature(grid: SpectralGrid, values: np.ndarray) -> float:
    # trapezoidal rule on the periodic grid
    return float(grid.hx * grid.hy * np.sum(values))


def mass(u) -> float:
    """Integral of u**2 over the box, evaluated with Parseval's identity."""
    if isinstance(u, SpectralField):
        grid, coeffs = u.grid, u.coeffs
    else:
        grid, coeffs = u.grid, sfft.fft2(u.values)
    power = coeffs.real**2 + coeffs.imag**2
    return float(grid.hx * grid.hy / grid.size * np.sum(power))


def mass_from_half(grid: SpectralGrid, coeffs: np.ndarray) -> float:
    """Parseval mass from real-FFT (``Ny x (Nx/2+1)``) coefficients."""
    power = coeffs.real**2 + coeffs.imag**2
    total = 2.0 * np.sum(power) - np.sum(power[:, 0]) - np.sum(power[:, grid.Nx // 2])
    return float(grid.hx * grid.hy / grid.size * total)


def wave_energy(psi) -> float:
    """Integral of |psi|**2; accepts a DSState, SpectralField or RealField."""
    if hasattr(psi, "psi"):
        psi = psi.psi
    return mass(psi)


class Energy(NamedTuple):
    printed: float
    conventional: float


def energy(u: RealField, lam: int, epsilon: float, warn_tol: float = 1e-10) -> Energy:
    """Both placements of epsilon in the KP energy.

    ``printed``: 1/2 * int (u_x^2 - lam (dx^-1 u_y)^2 - epsilon^2 u^3 / 3)
    ``conventional``: 1/2 * int (epsilon^2 u_x^2 - lam (dx^-1 u_y)^2 - u^3 / 3)
    """
    grid = u.grid
    u_hat = u.to_spectral()
    residual = float(np.max(np.abs(u_hat.coeffs[:, 0]))) / grid.Nx
    if residual > warn_tol:
        warnings.warn(
            f"constraint residual {residual:.3e} exceeds {warn_tol:g}; "
            "the anti-derivative term is not well defined",
            RuntimeWarning,
            stacklevel=2,
        )
    ux = apply_derivative(u_hat, "x", 1).to_real().values
    w = antideriv_x(apply_derivative(u_hat, "y", 1), lam).to_real().values
    ux2 = _quadrature(grid, ux**2)
    w2 = _quadrature(grid, w**2)
    u3 = _quadrature(grid, u.values**3)
    printed = 0.5 * (ux2 - lam * w2 - epsilon**2 * u3 / 3.0)
    conventional = 0.5 * (epsilon**2 * ux2 - lam * w2 - u3 / 3.0)
    return Energy(printed, conventional)


def err_mass(masses) -> np.ndarray:
    """``1 - M(t) / M(0)`` for a mass time series."""
    masses = np.asarray(masses, dtype=float)
    if masses.size == 0 or masses[0] == 0:
        raise ValueError("initial mass must be non-zero")
    return 1.0 - masses / masses[0]


def max_x_gradient(u) -> float:
    """max |du/dx| over the grid (spectral derivative)."""
    ux = apply_derivative(u if isinstance(u, SpectralField) else u.to_spectral(), "x", 1)
    return float(np.max(np.abs(ux.to_physical().real)))


def field_diff_norms(u: RealField, v: RealField) -> tuple[float, float]:
    """``(delta2, deltainf)`` of u - v.

    ``delta2 = sqrt(int (u - v)^2) / (2 pi sqrt(Lx Ly))`` so that a constant
    difference c gives ``delta2 = |c|``.
    """
    if u.grid != v.grid:
        raise ValueError(f"grid mismatch: {u.grid} vs {v.grid}")
    grid = u.grid
    d = u.values - v.values
    if np.iscomplexobj(d):
        d2 = np.abs(d) ** 2
    else:
        d2 = d * d
    integral = _quadrature(grid, d2)
    delta2 = math.sqrt(integral) / (2 * math.pi * math.sqrt(grid.Lx * grid.Ly))
    return delta2, float(np.max(np.abs(d)))


def check_carrier_resolved(grid: SpectralGrid, epsilon: float, eta: float = 1.0) -> None:
    """Require about 8 grid points per carrier wavelength ``2 pi epsilon / eta``."""
    if not epsilon > 0:
        raise ValueError(f"carrier scale epsilon must be positive, got {epsilon!r}")
    needed = 8 * grid.Lx * eta / epsilon
    if grid.Nx < needed:
        raise ValueError(
            f"carrier unresolved: Nx={grid.Nx} < 8*Lx*eta/epsilon={needed:.1f}"
        )


def reconstruct_uapp(psi, t: float, epsilon: float, eta: float = 1.0) -> RealField:
    """Leading-order KP approximation from a DS envelope.

    ``u_app(t, x, y) = 2 eps Re(psi(eps t, x + 3 eta^2 t, y) exp(i (eta x + eta^3 t) / eps))``.
    ``psi`` is a DSState on the lab grid whose slow time should equal
    ``epsilon * t``.
    """
    grid = psi.grid
    check_carrier_resolved(grid, epsilon, eta)
    tau = getattr(psi, "tau", None)
    if tau is not None and abs(tau - epsilon * t) > 1e-9 * max(1.0, abs(epsilon * t)):
        raise ValueError(f"DS state is at tau={tau!r}, expected epsilon*t={epsilon * t!r}")
    coeffs = psi.psi if hasattr(psi, "psi") else psi
    shifted = spectral_translate(coeffs, 3 * eta**2 * t).to_physical()
    x = grid.x[None, :]
    carrier = np.exp(1j * (eta * x + eta**3 * t) / epsilon)
    return RealField(grid, 2 * epsilon * (shifted * carrier).real)


def hopf_break_time(u_slice, hx: float):
    """Break time ``1 / max(-u')`` of the Hopf solution, or None.

    The derivative is spectral; the maximum is refined on the trigonometric
    interpolant around the best grid sample.
    """
    u = np.asarray(u_slice, dtype=float)
    n = u.size
    if n < 4:
        raise ValueError("need at least 4 samples")
    k = 2 * np.pi * np.fft.fftfreq(n, d=hx)
    c = np.fft.fft(u)
    if n % 2 == 0:
        c[n // 2] = 0.0
    slope = -np.fft.ifft(1j * k * c).real
    j = int(np.argmax(slope))
    if slope[j] <= 0:
        return None

    # -u'(x) of the interpolant, with x measured from sample 0
    def neg_slope_at(s):
        return -float(np.real(np.sum(-1j * k * c * np.exp(1j * k * s))) / n)

    lo, hi = (j - 1) * hx, (j + 1) * hx
    res = optimize.minimize_scalar(
        neg_slope_at, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * max(hx, 1.0)}
    )
    peak = max(slope[j], -res.fun)
    return 1.0 / peak


@dataclass(frozen=True)
class FitResult:
    """Least-squares line ``log10(delta) = a * log10(eps) + b``."""

    a: float
    b: float
    r: float
    sigma_a: float
    n: int

    def format(self) -> str:
        return f"a={self.a:.6f} b={self.b:.6f} r={self.r:.6f} sigma_a={self.sigma_a:.6f}"


def power_law_fit(eps_values, errors) -> FitResult:
    """Ordinary least squares of log10(errors) against log10(eps_values).

    ``sigma_a`` is the residual-based standard error of the slope (n - 2
    degrees of freedom); it is 0 for two points.
    """
    eps = np.asarray(eps_values, dtype=float)
    err = np.asarray(errors, dtype=float)
    if eps.shape != err.shape or eps.ndim != 1:
        raise ValueError("eps_values and errors must be 1-D sequences of equal length")
    if eps.size < 2:
        raise ValueError("need at least two points")
    if np.any(eps <= 0) or np.any(err <= 0) or not np.all(np.isfinite(eps * err)):
        raise ValueError("power-law fit needs positive, finite inputs")
    lx, ly = np.log10(eps), np.log10(err)
    if np.ptp(lx) == 0:
        raise ValueError("eps values must not all coincide")
    res = stats.linregress(lx, ly)
    sigma_a = float(res.stderr) if eps.size > 2 else 0.0
    r = float(np.clip(res.rvalue, -1.0, 1.0))
    return FitResult(float(res.slope), float(res.intercept), r, sigma_a, int(eps.size))


@dataclass
class DiagnosticsSeries:
    """Time series recorded during an evolution."""

    times: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    maxgrad: list = field(default_factory=list)
    energy_printed: list | None = None
    energy_conventional: list | None = None
    wave_energy: list | None = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def err(self) -> np.ndarray:
        return err_mass(self.mass)

    def columns(self) -> dict[str, np.ndarray]:
        cols = {
            "t": np.asarray(self.times, dtype=float),
            "mass": np.asarray(self.mass, dtype=float),
            "err": self.err if self.mass else np.zeros(0),
            "maxgrad": np.asarray(self.maxgrad, dtype=float),
        }
        if self.energy_printed is not None:
            cols["energy_printed"] = np.asarray(self.energy_printed, dtype=float)
            cols["energy_conventional"] = np.asarray(self.energy_conventional, dtype=float)
        if self.wave_energy is not None:
            cols["wave_energy"] = np.asarray(self.wave_energy, dtype=float)
        return cols

    def to_csv(self) -> str:
        cols = self.columns()
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for row in zip(*cols.values()):
            buf.write(",".join(f"{float(v):.17g}" for v in row) + "\n")
        return buf.getvalue()


def conserved_energy_variant(series: DiagnosticsSeries) -> str:
    """Name of the energy variant with the smaller relative drift."""
    if series.energy_printed is None:
        raise ValueError("series has no energy columns")
    drifts = {}
    for name in ("printed", "conventional"):
        e = np.asarray(getattr(series, f"energy_{name}"), dtype=float)
        scale = max(abs(e[0]), np.finfo(float).tiny)
        drifts[name] = float(np.max(np.abs(e - e[0])) / scale)
    return min(drifts, key=drifts.get)
