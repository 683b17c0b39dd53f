"""Integrating-factor RK4 time stepping and the evolution driver."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from . import analysis
from .grid import RealField, SpectralField, SpectralGrid, project_constraint
from .linear import SymbolTable
from .models import DSState, ModelKind, ModelSpec, build_tendency, model_symbols, v_to_u_multiplier

__all__ = [
    "BlowUpError",
    "RunConfig",
    "EvolveResult",
    "suggest_dt",
    "if_rk4_step",
    "IFRK4Stepper",
    "evolve",
]

log = logging.getLogger(__name__)

#: abort threshold on max |u|
BLOWUP_AMPLITUDE = 1e6


class BlowUpError(FloatingPointError):
    """Raised when the solution becomes non-finite or exceeds the amplitude cap."""

    def __init__(self, step: int, t: float, reason: str):
        super().__init__(f"numerical blow-up at step {step} (t={t:.6g}): {reason}")
        self.step = step
        self.t = t
        self.reason = reason


@dataclass(frozen=True)
class RunConfig:
    """Time discretization and output schedule.

    The schedule always ends exactly at ``t_end``: ``dt`` is rounded down to
    ``t_end / ceil(t_end / dt)``. ``use_v_formulation=None`` picks the v formulation whenever the model
    needs constrained data. ``enforce_constraint=False`` evolves the data
    as given (used to study unconstrained initial data).
    """

    dt: float
    t_end: float
    snapshot_every: int = 0
    diagnostics_every: int = 1
    use_v_formulation: bool | None = None
    dealias: bool = False
    enforce_constraint: bool = True
    linear_only: bool = False
    record_energy: bool = False

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")
        if self.diagnostics_every < 1:
            raise ValueError("diagnostics_every must be >= 1")

    @property
    def n_steps(self) -> int:
        """Number of steps; ``dt`` is shortened so the last step lands on ``t_end``."""
        return max(1, math.ceil(self.t_end / self.dt * (1 - 1e-12)))

    @property
    def step_size(self) -> float:
        """Step actually taken, ``t_end / n_steps`` (never above ``dt``)."""
        return self.t_end / self.n_steps


@dataclass
class EvolveResult:
    final: RealField | DSState
    snapshots: list = field(default_factory=list)
    diagnostics: analysis.DiagnosticsSeries = field(default_factory=analysis.DiagnosticsSeries)
    warnings: list = field(default_factory=list)


def suggest_dt(grid: SpectralGrid) -> float:
    """Conservative default step ``1 / (Nx * Ny)``."""
    return 1.0 / (grid.Nx * grid.Ny)


class IFRK4Stepper:
    """Classical RK4 in the integrating-factor variable ``w = exp(i theta t) u_hat``.

    Written back in terms of ``u_hat`` with ``E = exp(-i theta dt/2)``::

        k1 = N(u)
        k2 = N(E (u + dt/2 k1))
        k3 = N(E u + dt/2 k2)
        k4 = N(E^2 u + dt E k3)
        u+ = E^2 u + dt/6 (E^2 k1 + 2 E (k2 + k3) + k4)

    With N = 0 the step reduces to ``E^2 u``, the exact linear propagator.
    """

    def __init__(self, symbols: SymbolTable, dt: float, nonlinear):
        self.dt = dt
        self.half = symbols.factor(dt / 2)
        self.full = symbols.factor(dt)
        self.nonlinear = nonlinear

    def step(self, u, t: float = 0.0, index: int | None = None):
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._advance(u, t)
        if not np.all(np.isfinite(out)):
            step = -1 if index is None else index
            raise BlowUpError(step, t + self.dt, "non-finite Fourier coefficients")
        return out

    def _advance(self, u, t):
        dt, E, E2, N = self.dt, self.half, self.full, self.nonlinear
        if N is None:
            out = E2 * u
        else:
            k1 = N(u, t)
            k2 = N(E * (u + (0.5 * dt) * k1), t + 0.5 * dt)
            eu = E * u
            k3 = N(eu + (0.5 * dt) * k2, t + 0.5 * dt)
            e2u = E2 * u
            k4 = N(e2u + dt * (E * k3), t + dt)
            k2 += k3
            k2 *= 2.0 * E
            k1 *= E2
            k1 += k2
            k1 += k4
            k1 *= dt / 6.0
            out = e2u
            out += k1
        return out


def if_rk4_step(state, t: float, dt: float, symbols: SymbolTable, nonlinear, index: int | None = None):
    """One integrating-factor RK4 step.

    ``state`` is a coefficient array on the layout of ``symbols`` or a
    :class:`SpectralField` (full layout); ``nonlinear(u_hat, t)`` returns the
    tendency in the same representation, ``None`` means a purely linear step.
    """
    if isinstance(state, SpectralField):
        if nonlinear is None:
            fn = None
        else:
            def fn(c, tt):
                return np.array(nonlinear(SpectralField(state.grid, c), tt).coeffs)
        out = IFRK4Stepper(symbols, dt, fn).step(state.coeffs, t, index)
        return SpectralField(state.grid, out)
    return IFRK4Stepper(symbols, dt, nonlinear).step(np.asarray(state), t, index)


class _RealState:
    """Conversions for the real models on the real-FFT layout."""

    def __init__(self, grid: SpectralGrid, v_form: bool):
        self.grid = grid
        self.v_form = v_form
        if v_form:
            m = v_to_u_multiplier(grid)
            self.to_u = m
            inv = np.zeros_like(m)
            nz = m != 0
            inv[nz] = 1.0 / m[nz]
            self.from_u = inv

    def encode(self, values: np.ndarray) -> np.ndarray:
        c = sfft.rfft2(values)
        return c * self.from_u if self.v_form else c

    def u_hat(self, state: np.ndarray) -> np.ndarray:
        return state * self.to_u if self.v_form else state

    def physical(self, state: np.ndarray) -> np.ndarray:
        return sfft.irfft2(self.u_hat(state), s=self.grid.shape)

    def amplitude_bound(self, state: np.ndarray) -> float:
        # max|u| <= sum |u_hat| / N, counting conjugate pairs twice
        a = np.abs(self.u_hat(state))
        return float((2.0 * a.sum() - a[:, 0].sum()) / self.grid.size)


class _ComplexState:
    def __init__(self, grid: SpectralGrid):
        self.grid = grid

    def encode(self, values: np.ndarray) -> np.ndarray:
        return sfft.fft2(values)

    def u_hat(self, state):
        return state

    def physical(self, state):
        return sfft.ifft2(state)

    def amplitude_bound(self, state):
        return float(np.abs(state).sum() / self.grid.size)


def _record(diag, model, grid, rep, state, t, record_energy):
    u_hat = rep.u_hat(state)
    diag.times.append(t)
    if model.is_complex:
        full = u_hat
        diag.mass.append(analysis.mass(SpectralField(grid, full)))
        diag.wave_energy.append(diag.mass[-1])
    else:
        diag.mass.append(analysis.mass_from_half(grid, u_hat))
    kx = grid.odd_kx(half=not model.is_complex)[None, :]
    if model.is_complex:
        ux = sfft.ifft2(1j * kx * u_hat)
        diag.maxgrad.append(float(np.max(np.abs(ux))))
    else:
        ux = sfft.irfft2(1j * kx * u_hat, s=grid.shape)
        diag.maxgrad.append(float(np.max(np.abs(ux))))
    if record_energy and not model.is_complex:
        u = RealField(grid, sfft.irfft2(u_hat, s=grid.shape))
        lam = model.lam if model.kind is not ModelKind.KDV else 1
        e = analysis.energy(u, lam, model.epsilon, warn_tol=np.inf)
        diag.energy_printed.append(e.printed)
        diag.energy_conventional.append(e.conventional)


def _as_output(model, grid, rep, state, t):
    if model.is_complex:
        return DSState(SpectralField(grid, state), t)
    return RealField(grid, rep.physical(state))


def evolve(u0, model: ModelSpec, cfg: RunConfig) -> EvolveResult:
    """Integrate ``model`` from ``u0`` up to ``cfg.t_end``.

    ``u0`` is a RealField (real models) or a RealField / DSState holding the
    complex DS envelope. Snapshots are taken every ``cfg.snapshot_every``
    steps (0 disables them, the final state is always returned); the initial
    state counts as snapshot 0.
    """
    warnings_out: list[str] = []
    if isinstance(u0, DSState):
        grid = u0.grid
        values = u0.psi.to_physical()
    else:
        grid = u0.grid
        values = np.asarray(u0.values)

    if model.is_complex:
        if cfg.use_v_formulation:
            raise ValueError("the v formulation is not available for DS")
        v_form = False
        rep = _ComplexState(grid)
        values = values.astype(complex)
    else:
        if np.iscomplexobj(values):
            raise ValueError(f"{model.kind.name} evolves real fields")
        if model.requires_constraint and cfg.enforce_constraint:
            projected = project_constraint(RealField(grid, values)).values
            change = float(np.max(np.abs(projected - values)))
            if change > 1e-12:
                msg = f"initial data projected onto the constraint (max change {change:.3e})"
                warnings_out.append(msg)
                log.warning(msg)
            values = projected
        v_form = cfg.use_v_formulation
        if v_form is None:
            v_form = model.requires_constraint and cfg.enforce_constraint
        if v_form and not (model.requires_constraint and cfg.enforce_constraint):
            raise ValueError("the v formulation needs constrained data")
        rep = _RealState(grid, v_form)

    symbols = model_symbols(model, grid, half=not model.is_complex)
    nonlinear = None if cfg.linear_only else build_tendency(model, grid, v_form, cfg.dealias)
    dt = cfg.step_size
    stepper = IFRK4Stepper(symbols, dt, nonlinear)

    diag = analysis.DiagnosticsSeries()
    if cfg.record_energy and not model.is_complex:
        diag.energy_printed, diag.energy_conventional = [], []
    if model.is_complex:
        diag.wave_energy = []

    state = rep.encode(values)
    result = EvolveResult(final=None, warnings=warnings_out)
    n = cfg.n_steps
    _record(diag, model, grid, rep, state, 0.0, cfg.record_energy)
    if cfg.snapshot_every:
        result.snapshots.append((0.0, _as_output(model, grid, rep, state, 0.0)))

    for i in range(1, n + 1):
        t_prev = (i - 1) * dt
        state = stepper.step(state, t_prev, i)
        t = cfg.t_end if i == n else i * dt
        if rep.amplitude_bound(state) > BLOWUP_AMPLITUDE:
            amp = float(np.max(np.abs(rep.physical(state))))
            if amp > BLOWUP_AMPLITUDE:
                raise BlowUpError(i, t, f"max|u| = {amp:.3e} exceeds {BLOWUP_AMPLITUDE:g}")
        if i % cfg.diagnostics_every == 0 or i == n:
            _record(diag, model, grid, rep, state, t, cfg.record_energy)
        if cfg.snapshot_every and (i % cfg.snapshot_every == 0 or i == n):
            result.snapshots.append((t, _as_output(model, grid, rep, state, t)))

    result.final = _as_output(model, grid, rep, state, cfg.t_end)
    result.diagnostics = diag
    return result
