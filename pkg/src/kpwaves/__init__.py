"""Pseudospectral solvers for the Kadomtsev-Petviashvili equation family."""

from .airy import airy_eval, tail_kernel
from .analysis import (
    DiagnosticsSeries,
    FitResult,
    energy,
    err_mass,
    field_diff_norms,
    hopf_break_time,
    mass,
    max_x_gradient,
    power_law_fit,
    reconstruct_uapp,
    wave_energy,
)
from .grid import RealField, SpectralField, SpectralGrid, make_grid, project_constraint
from .initial import InitFamily, InitSpec, make_initial
from .integrator import BlowUpError, EvolveResult, RunConfig, evolve, if_rk4_step, suggest_dt
from .io import Config, ConfigError, SnapshotError, SnapshotMeta, parse_config, read_snapshot, write_snapshot
from .linear import SymbolTable, ds_symbol, exact_linear_evolve, kdv_symbol, kp_symbol
from .models import DSState, ModelKind, ModelSpec

__version__ = "0.1.0"
