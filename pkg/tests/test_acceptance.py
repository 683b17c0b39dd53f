"""Acceptance criteria, one test each; every test prints a CRITERION line.

Slow criteria (minutes of runtime) are marked ``slow``; deselect them with
``-m "not slow"``.
"""

import time
import warnings

import numpy as np
import pytest
import scipy.fft as sfft

from conftest import random_constrained
from kpwaves.analysis import (
    field_diff_norms,
    hopf_break_time,
    power_law_fit,
    reconstruct_uapp,
    wave_energy,
)
from kpwaves.grid import RealField, SpectralField, apply_derivative, make_grid, reflect_x
from kpwaves.initial import line_soliton, modulated_packet, radial_dx_sech2
from kpwaves.integrator import BlowUpError, RunConfig, evolve
from kpwaves.io import SnapshotMeta, read_snapshot, write_snapshot
from kpwaves.linear import exact_linear_evolve
from kpwaves.models import DSState, ModelKind, ModelSpec

EPS3 = [0.1, 0.0562, 0.0316]


def _quiet_evolve(u0, model, cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return evolve(u0, model, cfg)


def test_c01_linear_oracle(criterion, rng):
    g = make_grid(128, 64, 1.0, 1.0)
    u0 = RealField(g, random_constrained(g, rng))
    start = time.perf_counter()
    cfg = RunConfig(dt=1e-3, t_end=0.1, linear_only=True)
    out = evolve(u0, ModelSpec.kp(-1, 0.2), cfg).final
    elapsed = time.perf_counter() - start
    err = float(np.max(np.abs(out.values - exact_linear_evolve(u0, 0.1, -1, 0.2).values)))
    ok = cfg.n_steps == 100 and err <= 1e-12 and elapsed < 5
    assert criterion(1, "linear oracle", ok, f"Linf={err:.2e} (<=1e-12), {elapsed:.2f}s (<5s)")


@pytest.mark.slow
def test_c02_soliton_propagation(criterion):
    model = ModelSpec.kdv(1.0)
    cfg = RunConfig(dt=3e-3, t_end=2.0, diagnostics_every=10)

    def run(nx):
        g = make_grid(nx, 16, 10, 10)
        res = _quiet_evolve(line_soliton(g), model, cfg)
        err = float(np.max(np.abs(res.final.values - line_soliton(g, 0.0, 2.0).values)))
        return err, float(np.max(np.abs(res.diagnostics.err)))

    start = time.perf_counter()
    details = []
    try:
        linf, merr = run(2048)
        details.append(f"Linf={linf:.2e} (<=1e-4), |err|={merr:.2e} (<=1e-6)")
        ok = linf <= 1e-4 and merr <= 1e-6
    except BlowUpError as exc:
        details.append(f"Nx=2^11 run failed: {exc}")
        ok = False
    try:
        coarse, _ = run(512)
        fine, _ = run(1024)
        ratio = coarse / fine
        details.append(f"2^9->2^10 error ratio={ratio:.2f} (>=10)")
        ok = ok and ratio >= 10
    except BlowUpError as exc:
        details.append(f"doubling run failed: {exc}")
        ok = False
    elapsed = time.perf_counter() - start
    details.append(f"{elapsed:.0f}s (<120s)")
    ok = ok and elapsed < 120
    assert criterion(2, "soliton propagation", ok, "; ".join(details))


def test_c03_ds_conservation(criterion):
    g = make_grid(256, 256, 6.0, 6.0)
    psi0 = radial_dx_sech2(g, 1.0, 1.0).values + 0j
    state = DSState(SpectralField(g, sfft.fft2(psi0)), 0.0)
    start = time.perf_counter()
    res = evolve(state, ModelSpec.ds(1.0), RunConfig(dt=2e-3, t_end=0.4, diagnostics_every=10))
    elapsed = time.perf_counter() - start
    n0, n1 = wave_energy(state.psi), wave_energy(res.final.psi)
    drift = max(abs(n1 - n0) / n0, float(np.max(np.abs(res.diagnostics.err))))
    ok = drift <= 1e-10 and elapsed < 120
    assert criterion(3, "DS conservation", ok, f"rel drift={drift:.2e} (<=1e-10), {elapsed:.1f}s (<120s)")


# (epsilon, Nx, Lx=Ly, dt): the first row is the reference resolution, the others are
# scaled so that Nx stays at 2^11 and the carrier stays resolved
SCALING_ROWS = [(0.1, 1024, 10.0, 8e-5), (0.0562, 2048, 10.0, 8e-5), (0.0316, 2048, 5.0, 6.67e-5)]


@pytest.mark.slow
def test_c04_small_amplitude_scaling(criterion):
    start = time.perf_counter()
    d2s, dinfs = [], []
    for eps, nx, length, dt in SCALING_ROWS:
        g = make_grid(nx, 128, length, length)
        kp = evolve(modulated_packet(g, eps), ModelSpec.kp(1, eps), RunConfig(dt=dt, t_end=1.0)).final
        psi0 = DSState(SpectralField(g, sfft.fft2(radial_dx_sech2(g, 1.0, 1.0).values + 0j)), 0.0)
        ds = evolve(psi0, ModelSpec.ds(1.0), RunConfig(dt=2e-3, t_end=eps)).final
        d2, dinf = field_diff_norms(kp, reconstruct_uapp(ds, 1.0, eps))
        d2s.append(d2)
        dinfs.append(dinf)
    elapsed = time.perf_counter() - start
    a2 = power_law_fit(EPS3, d2s).a
    ainf = power_law_fit(EPS3, dinfs).a
    ok = 1.9 <= a2 <= 3.1 and 1.7 <= ainf <= 2.9 and elapsed < 1800
    detail = f"D2 slope={a2:.3f} [1.9,3.1], Dinf slope={ainf:.3f} [1.7,2.9], {elapsed:.0f}s (<1800s)"
    assert criterion(4, "small-amplitude scaling", ok, detail)


@pytest.mark.slow
def test_c05_dkp_prebreakup_scaling(criterion):
    g = make_grid(2048, 128, 5.0, 5.0)
    u0 = radial_dx_sech2(g, 6.0, 1.0)
    cfg = RunConfig(dt=2e-5, t_end=0.2, diagnostics_every=500)
    start = time.perf_counter()
    ref = evolve(u0, ModelSpec.dkp(-1), cfg)
    mass_err = float(np.max(np.abs(ref.diagnostics.err)))
    d2s, dinfs = [], []
    for eps in EPS3:
        d2, dinf = field_diff_norms(evolve(u0, ModelSpec.kp(-1, eps), cfg).final, ref.final)
        d2s.append(d2)
        dinfs.append(dinf)
    elapsed = time.perf_counter() - start
    a2 = power_law_fit(EPS3, d2s).a
    ainf = power_law_fit(EPS3, dinfs).a
    ok = 1.1 <= a2 <= 1.8 and 0.6 <= ainf <= 1.3 and mass_err <= 1e-4 and elapsed < 2700
    detail = (f"D2 slope={a2:.3f} [1.1,1.8], Dinf slope={ainf:.3f} [0.6,1.3], "
              f"dKP mass err={mass_err:.1e} (<=1e-4), {elapsed:.0f}s (<2700s)")
    assert criterion(5, "dKP/KP pre-breakup scaling", ok, detail)


def _front_steepness(snapshots, grid):
    j0 = int(np.argmin(np.abs(grid.y)))
    pos = grid.x > 0
    times, values = [], []
    for t, snap in snapshots:
        ux = apply_derivative(snap.to_spectral(), "x", 1).to_real().values
        times.append(t)
        values.append(float(np.max(-ux[j0, pos])))
    return np.array(times), np.array(values)


@pytest.mark.slow
def test_c06_break_time(criterion):
    g = make_grid(4096, 128, 10, 10)
    u0 = radial_dx_sech2(g, 6.0, 1.0)
    j0 = int(np.argmin(np.abs(g.y)))
    tb = hopf_break_time(u0.values[j0], g.hx)
    res = evolve(u0, ModelSpec.dkp(-1, 0.01), RunConfig(dt=5e-5, t_end=0.4, snapshot_every=50))
    times, steep = _front_steepness(res.snapshots, g)
    plateau = float(np.median(steep[times >= 0.3]))
    crossing = float(times[np.argmax(steep > 0.5 * plateau)])
    ok = abs(tb - 0.25) <= 1e-6 and 0.20 <= crossing <= 0.28
    detail = f"t_b={tb:.9f} (0.25+-1e-6), half-plateau crossing t={crossing:.4f} [0.20,0.28]"
    assert criterion(6, "break time", ok, detail)


def test_c07_mirror_symmetry(criterion):
    g = make_grid(512, 64, 8, 8)
    u0 = radial_dx_sech2(g, 6.0, 1.0)
    cfg = RunConfig(dt=1e-4, t_end=0.2)
    plus = evolve(u0, ModelSpec.dkp(1), cfg).final.values
    minus = evolve(u0, ModelSpec.dkp(-1), cfg).final.values
    err = float(np.max(np.abs(plus + reflect_x(minus))))
    assert criterion(7, "mirror symmetry", err <= 1e-10, f"Linf={err:.2e} (<=1e-10)")


def test_c08_constraint_violation(criterion):
    g = make_grid(256, 64, 6, 6)
    x, y = g.meshgrid()
    u0 = RealField(g, 1 / np.cosh(np.sqrt(x**2 + y**2)) ** 2)
    raw_row = float(np.max(np.abs(sfft.fft2(u0.values)[1:, 0])))
    cfg = RunConfig(dt=1e-3, t_end=1e-3, enforce_constraint=False)
    out = evolve(u0, ModelSpec.kp(-1, 0.3), cfg).final
    row = float(np.max(np.abs(sfft.fft2(out.values)[1:, 0])))
    ok = row <= 1e-12 and raw_row > 1
    assert criterion(8, "constraint violation", ok, f"max|u_hat(kx=0,ky!=0)|={row:.2e} (<=1e-12), initial {raw_row:.1f}")


def test_c09_rk4_order(criterion):
    g = make_grid(128, 64, 6, 6)
    u0 = radial_dx_sech2(g, 1.0, 1.0)
    sols = [evolve(u0, ModelSpec.kp(-1, 0.3), RunConfig(dt=0.01 / n, t_end=0.01)).final.values
            for n in (2, 4, 8)]
    d1 = np.max(np.abs(sols[0] - sols[1]))
    d2 = np.max(np.abs(sols[1] - sols[2]))
    slope = float(np.log2(d1 / d2))
    assert criterion(9, "RK4 order", 3.7 <= slope <= 4.3, f"Richardson slope={slope:.3f} [3.7,4.3]")


def test_c10_unit_level(criterion, rng):
    eps = [0.1, 0.0562, 0.0316, 0.0178, 0.01]
    fit = power_law_fit(eps, [10 * e**2 for e in eps])
    fit_err = max(abs(fit.a - 2), abs(fit.b - 1), abs(fit.r - 1), abs(fit.sigma_a))

    g = make_grid(64, 32, 2.0, 3.0)
    u = RealField(g, rng.normal(size=g.shape))
    back, meta = read_snapshot(write_snapshot(u, SnapshotMeta(0.3, 0.1, -1, ModelKind.KP)))
    bitwise = back.values.tobytes() == u.values.tobytes() and meta.t == 0.3

    axioms = True
    for _ in range(100):
        a, b, c = (RealField(g, rng.normal(size=g.shape) * 10 ** rng.uniform(-3, 3)) for _ in range(3))
        for k in (0, 1):
            ab, ba = field_diff_norms(a, b)[k], field_diff_norms(b, a)[k]
            tri = field_diff_norms(a, c)[k] + field_diff_norms(c, b)[k]
            axioms &= ab == ba and ab > 0 and field_diff_norms(a, a)[k] == 0 and ab <= tri * (1 + 1e-15)

    ok = fit_err <= 1e-12 and bitwise and axioms
    detail = f"fit max dev={fit_err:.1e} (<=1e-12), snapshot bitwise={bitwise}, metric axioms={axioms}"
    assert criterion(10, "unit level", ok, detail)
