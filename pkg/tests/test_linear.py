import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from conftest import random_constrained
from kpwaves.airy import (
    SERIES_MAX,
    SERIES_MIN,
    airy_asymptotic,
    airy_eval,
    airy_series,
    tail_kernel,
)
from kpwaves.analysis import mass
from kpwaves.grid import RealField, make_grid
from kpwaves.linear import ds_symbol, exact_linear_evolve, kdv_symbol, kp_symbol


# --- symbols ---------------------------------------------------------------

def test_kp_factor_at_kx_zero():
    g = make_grid(16, 8, 1, 1)
    for lam in (-1, 1):
        f = kp_symbol(g, lam, 0.1).factor(1e-3)
        assert f[0, 0] == 1
        assert np.all(f[1:, 0] == 0)


def test_kp_factor_is_pure_phase():
    g = make_grid(32, 16, 2, 3)
    for lam in (-1, 1):
        f = kp_symbol(g, lam, 0.3).factor(1e-2)
        assert np.max(np.abs(np.abs(f[:, 1:]) - 1)) <= 1e-15
        # the delta regularization damps by exp(-dt ky^2 delta / kx^2), visible for large dt
        dt = 0.7
        f = kp_symbol(g, lam, 0.3).factor(dt)
        kx, ky = g.wavenumbers()
        kx = g.odd_kx()[None, 1:]
        expected = np.exp(-dt * ky[:, :1] ** 2 * np.finfo(float).eps / kx**2)
        expected[:, g.Nx // 2 - 1] = 1.0
        assert np.max(np.abs(np.abs(f[:, 1:]) - expected)) <= 1e-15


def test_dissipative_factor_magnitude():
    g = make_grid(16, 8, 1, 1)
    f = kp_symbol(g, 1, 0.0, sigma=0.01).factor(1.0)
    # ky = 0 row, kx = 2
    assert abs(f[0, 2]) == pytest.approx(math.exp(-0.04), rel=1e-14)


def test_half_layout_matches_full():
    g = make_grid(16, 8, 1.3, 0.7)
    full = kp_symbol(g, -1, 0.2, 0.05).theta
    half = kp_symbol(g, -1, 0.2, 0.05, half=True).theta
    assert np.array_equal(half, full[:, : g.Nx // 2 + 1])


def test_symbol_validation():
    g = make_grid(8, 8, 1, 1)
    with pytest.raises(ValueError):
        kp_symbol(g, 0, 0.1)
    with pytest.raises(ValueError):
        kp_symbol(g, 1, -0.1)


def test_kdv_symbol_has_no_transverse_term():
    g = make_grid(16, 8, 1, 1)
    th = kdv_symbol(g, 0.5).theta
    assert np.all(th[:, 0] == 0)
    assert np.array_equal(th[0], th[3])


def test_ds_symbol():
    g = make_grid(8, 8, 1, 1)
    f = ds_symbol(g, 1, 1.0).factor(1.0)
    assert f[0, 1] == pytest.approx(np.exp(3j), abs=1e-15)
    assert np.max(np.abs(np.abs(f) - 1)) <= 1e-15
    with pytest.raises(ValueError, match="unsupported DS regime"):
        ds_symbol(g, -1, 1.0)


# --- exact linear flow ------------------------------------------------------

def test_single_mode_phase():
    g = make_grid(8, 8, 1, 1)
    x, y = g.meshgrid()
    u0 = RealField(g, np.cos(x + y))
    t, lam, eps = 0.37, 1, 0.5
    out = exact_linear_evolve(u0, t, lam, eps).values
    w = lam - eps**2
    assert np.max(np.abs(out - np.cos(x + y - w * t))) <= 1e-14


def test_linear_identity_at_t0(rng):
    g = make_grid(32, 16, 1, 1)
    u0 = RealField(g, random_constrained(g, rng))
    assert np.max(np.abs(exact_linear_evolve(u0, 0.0, -1, 0.1).values - u0.values)) <= 1e-14


def test_linear_projects_unconstrained(rng):
    g = make_grid(16, 8, 1, 1)
    out = exact_linear_evolve(RealField(g, rng.normal(size=g.shape)), 0.1, 1, 0.1)
    assert np.max(np.abs(out.values.sum(axis=1))) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    t1=st.floats(0.0, 2.0),
    t2=st.floats(0.0, 2.0),
    lam=st.sampled_from([-1, 1]),
    eps=st.floats(0.0, 0.5),
)
def test_linear_semigroup_and_mass(seed, t1, t2, lam, eps):
    g = make_grid(32, 16, 1.0, 1.5)
    u0 = RealField(g, random_constrained(g, np.random.default_rng(seed)))
    one = exact_linear_evolve(u0, t1 + t2, lam, eps).values
    two = exact_linear_evolve(exact_linear_evolve(u0, t1, lam, eps), t2, lam, eps).values
    scale = np.max(np.abs(u0.values))
    assert np.max(np.abs(one - two)) <= 1e-12 * scale
    m0 = mass(u0)
    assert abs(mass(RealField(g, one)) - m0) <= 1e-12 * m0


# --- Airy ------------------------------------------------------------------

def test_airy_at_zero():
    ref = 1.0 / (3 ** (2 / 3) * math.gamma(2 / 3))
    assert airy_eval(0.0) == pytest.approx(ref, rel=1e-15)
    assert airy_eval(0.0) == pytest.approx(0.35502805388781723926, rel=1e-14)


@pytest.mark.parametrize("x", np.concatenate([np.linspace(-14, 12, 105), [SERIES_MIN, SERIES_MAX]]))
def test_airy_against_scipy(x):
    ref = special.airy(x)[0]
    val = airy_eval(x)
    # relative accuracy, measured against the envelope on the oscillatory side
    scale = abs(ref) if x >= 0 else max(abs(ref), abs(x) ** -0.25 / math.sqrt(math.pi) * 1e-2)
    assert abs(val - ref) <= 1e-8 * scale


def test_branches_agree_at_switch_points():
    for x in (SERIES_MIN, SERIES_MAX):
        s, a = airy_series(x), airy_asymptotic(x)
        assert abs(s - a) <= 1e-8 * abs(a)


def test_oscillatory_asymptotic_at_minus_ten():
    # the two-term form meets the 1e-3 tolerance; the leading term alone is 2.6e-2 off
    val = airy_eval(-10.0)
    assert abs(airy_asymptotic(-10.0, terms=2) - val) <= 1e-3 * abs(val)
    assert abs(airy_asymptotic(-10.0, terms=1) - val) > 1e-3 * abs(val)


def test_airy_decays_monotonically():
    xs = np.linspace(3, 12, 200)
    vals = airy_eval(xs)
    assert np.all(vals > 0) and np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("x", [-5.0, 0.0, 2.0])
def test_airy_ode(x):
    h = 1e-3
    second = (airy_eval(x + h) - 2 * airy_eval(x) + airy_eval(x - h)) / h**2
    assert abs(second - x * airy_eval(x)) <= 10 * h**2


def test_airy_array_input():
    xs = np.array([[-3.0, 0.5], [4.0, 9.0]])
    assert np.allclose(airy_eval(xs), special.airy(xs)[0], rtol=1e-8, atol=0)


# --- tail kernel -------------------------------------------------------------

def test_tail_kernel_values():
    assert tail_kernel(1, 1, 0, 1) == pytest.approx(0.5, rel=1e-15)
    assert tail_kernel(1, -1, 0, 1) == 0
    assert tail_kernel(1, 0, 1, -1) == 0


def test_tail_kernel_rejects_bad_input():
    with pytest.raises(ValueError):
        tail_kernel(0.0, 1, 0, 1)
    with pytest.raises(ValueError):
        tail_kernel(-1.0, 1, 0, 1)
    with pytest.raises(ValueError):
        tail_kernel(1.0, 1, 0, 2)


def test_tail_kernel_cone():
    t, y = 0.5, 1.3
    for lam in (-1, 1):
        x_cone = -lam * y**2 / (4 * t)
        assert tail_kernel(t, x_cone - 1e-6, y, lam) == 0
        assert tail_kernel(t, x_cone, y, lam) == 0
        assert tail_kernel(t, x_cone + 1e-6, y, lam) > 1e6


def test_tail_kernel_array():
    xs = np.linspace(-2, 2, 9)
    out = tail_kernel(1.0, xs, 0.0, 1)
    assert np.all(out[xs <= 0] == 0) and np.all(out[xs > 0] > 0)
