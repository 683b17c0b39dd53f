import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from kpwaves.analysis import mass
from kpwaves.grid import make_grid, reflect_x
from kpwaves.initial import (
    InitFamily,
    InitSpec,
    PacketData,
    line_soliton,
    lump_soliton,
    make_initial,
    modulated_packet,
    perturbed_line_soliton,
    radial_dx_sech2,
)


def test_line_soliton_peak_and_motion():
    g = make_grid(1024, 4, 10, 10)
    u = line_soliton(g, 0.0, 0.0).values
    assert u.max() == pytest.approx(12.0, abs=1e-12)
    assert g.x[np.argmax(u[0])] == pytest.approx(0.0, abs=g.hx / 2)
    u1 = line_soliton(g, 0.0, 1.0).values
    assert g.x[np.argmax(u1[0])] == pytest.approx(4.0, abs=g.hx / 2)


def test_line_soliton_mass():
    # 144 * int sech^4 = 192 per unit y-length, by quadrature
    per_length = integrate.quad(lambda x: 144 / math.cosh(x) ** 4, -60, 60, epsabs=1e-13)[0]
    assert per_length == pytest.approx(192.0, rel=1e-12)
    g = make_grid(1024, 8, 10, 10)
    assert mass(line_soliton(g)) == pytest.approx(192.0 * 2 * math.pi * 10, rel=1e-6)


def test_lump():
    g = make_grid(64, 64, 20, 20)
    u = lump_soliton(g, 1.0, 0.0)
    j0 = np.argmin(np.abs(g.y))
    i0 = np.argmin(np.abs(g.x))
    assert u.values[j0, i0] == pytest.approx(24.0)

    def lump_at(y, t=0.0, c=1.0):
        xs = -3 * c * t
        a, b = c * xs**2, 3 * c**2 * y**2
        return 24 * c * (1 - a + b) / (1 + a + b) ** 2

    assert lump_at(20.0) / lump_at(40.0) == pytest.approx(4.0, rel=2e-3)
    # peak at x = 3 c t on a grid that contains it
    g2 = make_grid(256, 64, 10, 10)
    c, t = 1.0, g2.hx * 40 / 3
    v = lump_soliton(g2, c, t).values
    j, i = np.unravel_index(np.argmax(v), v.shape)
    assert g2.x[i] == pytest.approx(3 * c * t, abs=g2.hx / 2)
    with pytest.raises(ValueError):
        lump_soliton(g2, 0.0)


def test_perturbed_line_soliton():
    g = make_grid(512, 64, 10, 10)
    assert np.array_equal(perturbed_line_soliton(g, 1.0, 0.0).values, line_soliton(g, 1.0).values)
    u = perturbed_line_soliton(g, 0.0, 0.4).values
    crest = g.x[np.argmax(u, axis=1)]
    assert crest.max() == pytest.approx(0.4, abs=g.hx)
    assert crest.min() == pytest.approx(-0.4, abs=g.hx)
    # y-period 2 pi / 0.2 = 10 pi: the box of y-length 20 pi holds two periods
    shift = g.Ny // 2
    assert np.max(np.abs(np.roll(u, shift, axis=0) - u)) <= 1e-12


def test_radial_max_and_parity():
    ref = -optimize.minimize_scalar(
        lambda r: -12 / math.cosh(r) ** 2 * math.tanh(r), bounds=(0, 3), method="bounded",
        options={"xatol": 1e-12},
    ).fun
    assert ref == pytest.approx(12 * 2 / (3 * math.sqrt(3)), rel=1e-10)
    g = make_grid(2048, 64, 8, 8)
    u = radial_dx_sech2(g, 6.0, 1.0).values
    assert u.max() == pytest.approx(ref, rel=1e-4)
    i0 = np.argmin(np.abs(g.x))
    assert np.all(u[:, i0] == 0)
    assert np.max(np.abs(reflect_x(u)[:, 1:] + u[:, 1:])) <= 1e-14
    flipped = np.roll(u[::-1], 1, axis=0)
    assert np.max(np.abs(flipped - u)) <= 1e-14


def test_radial_nu_zero_is_y_independent():
    g = make_grid(256, 16, 6, 6)
    u = radial_dx_sech2(g, 1.0, 0.0).values
    assert np.max(np.abs(u - u[0])) == 0
    with pytest.raises(ValueError):
        radial_dx_sech2(g, 1.0, -1.0)


def test_radial_edge_warning():
    with pytest.warns(RuntimeWarning, match="boundary"):
        radial_dx_sech2(make_grid(64, 64, 2, 2), 6.0, 1.0)


def test_radial_is_constrained():
    g = make_grid(512, 128, 10, 10)
    u = radial_dx_sech2(g, 6.0, 1.0).values
    assert np.max(np.abs(u.sum(axis=1))) <= 1e-12


def test_modulated_packet():
    eps = 0.1
    g = make_grid(1024, 128, 10, 10)
    data = modulated_packet(g, eps, projected_only=False)
    assert isinstance(data, PacketData)
    u = data.field.values
    i0 = np.argmin(np.abs(g.x))
    assert np.max(np.abs(u[:, i0])) <= 1e-15
    assert np.max(np.abs(u.sum(axis=1))) <= 1e-12
    # max|psi_I| = 4 / (3 sqrt 3), attained where sech^2 = 2/3
    assert np.max(np.abs(u)) <= 2 * eps * 4 / (3 * math.sqrt(3)) + 1e-12
    assert data.kx0_residual <= 1e-13
    assert np.max(np.abs(data.field.values - data.unprojected.values)) <= 1e-13


def test_modulated_packet_rejects_unresolved_carrier():
    with pytest.raises(ValueError, match="carrier"):
        modulated_packet(make_grid(256, 16, 10, 10), 0.1)


@pytest.mark.filterwarnings("ignore:radial_dx_sech2")
@settings(max_examples=10, deadline=None)
@given(nu=st.floats(0.0, 3.0), amp=st.floats(0.1, 10.0))
def test_radial_refinement_consistent(nu, amp):
    coarse = make_grid(128, 32, 8, 8)
    fine = make_grid(256, 32, 8, 8)
    a = radial_dx_sech2(coarse, amp, nu).values
    b = radial_dx_sech2(fine, amp, nu).values[:, ::2]
    assert np.max(np.abs(a - b)) <= 1e-10


def test_make_initial_dispatch():
    g = make_grid(1024, 16, 10, 10)
    spec = InitSpec(InitFamily.LINE_SOLITON, x0=1.0, t0=0.5)
    assert np.array_equal(make_initial(spec, g).values, line_soliton(g, 1.0, 0.5).values)
    spec = InitSpec("MODULATED_PACKET", epsilon=0.1)
    assert np.array_equal(make_initial(spec, g).values, modulated_packet(g, 0.1).values)
    with pytest.raises(ValueError):
        InitSpec(InitFamily.LUMP, nu=-1.0)
