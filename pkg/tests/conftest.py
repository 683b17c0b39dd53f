import numpy as np
import pytest

from kpwaves.grid import make_grid

# acceptance outcome lines, printed in the terminal summary
_RESULTS = []


def record_criterion(number, name, passed, detail):
    line = f"CRITERION {number:>2} {'PASS' if passed else 'FAIL'}  {name}: {detail}"
    _RESULTS.append(line)
    print(line)
    return passed


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_RESULTS, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_grid():
    return make_grid(32, 16, 1.0, 1.0)


def random_constrained(grid, rng, modes=None):
    """Smooth random real field with zero x-mean in every row."""
    c = np.zeros(grid.shape, dtype=complex)
    mx = modes or grid.Nx // 4
    my = modes or grid.Ny // 4
    for j in range(-my, my + 1):
        for k in range(1, mx + 1):
            c[j % grid.Ny, k] = rng.normal() + 1j * rng.normal()
    values = np.fft.ifft2(c).real * grid.size / (mx * my)
    return values

