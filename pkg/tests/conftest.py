import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from transradon.fields import ScalarField, UniformGrid, phi_space_phantom

settings.register_profile("suite", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


def unit_gaussian(grid, center=None):
    x = grid.points()
    if center is not None:
        x = x - np.asarray(center)
    return ScalarField(grid, np.exp(-np.sum(x * x, axis=1)).reshape(grid.shape))


def phi_phantom(m, n, extent=8.0, band=(0.1, 0.3), seed=0):
    g = UniformGrid.symmetric(m, n, extent)
    dual = g.dual()
    nyq = dual.spacing[0] * (n // 2)
    f = phi_space_phantom(g, (band[0] * nyq, band[1] * nyq), 2 * dual.spacing[-1], seed=seed)
    return g, f, nyq


def rel_l2(u, v):
    return float(np.linalg.norm(np.asarray(u) - np.asarray(v)) / np.linalg.norm(np.asarray(v)))


@pytest.fixture(scope="session")
def grid2():
    return UniformGrid.symmetric(2, 256, 8.0)


@pytest.fixture(scope="session")
def gauss2(grid2):
    return unit_gaussian(grid2)


@pytest.fixture(scope="session")
def phi2():
    return phi_phantom(2, 256)


@pytest.fixture(scope="session")
def phi3():
    """m = 3 Phi phantom and its sinogram (|a| <= 3, 49 slopes per axis)."""
    from transradon.xform import radon_transversal, sinogram_grid

    g, f, nyq = phi_phantom(3, 64, band=(0.3, 0.75), seed=1)
    phi = radon_transversal(f, sinogram_grid(3, g.axis_grid(2), 3.0, 49), upsample=4)
    return g, f, phi, nyq


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
