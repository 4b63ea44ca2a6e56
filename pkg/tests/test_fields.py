import numpy as np
import pytest
from hypothesis import given, strategies as st

from transradon import fileio
from transradon.fields import (ScalarField, UniformGrid, fourier_forward, fourier_inverse,
                               gaussian_phantom, get_threads, integrate, phi_space_phantom,
                               phi_space_spectrum, sample_spectrum, set_threads)
from transradon.slice import phi_membership

from conftest import phi_phantom, unit_gaussian


def test_grid_validation():
    with pytest.raises(ValueError):
        UniformGrid(2, (1, 4), (0, 0), (1, 1))
    with pytest.raises(ValueError):
        UniformGrid(2, (4, 4), (0, 0), (1, 0))
    with pytest.raises(ValueError):
        UniformGrid(2, (4, 4, 4), (0, 0), (1, 1))
    g = UniformGrid(2, (5, 9), (0, -1), (0.5, 0.25))
    assert g.extent == (2.0, 2.0)
    assert g.upper == (2.0, 1.0)


def test_dual_spacing():
    g = UniformGrid(2, (64, 50), (-3, 0), (0.1, 0.2))
    d = g.dual()
    assert np.allclose(d.spacing, [2 * np.pi / (64 * 0.1), 2 * np.pi / (50 * 0.2)], rtol=1e-15)


def test_gaussian_spectrum(gauss2):
    F = fourier_forward(gauss2)
    y = F.grid.points()
    exact = np.pi * np.exp(-np.sum(y * y, axis=1) / 4)
    assert np.max(np.abs(F.values.ravel() - exact)) / np.pi <= 1e-10


def test_gaussian_spectrum_inverse(grid2, gauss2):
    F = fourier_forward(gauss2)
    y = F.grid.points()
    exact = F.with_values(np.pi * np.exp(-np.sum(y * y, axis=1) / 4))
    f = fourier_inverse(exact)
    assert np.max(np.abs(f.values - gauss2.values)) <= 1e-10


def test_zero_transforms(grid2):
    z = ScalarField(grid2, np.zeros(grid2.shape))
    assert np.all(fourier_forward(z).values == 0)
    assert integrate(z) == 0


@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([(16, 12), (9, 20), (32, 7)]))
def test_round_trip(seed, shape):
    rng = np.random.default_rng(seed)
    g = UniformGrid(2, shape, rng.uniform(-2, 2, 2), rng.uniform(0.1, 1, 2))
    f = ScalarField(g, rng.normal(size=shape) + 1j * rng.normal(size=shape))
    for axes in (None, (0,), (1,)):
        back = fourier_inverse(fourier_forward(f, axes))
        assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


@given(st.integers(0, 2 ** 31 - 1))
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    g = UniformGrid(2, (16, 16), (-1, -1), (0.2, 0.2))
    f, h = (ScalarField(g, rng.normal(size=g.shape)) for _ in range(2))
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    lhs = fourier_forward(f.with_values(a * f.values + b * h.values)).values
    rhs = a * fourier_forward(f).values + b * fourier_forward(h).values
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


@given(st.integers(0, 2 ** 31 - 1))
def test_plancherel(seed):
    g, f, _ = phi_phantom(2, 64, seed=seed)
    F = fourier_forward(f)
    left = np.sum(np.abs(f.values) ** 2) * g.cell_volume
    right = (2 * np.pi) ** -2 * np.sum(np.abs(F.values) ** 2) * F.grid.cell_volume
    assert abs(left - right) <= 1e-10 * left


def test_partial_axes_match_full():
    g = UniformGrid(2, (32, 24), (-3, -2), (0.2, 0.25))
    f = unit_gaussian(g)
    F1 = fourier_forward(f, (0,))
    F12 = fourier_forward(ScalarField(g, F1.values), (1,))
    assert np.allclose(F12.values, fourier_forward(f).values, atol=1e-13)


def test_axis_errors():
    g = UniformGrid(2, (8, 8), (0, 0), (1, 1))
    f = ScalarField(g, np.ones(g.shape))
    with pytest.raises(ValueError):
        fourier_forward(f, (2,))
    with pytest.raises(ValueError):
        fourier_forward(f.with_values(np.full(g.shape, np.nan)))


def test_gaussian_phantom_values(grid2):
    f = gaussian_phantom(UniformGrid.symmetric(2, 65, 8.0))
    assert f.values[32, 32] == 1.0
    assert abs(integrate(gaussian_phantom(grid2)) - np.pi) <= 1e-8
    g = UniformGrid(2, (33, 33), (-4, -4), (0.25, 0.25))
    a = gaussian_phantom(g, center=(1.0, 0.0)).values
    b = gaussian_phantom(g).values
    assert np.allclose(a[4:, :], b[:-4, :], atol=0, rtol=1e-14)
    with pytest.raises(ValueError):
        gaussian_phantom(g, width=0)


def test_integrate_exact_for_bilinear():
    g = UniformGrid(2, (11, 7), (0, 0), (0.1, 1 / 6))
    assert abs(integrate(ScalarField(g, np.ones(g.shape))) - 1) <= 1e-12
    x, y = g.mesh()
    f = ScalarField(g, np.broadcast_to(1 + 2 * x + 3 * y + 4 * x * y, g.shape))
    assert abs(integrate(f) - (1 + 1 + 1.5 + 1)) <= 1e-12
    assert abs(integrate(ScalarField(g, np.ones(g.shape)), lambda x, y: x * y) - 0.25) <= 1e-12
    with pytest.raises(ValueError):
        integrate(f, lambda x, y: np.inf + x)


@given(st.integers(0, 2 ** 31 - 1))
def test_phi_phantom_moments(seed):
    # [-3, 3]: on wider boxes |x_m|^8 lifts the rounding noise of the tails towards 1e-10
    g, f, nyq = phi_phantom(2, 128, extent=3.0, band=(0.3, 0.75), seed=seed)
    assert f.is_real()
    member, moments = phi_membership(f, 8, 1e-8)
    assert member
    xm = g.axis(1)
    w = g.trapezoid_weights(1)
    for k in range(9):
        assert np.max(np.abs(f.values.real @ (w * xm ** k))) <= 1e-10 * np.max(np.abs(f.values))


def test_phi_phantom_slab_is_zero():
    g = UniformGrid.symmetric(2, 128, 8.0)
    dual = g.dual()
    nyq = dual.spacing[0] * 64
    gap = 2.5 * dual.spacing[-1]
    W = phi_space_spectrum(g, (0.1 * nyq, 0.3 * nyq), gap, seed=3)
    slab = np.abs(W.grid.axis(1)) <= gap
    assert slab.sum() == 5
    assert np.all(W.values[:, slab] == 0)


def test_phi_phantom_errors():
    g = UniformGrid.symmetric(2, 32, 4.0)
    nyq = g.dual().spacing[0] * 16
    with pytest.raises(ValueError):
        phi_space_phantom(g, (0.1, 2 * nyq), 0.05)
    with pytest.raises(ValueError):
        phi_space_phantom(g, (0.5, 0.2), 0.05)


def test_sample_spectrum(gauss2):
    F = fourier_forward(gauss2)
    nodes = F.grid.points()[[1000, 33000, 40000]]
    v, out = sample_spectrum(F, nodes)
    assert np.allclose(v, F.values.ravel()[[1000, 33000, 40000]], rtol=0, atol=1e-15)
    assert not out.any()
    mid = nodes + 0.5 * np.array(F.grid.spacing)
    v, _ = sample_spectrum(F, mid)
    exact = np.pi * np.exp(-np.sum(mid * mid, axis=1) / 4)
    assert np.max(np.abs(v - exact)) <= 1e-6
    v, out = sample_spectrum(F, [[1e3, 0.0]])
    assert v[0] == 0 and out[0]
    with pytest.raises(ValueError):
        sample_spectrum(F, [[np.nan, 0.0]])


def test_threads_env(monkeypatch):
    set_threads(3)
    assert get_threads() == 3
    monkeypatch.setenv("TRANSRADON_THREADS", "2")
    assert get_threads(5) == 2
    set_threads(1)


def test_file_round_trip(tmp_path):
    g = UniformGrid(2, (6, 5), (-1, 0), (0.5, 0.25))
    rng = np.random.default_rng(0)
    f = ScalarField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    h = fileio.save(tmp_path / "f.bin", f)
    back = fileio.load(h)
    assert back.grid == g and np.array_equal(back.values, f.values)
    head = __import__("json").loads(h.read_text())
    assert head["dtype"] == "c128" and head["kind"] == "field"
    r = fileio.load(fileio.save(tmp_path / "r", f.with_values(f.values.real)))
    assert np.array_equal(r.values, f.values.real)
    F = fourier_forward(f)
    Fb = fileio.load(fileio.save(tmp_path / "F", F))
    assert np.array_equal(Fb.values, F.values) and Fb.source == g
