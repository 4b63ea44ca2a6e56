import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import erf, i0e

from transradon.fields import ScalarField, UniformGrid
from transradon.invert import riesz_data
from transradon.xform import (Sinogram, backprojection, classical_from_transversal,
                              dual_heisenberg, dual_heisenberg_direct, dual_sphere,
                              dual_transversal, empty_sphere_sinogram, heisenberg_sinogram,
                              heisenberg_view, plane_integrals, radon_classical,
                              radon_heisenberg, radon_heisenberg_on, radon_transversal,
                              sinogram_grid, sphere_area, sphere_quadrature, transfer_from_sphere,
                              transfer_to_sphere, transversal_from_classical)

from transradon.frac import riesz_partial

from conftest import phi_phantom, rel_l2, unit_gaussian


def gaussian_sinogram(geo):
    """pi^{(m-1)/2} (1+|a|^2)^{-1/2} exp(-b^2/(1+|a|^2)) on an (a, b) grid."""
    m = geo.dim
    s = Sinogram(geo, np.zeros(geo.shape))
    a2 = np.sum(s.a_grid.points() ** 2, axis=1)[:, None]
    b = s.b_axis.axis(0)[None, :]
    v = np.pi ** ((m - 1) / 2) / np.sqrt(1 + a2) * np.exp(-b * b / (1 + a2))
    return Sinogram(geo, v.reshape(geo.shape))


@pytest.fixture(scope="module")
def g3():
    return UniformGrid.symmetric(3, 64, 6.0)


@pytest.fixture(scope="module")
def f3(g3):
    return unit_gaussian(g3)


def test_gaussian_oracle_m2(grid2, gauss2):
    geo = sinogram_grid(2, grid2.axis_grid(1), 8.0, 65)
    phi = radon_transversal(gauss2, geo)
    ref = gaussian_sinogram(geo)
    assert np.max(np.abs(phi.values - ref.values)) / np.max(ref.values) <= 1e-4


def test_gaussian_oracle_m3(g3, f3):
    geo = sinogram_grid(3, g3.axis_grid(2), 2.0, 9)
    phi = radon_transversal(f3, geo, upsample=2)
    ref = gaussian_sinogram(geo)
    assert np.max(np.abs(phi.values - ref.values)) / np.max(ref.values) <= 1e-4


def test_zero_slope_is_row_quadrature(grid2, gauss2):
    f = unit_gaussian(grid2, center=[0.4, -0.3])
    geo = sinogram_grid(2, grid2.axis_grid(1), 1.0, 3)
    phi = radon_transversal(f, geo)
    direct = grid2.trapezoid_weights(0) @ f.values
    assert np.max(np.abs(phi.values[1] - direct)) <= 1e-12


def test_shift_covariance(grid2):
    h = grid2.spacing[0]
    f = unit_gaussian(grid2, center=[0.5, -0.25])
    # f_x(y) = f(x + y) with x = (2h, 3h)
    fx = unit_gaussian(grid2, center=[0.5 - 2 * h, -0.25 - 3 * h])
    A = np.array([[-1.0], [0.0], [1.0]])
    b = grid2.axis(1)[20:-20]
    lhs = plane_integrals(fx, A, b)
    for i, a in enumerate(A[:, 0]):
        rhs = plane_integrals(f, A[i:i + 1], b - a * 2 * h + 3 * h)
        assert np.max(np.abs(lhs[i] - rhs[0])) <= 1e-10


@given(st.integers(0, 2 ** 31 - 1))
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    g = UniformGrid.symmetric(2, 32, 4.0)
    geo = sinogram_grid(2, g.axis_grid(1), 2.0, 9)
    u, v = (ScalarField(g, rng.normal(size=g.shape)) for _ in range(2))
    a, b = rng.normal(size=2)
    with pytest.warns(UserWarning):
        lhs = radon_transversal(u.with_values(a * u.values + b * v.values), geo).values
        rhs = a * radon_transversal(u, geo).values + b * radon_transversal(v, geo).values
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


def test_dimension_errors(grid2, gauss2, g3):
    with pytest.raises(ValueError):
        radon_transversal(gauss2, sinogram_grid(3, g3.axis_grid(2), 1.0, 3))
    with pytest.raises(ValueError):
        plane_integrals(gauss2, [[1.0, 2.0]], [0.0])
    with pytest.raises(ValueError):
        radon_heisenberg(gauss2, sinogram_grid(2, grid2.axis_grid(1)))


def test_heisenberg_gaussian(g3, f3):
    geo = sinogram_grid(3, g3.axis_grid(2), 2.0, 9)
    view = heisenberg_view(radon_heisenberg(f3, geo, upsample=2))
    p = view.grid.points()
    z2 = p[:, 0] ** 2 + p[:, 1] ** 2
    ref = np.pi / np.sqrt(1 + z2 / 4) * np.exp(-p[:, 2] ** 2 / (1 + z2 / 4))
    assert np.max(np.abs(view.values.ravel() - ref)) / np.pi <= 1e-4
    # z = 0: the integral of f(zeta, t) over zeta
    iu = np.argmin(np.abs(view.grid.axis(0)))
    iv = np.argmin(np.abs(view.grid.axis(1)))
    w = np.outer(g3.trapezoid_weights(0), g3.trapezoid_weights(1))
    direct = np.einsum("ij,ijk->k", w, f3.values)
    assert np.max(np.abs(view.values[iu, iv] - direct)) <= 1e-12


def test_heisenberg_view_matches_direct(g3, f3):
    geo = sinogram_grid(3, g3.axis_grid(2), 2.0, 9)
    view = heisenberg_view(radon_heisenberg(f3, geo))
    direct = radon_heisenberg_on(f3, view.grid)
    assert np.max(np.abs(view.values - direct.values)) <= 1e-12
    back = heisenberg_sinogram(view)
    assert back.grid == geo
    assert np.array_equal(back.values, radon_heisenberg(f3, geo).values)


def test_heisenberg_spectral_agrees_with_cubic(g3, f3):
    geo = sinogram_grid(3, g3.axis_grid(2), 2.0, 9)
    grid = heisenberg_view(radon_heisenberg(f3, geo)).grid
    cubic = radon_heisenberg_on(f3, grid, periodic=True)
    spectral = radon_heisenberg_on(f3, grid, method="spectral")
    assert np.max(np.abs(cubic.values - spectral.values)) / np.pi <= 1e-3


def test_sphere_quadrature():
    for m, n in [(2, 64), (3, 32)]:
        nodes, w, _ = sphere_quadrature(m, n)
        assert np.max(np.abs(np.linalg.norm(nodes, axis=1) - 1)) <= 1e-14
        assert abs(w.sum() - sphere_area(m)) <= 1e-10 * sphere_area(m)
    assert abs(sphere_area(3) - 4 * np.pi) <= 1e-14
    with pytest.raises(ValueError):
        sphere_quadrature(4, 8)


def test_transfer_round_trip():
    geo = UniformGrid(2, (513, 513), (-4.0, -8.0), (1 / 64, 1 / 32))
    phi = gaussian_sinogram(geo)
    sph = empty_sphere_sinogram(2, UniformGrid(1, (2049,), (-8.0,), (1 / 128,)), 8192)
    T = transfer_to_sphere(phi, sph, strict=False)
    back = transfer_from_sphere(T, geo)
    inner = (slice(128, 385), slice(128, 385))
    assert np.max(np.abs(back.values[inner] - phi.values[inner])) <= 1e-6
    with pytest.raises(ValueError):
        transfer_to_sphere(phi, sph)


def test_classical_relations(grid2, gauss2):
    geo = sinogram_grid(2, grid2.axis_grid(1), 8.0, 257)
    phi = radon_transversal(gauss2, geo, upsample=2)
    sph = empty_sphere_sinogram(2, UniformGrid(1, (129,), (-4.0,), (1 / 16,)), 128)
    R = classical_from_transversal(phi, sph, strict=False)
    # nodes whose slopes and offsets t / theta_m both stay inside the sinogram
    keep = np.abs(sph.nodes[:, -1]) >= 0.5
    t = sph.t_axis.axis(0)
    err = np.abs(R.values[keep] - np.sqrt(np.pi) * np.exp(-t * t))
    assert np.max(err) <= 1e-4
    Rf = radon_classical(gauss2, empty_sphere_sinogram(2, UniformGrid(1, (1025,), (-8.0,),
                                                                    (1 / 64,)), 1024), upsample=4)
    assert np.max(np.abs(Rf.values - np.sqrt(np.pi) * np.exp(-Rf.t_axis.axis(0) ** 2))) <= 1e-4
    small = UniformGrid(2, (65, 129), (-2.0, -4.0), (1 / 16, 1 / 16))
    back = transversal_from_classical(Rf, small)
    assert np.max(np.abs(back.values - gaussian_sinogram(small).values)) <= 1e-6


def test_classical_evenness(grid2):
    f = unit_gaussian(grid2, center=[0.7, -0.4])
    n = 64
    sph = empty_sphere_sinogram(2, UniformGrid(1, (101,), (-5.0,), (0.1,)), n)
    Rf = radon_classical(f, sph)
    anti = Rf.values[np.r_[n // 2:n, 0:n // 2]][:, ::-1]
    assert np.max(np.abs(Rf.values - anti)) <= 1e-10
    sph3 = empty_sphere_sinogram(3, UniformGrid(1, (41,), (-4.0,), (0.2,)), 16)
    f3 = unit_gaussian(UniformGrid.symmetric(3, 48, 6.0), center=[0.3, 0.1, -0.2])
    R3 = radon_classical(f3, sph3)
    # nodes ordered (polar, azimuth); antipode flips the polar cosine and shifts azimuth by pi
    v = R3.values.reshape(8, 16, -1)
    anti3 = v[::-1][:, np.r_[8:16, 0:8]][:, :, ::-1]
    assert np.max(np.abs(v - anti3)) <= 1e-10


def test_dual_duality_and_zero(grid2):
    g = UniformGrid.symmetric(2, 128, 8.0)
    f = unit_gaussian(g, center=[0.3, -0.2])
    geo = sinogram_grid(2, g.axis_grid(1), 6.0, 193)
    s = Sinogram(geo, np.zeros(geo.shape))
    a = s.a_grid.axis(0)[:, None]
    b = s.b_axis.axis(0)[None, :]
    phi = Sinogram(geo, np.exp(-a * a / 2 - (b - 0.5) ** 2))
    wa = s.a_grid.trapezoid_weights(0) / (1 + s.a_grid.axis(0) ** 2)
    wb = s.b_axis.trapezoid_weights(0)
    left = np.sum(radon_transversal(f, geo).values * phi.values * np.outer(wa, wb))
    wx = np.outer(g.trapezoid_weights(0), g.trapezoid_weights(1))
    right = np.sum(f.values * dual_transversal(phi, g).values * wx)
    assert abs(left - right) <= 1e-6 * abs(right)
    assert np.all(dual_transversal(s, g).values == 0)
    assert np.all(backprojection(s, g).values == 0)


def test_backprojection_is_reflected_transform():
    geo = UniformGrid(2, (65, 128), (-4.0, -8.0), (1 / 8, 16 / 127))
    s = Sinogram(geo, np.zeros(geo.shape))
    a = s.a_grid.axis(0)[:, None]
    b = s.b_axis.axis(0)[None, :]
    g = Sinogram(geo, np.exp(-a * a - (b - 0.3) ** 2))
    out = UniformGrid.symmetric(2, 128, 8.0)
    bp = backprojection(g, out)
    x = out.axis(0)
    ref = plane_integrals(ScalarField(geo, g.values), -x[:, None], out.axis(1))
    assert np.max(np.abs(bp.values - ref)) <= 1e-12


def test_dual_sphere_catalan():
    t_axis = UniformGrid(1, (801,), (-10.0,), (1 / 40,))
    pts = np.array([[0.0, 0.0], [0.7, -0.3], [1.5, 2.0]])
    r = np.linalg.norm(pts, axis=1)
    for m, n in [(2, 256), (3, 48)]:
        sph = empty_sphere_sinogram(m, t_axis, n)
        psi = sph.with_values(np.tile(np.exp(-t_axis.axis(0) ** 2), (len(sph.nodes), 1)))
        x = np.zeros((3, m))
        x[:, :2] = pts
        vals = np.array([dual_sphere(psi, UniformGrid(m, (2,) * m, p, (1.0,) * m)).values.flat[0]
                         for p in x])
        if m == 2:
            exact = 2 * np.pi * i0e(r * r / 2)
        else:
            exact = np.where(r > 0, 2 * np.pi * np.sqrt(np.pi) * erf(r) / np.maximum(r, 1e-300),
                             4 * np.pi)
        assert np.max(np.abs(vals - exact) / np.abs(exact)) <= 1e-6


def test_dual_sphere_against_transversal_dual():
    t_axis = UniformGrid(1, (641,), (-8.0,), (1 / 40,))
    sph = empty_sphere_sinogram(2, t_axis, 2048)
    th = sph.nodes
    t = t_axis.axis(0)
    # even data vanishing to high order at theta_m = 0 keep the slope truncation negligible
    psi = sph.with_values(th[:, 1:2] ** 8 * np.exp(-(t[None, :] - 0.2 * th[:, :1]) ** 2))
    out = UniformGrid(2, (5, 5), (-1.0, -1.0), (0.5, 0.5))
    geo = UniformGrid(2, (2049, 641), (-8.0, -8.0), (1 / 128, 1 / 40))
    lhs = dual_sphere(psi, out).values
    rhs = 2 * dual_transversal(transfer_from_sphere(psi, geo), out).values
    assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)) <= 1e-5


def test_dual_transversal_against_sphere():
    geo = UniformGrid(2, (257, 321), (-8.0, -8.0), (1 / 16, 1 / 20))
    s = Sinogram(geo, np.zeros(geo.shape))
    a = s.a_grid.axis(0)[:, None]
    b = s.b_axis.axis(0)[None, :]
    phi = Sinogram(geo, np.exp(-a * a - (b - 0.3 * a) ** 2))
    out = UniformGrid(2, (5, 5), (-1.0, -1.0), (0.5, 0.5))
    sph = empty_sphere_sinogram(2, UniformGrid(1, (641,), (-8.0,), (1 / 40,)), 2048)
    lhs = dual_transversal(phi, out).values
    rhs = 0.5 * dual_sphere(transfer_to_sphere(phi, sph, strict=False), out).values
    assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)) <= 1e-5


def test_heisenberg_dual_layouts(g3):
    geo = sinogram_grid(3, g3.axis_grid(2), 2.0, 17)
    s = Sinogram(geo, np.zeros(geo.shape))
    p = geo.points()
    phi = Sinogram(geo, np.exp(-np.sum(p[:, :2] ** 2, axis=1) - (p[:, 2] - 0.3) ** 2)
                   .reshape(geo.shape))
    out = UniformGrid.symmetric(3, 16, 3.0)
    a = dual_heisenberg(phi, out).values
    b = dual_heisenberg_direct(heisenberg_view(phi), out).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))
    assert np.all(dual_heisenberg(s, out).values == 0)


def test_weighted_dual_of_gaussian_at_origin(grid2, gauss2):
    # (2 pi)^{1-m} *R_T(sqrt(1+|a|^2) R_T f) = I^{m-1} f; for m = 2, I^1 f(0) = sqrt(pi)/2
    sph = empty_sphere_sinogram(2, UniformGrid(1, (321,), (-10.0,), (1 / 16,)), 256)
    Rf = radon_classical(gauss2, sph, upsample=2)
    val = riesz_data(Rf, UniformGrid(2, (2, 2), (0.0, 0.0), (1.0, 1.0))).values.flat[0]
    assert abs(val - np.sqrt(np.pi) / 2) <= 1e-3 * np.sqrt(np.pi) / 2


def _duality_mismatch(n):
    g = UniformGrid.symmetric(2, n, 8.0)
    h = g.spacing[0]
    f = unit_gaussian(g, center=[0.3, -0.2])
    # b nodes offset from the x_m nodes so the pairing is not an exact transpose
    nb = int(12 / (1.5 * h))
    geo = sinogram_grid(2, UniformGrid(1, (2 * nb + 1,), (-nb * 1.5 * h + 0.37 * h,), (1.5 * h,)),
                        6.0, 193)
    s = Sinogram(geo, np.zeros(geo.shape))
    a = s.a_grid.axis(0)[:, None]
    b = s.b_axis.axis(0)[None, :]
    phi = Sinogram(geo, np.exp(-a * a / 2 - (b - 0.5) ** 2))
    wa = s.a_grid.trapezoid_weights(0) / (1 + s.a_grid.axis(0) ** 2)
    left = np.sum(radon_transversal(f, geo).values * phi.values
                  * np.outer(wa, s.b_axis.trapezoid_weights(0)))
    wx = np.outer(g.trapezoid_weights(0), g.trapezoid_weights(1))
    right = np.sum(f.values * dual_transversal(phi, g).values * wx)
    return abs(left - right) / abs(right)


def test_duality_mismatch_shrinks_under_refinement():
    e = [_duality_mismatch(n) for n in (64, 128, 256)]
    assert e[1] <= e[0] / 4 and e[2] <= e[1] / 4
    assert e[2] <= 1e-6


def test_heisenberg_duality():
    g = UniformGrid.symmetric(3, 32, 6.0)
    f = unit_gaussian(g, center=[0.2, -0.1, 0.3])
    p = g.points()
    phi = ScalarField(g, np.exp(-np.sum(p[:, :2] ** 2, axis=1) / 4 - (p[:, 2] - 0.4) ** 2)
                      .reshape(g.shape))
    Rf = radon_heisenberg_on(f, g)
    z = g.sub(range(2)).points()
    wz = 2.0 / (4 + np.sum(z * z, axis=1)) ** 1.5
    w = np.einsum("i,j,k->ijk", *(g.trapezoid_weights(k) for k in range(3)))
    left = np.sum(Rf.values * phi.values * w * wz.reshape(32, 32, 1))
    right = np.sum(f.values * dual_heisenberg_direct(phi, g).values * w)
    assert abs(left - right) <= 1e-6 * abs(right)


def test_backprojection_of_transform_is_partial_riesz():
    g, f, _ = phi_phantom(2, 256, seed=3)
    phi = radon_transversal(f, sinogram_grid(2, g.axis_grid(1), 8.0, 257), upsample=2)
    bp = backprojection(phi, g, method="spectral")
    assert rel_l2(bp.values, 2 * np.pi * riesz_partial(f, 1).values) <= 1e-3
