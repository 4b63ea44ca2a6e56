"""Forward and dual transversal Radon transforms, their Heisenberg
counterparts, and the transfer to the classical (theta, t) parameterisation.

A hyperplane x_m = a.x' + b is indexed by (a, b) in R^{m-1} x R. All line
and plane integrals reduce to one compiled kernel: a weighted sum over the
nodes of one set of axes, with cubic interpolation along the remaining axis.
"""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import resample
from scipy.special import gamma, roots_legendre

from . import _kernels
from .fields import ScalarField, UniformGrid, get_threads, sample_grid

DEFAULT_A_EXTENT = {2: 8.0, 3: 4.0}
THETA_MIN = 0.05


def sphere_area(m):
    """Surface area of the unit sphere in R^m."""
    return 2 * np.pi ** (m / 2) / gamma(m / 2)


@dataclass(frozen=True, eq=False)
class Sinogram(ScalarField):
    """Samples over (a, b): the first m-1 grid axes are a, the last is b."""

    @property
    def m(self):
        return self.grid.dim

    @property
    def a_grid(self):
        return self.grid.sub(range(self.m - 1))

    @property
    def b_axis(self):
        return self.grid.axis_grid(self.m - 1)

    @property
    def a_extent(self):
        return [max(abs(o), abs(u)) for o, u in zip(self.a_grid.origin, self.a_grid.upper)]


def sinogram_grid(m, b_axis, a_extent=None, na=None):
    """(a, b) grid with |a_k| <= a_extent on na nodes per a-axis.

    `b_axis` is a 1-d UniformGrid; using the x_m axis of the field keeps the
    b-frequencies on the field's y_m nodes.
    """
    A = DEFAULT_A_EXTENT.get(m, 4.0) if a_extent is None else float(a_extent)
    na = (129 if m == 2 else 33) if na is None else int(na)
    h = 2 * A / (na - 1)
    return UniformGrid(m, (na,) * (m - 1) + b_axis.shape, (-A,) * (m - 1) + b_axis.origin,
                       (h,) * (m - 1) + b_axis.spacing)


def _rows(field, weight=None, upsample=1):
    """Split a field into rows along its last axis, with quadrature weights
    over the remaining axes.

    upsample > 1 refines every row by trigonometric (FFT) interpolation
    before the cubic stencil is applied, which suits rows that decay to zero
    at both ends.
    """
    g = field.grid
    d = g.dim - 1
    sub = g.sub(range(d))
    pc = sub.points()
    w = np.ones(sub.shape)
    for k in range(d):
        shp = [1] * d
        shp[k] = -1
        w = w * sub.trapezoid_weights(k).reshape(shp)
    w = w.ravel()
    if weight is not None:
        w = w * weight(pc)
    rows = field.values.reshape(-1, g.shape[-1])
    dq = g.spacing[-1]
    if upsample > 1:
        rows = resample(rows, upsample * g.shape[-1], axis=1)
        dq = dq / upsample
    return rows, pc, w, g.origin[-1], dq


def refine_sinogram(phi, factor):
    """Trigonometric refinement of the slope axes of a sinogram.

    Valid for sinograms that vanish towards the ends of the a-range, such as
    transforms of band-limited fields whose spectra avoid y_m = 0.
    """
    if factor == 1:
        return phi
    g = phi.grid
    v = phi.values
    shape, spacing = list(g.shape), list(g.spacing)
    for k in range(g.dim - 1):
        v = resample(v, factor * g.shape[k], axis=k)
        shape[k] *= factor
        spacing[k] /= factor
    return Sinogram(UniformGrid(g.dim, shape, g.origin, spacing), v)


def _check_decay(field, what, tol=1e-10):
    v = np.abs(field.values)
    peak = v.max(initial=0.0)
    if peak == 0:
        return
    edge = max(np.max(np.take(v, [0, -1], axis=k)) for k in range(v.ndim))
    if edge > tol * peak:
        warnings.warn(f"{what} is not negligible at the grid boundary "
                      f"(edge/peak = {edge / peak:.1e})", stacklevel=3)


def plane_integrals(f, A, b, order=3, threads=None, upsample=1, periodic=False):
    """(R_T f)(a, b) at arbitrary slopes A (K x (m-1)) and offsets b."""
    vals, pc, w, q0, dq = _rows(f, None, upsample)
    A = np.atleast_2d(np.asarray(A, float))
    if A.shape[1] != f.grid.dim - 1:
        raise ValueError("slope vectors must have m-1 components")
    return _kernels.line_sum(vals, pc, w, q0, dq, A, np.atleast_1d(b), order, get_threads(threads),
                             periodic)


def radon_transversal(f, geometry, order=3, threads=None, upsample=1):
    """(R_T f)(a, b) = integral f(x', a.x' + b) dx' on the (a, b) grid `geometry`."""
    if geometry.dim != f.grid.dim:
        raise ValueError(f"sinogram grid must be {f.grid.dim}-d (m-1 slope axes plus b)")
    _check_decay(f, "field")
    sg = Sinogram(geometry, np.zeros(geometry.size))
    out = plane_integrals(f, sg.a_grid.points(), sg.b_axis.axis(0), order, threads, upsample)
    return Sinogram(geometry, out)


def backprojection(g, out_grid, order=3, threads=None, upsample=1, periodic=False,
                   method="cubic"):
    """(R~_T g)(x) = integral g(a, x_m - x'.a) da, without the angular weight.

    `periodic` treats every b-row as one period of a periodic function; the
    result then commutes exactly with Fourier multipliers along x_m when the
    output x_m axis has the same spacing and length as the b-axis.
    method "spectral" shifts the rows by trigonometric interpolation instead
    (always periodic, same axis requirement); see `backproject_spectral`.
    """
    if method == "spectral":
        return backproject_spectral(g, out_grid)
    if method != "cubic":
        raise ValueError("method must be 'cubic' or 'spectral'")
    return _backproject(g, out_grid, None, order, threads, upsample, periodic)


def dual_transversal(phi, out_grid, order=3, threads=None, upsample=1, periodic=False):
    """(*R_T phi)(x) = integral phi(a, x_m - a.x') da / (1 + |a|^2)^{m/2}."""
    m = phi.grid.dim
    return _backproject(phi, out_grid, lambda a: (1 + np.sum(a * a, axis=1)) ** (-m / 2),
                        order, threads, upsample, periodic)


def spectral_line_sum(field, out_grid, pairing, coef, weight=None):
    """out(x, t) = sum_p w_p row_p(t - sum_c coef_c p_c x_{pairing_c}).

    The rows of `field` run along its last axis and are treated as periods
    of trigonometric polynomials, so every shift is exact. In the row
    frequency f the phase exp(-2 pi i f coef_c p_c x_(pairing_c)) factors over
    the input axes c, and the p-sum becomes a chain of batched matrix
    products, one per input axis. The output t-axis must equal the row axis.
    The unpaired Nyquist node uses the mean of both phase signs, so real rows
    give real results.
    """
    g = field.grid
    d = g.dim - 1
    n = g.shape[-1]
    if out_grid.dim != g.dim:
        raise ValueError("output grid dimension must match the input dimension")
    if out_grid.shape[-1] != n or not np.isclose(out_grid.spacing[-1], g.spacing[-1]) \
            or not np.isclose(out_grid.origin[-1], g.origin[-1]):
        raise ValueError("spectral line sums need the output last axis to equal the row axis")
    if sorted(pairing) != list(range(d)):
        raise ValueError("pairing must be a permutation of the leading axes")
    F = np.fft.fft(field.values, axis=-1)
    freq = np.fft.fftfreq(n, g.spacing[-1])
    if n % 2 == 0:
        # duplicate the Nyquist column with the opposite phase sign
        F = np.concatenate([F, F[..., n // 2:n // 2 + 1]], axis=-1)
        freq = np.concatenate([freq, [-freq[n // 2]]])
    sub = g.sub(range(d))
    if weight is not None:
        F = F * weight(sub.points()).reshape(sub.shape + (1,))
    nk = len(freq)
    # arr axes: (k, inputs c .. d-1, outputs produced so far)
    arr = np.moveaxis(F, -1, 0)
    for c in range(d):
        p = sub.axis(c)
        x = out_grid.axis(pairing[c])
        E = np.exp(-2j * np.pi * coef[c] * freq[:, None, None] * x[None, :, None]
                   * p[None, None, :]) * sub.trapezoid_weights(c)
        shp = arr.shape
        A = arr.reshape(nk, shp[1], -1)
        out = np.matmul(E, A)  # (k, x, rest)
        out = out.reshape((nk, len(x)) + shp[2:])
        arr = np.moveaxis(out, 1, -1)
    # arr axes: (k, outputs in the order pairing[0], ..., pairing[d-1])
    arr = np.transpose(arr, [0] + [1 + list(pairing).index(o) for o in range(d)])
    H = np.moveaxis(arr, 0, -1)
    if n % 2 == 0:
        H = np.concatenate([H[..., :n // 2], 0.5 * (H[..., n // 2:n // 2 + 1] + H[..., n:]),
                            H[..., n // 2 + 1:n]], axis=-1)
    return ScalarField(out_grid, np.fft.ifft(H, axis=-1))


def backproject_spectral(g, out_grid, weight=None):
    """Backprojection with exact trigonometric shifts along b; the output
    x_m axis must equal the b-axis."""
    if not isinstance(g, Sinogram):
        g = Sinogram(g.grid, g.values)
    return spectral_line_sum(g, out_grid, list(range(g.m - 1)), [1.0] * (g.m - 1), weight)


def _backproject(g, out_grid, weight, order, threads, upsample=1, periodic=False):
    if not isinstance(g, Sinogram):
        g = Sinogram(g.grid, g.values)
    if out_grid.dim != g.m:
        raise ValueError("output grid dimension must match the sinogram dimension")
    vals, pc, w, q0, dq = _rows(g, weight, upsample)
    xs = -out_grid.sub(range(g.m - 1)).points()
    out = _kernels.line_sum(vals, pc, w, q0, dq, xs, out_grid.axis(g.m - 1), order,
                            get_threads(threads), periodic)
    return ScalarField(out_grid, out)


# Heisenberg group H_n = C^n x R, points (xi + i eta, tau) stored on R^{2n+1}
# in the order (xi, eta, tau). The transform is R_T after a = (-v, u)/2,
# b = t for z = u + i v.

def _heis_n(m):
    if m % 2 == 0:
        raise ValueError("Heisenberg data need odd ambient dimension m = 2n+1")
    return (m - 1) // 2


def radon_heisenberg_on(f, out_grid, order=3, threads=None, periodic=False, method="cubic"):
    """(R_H f)(z, t) for (z, t) = (u, v, t) on the nodes of out_grid.

    Applied to data phi(z, t) given on a (u, v, t) grid this is the operator
    R_H phi of the derivative inversion formulas. method "spectral" uses
    exact periodic shifts along t (the output t-axis must equal f's).
    """
    n = _heis_n(f.grid.dim)
    if method == "spectral":
        # t + A.zeta with A = (-v, u)/2: zeta_u pairs with v, zeta_v with u
        pairing = list(range(n, 2 * n)) + list(range(n))
        return spectral_line_sum(f, out_grid, pairing, [0.5] * n + [-0.5] * n)
    vals, pc, w, q0, dq = _rows(f)
    A = z_to_a(out_grid.sub(range(2 * n)).points())
    out = _kernels.line_sum(vals, pc, w, q0, dq, A, out_grid.axis(2 * n), order,
                            get_threads(threads), periodic)
    return ScalarField(out_grid, out)


def radon_heisenberg(f, geometry, order=3, threads=None, upsample=1):
    """(R_H f)(z, t) = integral f(zeta, t - Im(z.conj(zeta))/2) dzeta, on the (a, b) layout."""
    _heis_n(f.grid.dim)
    return radon_transversal(f, geometry, order, threads, upsample)


def z_to_a(z_points):
    """Slopes a = (-v, u)/2 for z = u + i v given as rows (u, v)."""
    z = np.atleast_2d(z_points)
    n = z.shape[1] // 2
    return 0.5 * np.concatenate([-z[:, n:], z[:, :n]], axis=1)


def heisenberg_view(sino):
    """Re-index (a, b) data as a field over (u, v, t) with z = u + i v.

    u = 2 a_(2), v = -2 a_(1); the v axes come out reversed so they increase.
    """
    n = _heis_n(sino.m)
    g = sino.grid
    perm = list(range(n, 2 * n)) + list(range(n)) + [2 * n]
    v = np.transpose(sino.values, perm)
    v = np.flip(v, axis=tuple(range(n, 2 * n)))
    shape = [g.shape[k] for k in perm]
    origin = [2 * g.origin[k] for k in range(n, 2 * n)] + [-2 * g.upper[k] for k in range(n)]
    spacing = [2 * g.spacing[k] for k in range(n, 2 * n)] + [2 * g.spacing[k] for k in range(n)]
    grid = UniformGrid(2 * n + 1, shape, origin + [g.origin[-1]], spacing + [g.spacing[-1]])
    return ScalarField(grid, np.ascontiguousarray(v))


def heisenberg_sinogram(field):
    """Inverse of `heisenberg_view`: (u, v, t) samples to the (a, b) layout."""
    n = _heis_n(field.grid.dim)
    g = field.grid
    v = np.flip(field.values, axis=tuple(range(n, 2 * n)))
    perm = list(range(n, 2 * n)) + list(range(n)) + [2 * n]
    v = np.transpose(v, perm)
    origin = [-g.upper[n + k] / 2 for k in range(n)] + [g.origin[k] / 2 for k in range(n)]
    spacing = [g.spacing[n + k] / 2 for k in range(n)] + [g.spacing[k] / 2 for k in range(n)]
    grid = UniformGrid(2 * n + 1, [g.shape[k] for k in perm], origin + [g.origin[-1]],
                       spacing + [g.spacing[-1]])
    return Sinogram(grid, np.ascontiguousarray(v))


def dual_heisenberg(phi, out_grid, order=3, threads=None):
    """(*R_H phi)(zeta, tau) = integral phi(z, tau - Im(zeta.conj(z))/2) dz~,
    dz~ = 2 dz / (4 + |z|^2)^{n+1/2}, evaluated as *R_T on the (a, b) layout."""
    _heis_n(phi.grid.dim)
    return dual_transversal(phi, out_grid, order, threads)


def dual_heisenberg_direct(phi_uvt, out_grid, order=3, threads=None):
    """Same as `dual_heisenberg` but by quadrature over the z = u + i v grid."""
    n = _heis_n(phi_uvt.grid.dim)
    vals, pc, w, q0, dq = _rows(phi_uvt, lambda z: 2.0 / (4 + np.sum(z * z, axis=1)) ** (n + 0.5))
    # tau - (eta.u - xi.v)/2 = tau + A.z with A = (-eta/2, xi/2)
    x = out_grid.sub(range(2 * n)).points()
    A = 0.5 * np.concatenate([-x[:, n:], x[:, :n]], axis=1)
    out = _kernels.line_sum(vals, pc, w, q0, dq, A, out_grid.axis(2 * n), order,
                            get_threads(threads))
    return ScalarField(out_grid, out)


@dataclass(frozen=True, eq=False)
class SphereSinogram:
    """Samples over (theta, t) on a product quadrature of S^{m-1}.

    m = 2: `n_azimuth` uniform angles on the circle. m = 3: Gauss-Legendre
    nodes `polar` in cos(omega) times uniform azimuths. `values` has shape
    (len(nodes), len(t)).
    """

    nodes: np.ndarray
    weights: np.ndarray
    t_axis: UniformGrid
    values: np.ndarray
    polar: np.ndarray = None
    n_azimuth: int = 0
    coverage: float = 1.0

    @property
    def m(self):
        return self.nodes.shape[1]

    def with_values(self, values, coverage=None):
        return SphereSinogram(self.nodes, self.weights, self.t_axis,
                              np.asarray(values, np.complex128).reshape(self.values.shape),
                              self.polar, self.n_azimuth,
                              self.coverage if coverage is None else coverage)


def sphere_quadrature(m, n_azimuth, n_polar=None):
    """Nodes, weights, polar cosines (m = 3) of the product sphere rule."""
    phi = 2 * np.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
    if m == 2:
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return nodes, np.full(n_azimuth, 2 * np.pi / n_azimuth), None
    if m == 3:
        n_polar = n_azimuth // 2 if n_polar is None else n_polar
        c, wc = roots_legendre(n_polar)
        s = np.sqrt(1 - c * c)
        nodes = np.stack([np.outer(s, np.cos(phi)).ravel(), np.outer(s, np.sin(phi)).ravel(),
                          np.repeat(c, n_azimuth)], axis=1)
        w = np.outer(wc, np.full(n_azimuth, 2 * np.pi / n_azimuth)).ravel()
        return nodes, w, c
    raise ValueError("sphere quadrature is provided for m = 2 and m = 3")


def empty_sphere_sinogram(m, t_axis, n_azimuth, n_polar=None):
    nodes, w, polar = sphere_quadrature(m, n_azimuth, n_polar)
    return SphereSinogram(nodes, w, t_axis, np.zeros((len(w), t_axis.shape[0]), np.complex128),
                          polar, n_azimuth)


def transfer_to_sphere(phi, sphere, theta_min=THETA_MIN, strict=True, order=3, threads=None):
    """(T phi)(theta, t) = phi(-theta'/theta_m, t/theta_m) on the nodes of `sphere`.

    Nodes with |theta_m| < theta_min raise unless strict=False, in which case
    they are set to zero. Samples outside the sinogram extent are zero; the
    covered fraction is stored in the result.
    """
    th = sphere.nodes
    low = np.abs(th[:, -1]) < theta_min
    if strict and low.any():
        raise ValueError(f"{int(low.sum())} sphere nodes have |theta_m| < {theta_min}")
    tm = np.where(low, 1.0, th[:, -1])
    t = sphere.t_axis.axis(0)
    a = -th[:, :-1] / tm[:, None]
    K, nt = len(tm), len(t)
    pts = np.concatenate([np.repeat(a, nt, axis=0), (t[None, :] / tm[:, None]).reshape(-1, 1)],
                         axis=1)
    vals, outside = sample_grid(phi.values, phi.grid, pts, order, threads)
    vals = vals.reshape(K, nt)
    vals[low] = 0.0
    out = outside.reshape(K, nt) | low[:, None]
    return sphere.with_values(vals, coverage=1.0 - out.mean())


def _cubic_uniform(pos, n, periodic):
    """Indices (K, 4) and Catmull-Rom weights for fractional positions."""
    i0 = np.floor(pos).astype(int)
    t = pos - i0
    t2, t3 = t * t, t * t * t
    w = np.stack([0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2),
                  0.5 * (-3 * t3 + 4 * t2 + t), 0.5 * (t3 - t2)], axis=1)
    idx = i0[:, None] + np.arange(-1, 3)
    if periodic:
        return idx % n, w
    bad = (idx < 0) | (idx >= n)
    w = np.where(bad, 0.0, w)
    return np.clip(idx, 0, n - 1), w


def _lagrange4(nodes, x):
    """Four-point Lagrange stencils on increasing nonuniform nodes."""
    n = len(nodes)
    i = np.clip(np.searchsorted(nodes, x) - 2, 0, n - 4)
    idx = i[:, None] + np.arange(4)
    xs = nodes[idx]
    w = np.ones((len(x), 4))
    for j in range(4):
        for k in range(4):
            if j != k:
                w[:, j] *= (x - xs[:, k]) / (xs[:, j] - xs[:, k])
    return idx, w


def sample_sphere(psi, theta, t):
    """Interpolate sphere data at unit vectors `theta` (K x m) and offsets t (K)."""
    nt = psi.t_axis.shape[0]
    pos_t = (np.asarray(t) - psi.t_axis.origin[0]) / psi.t_axis.spacing[0]
    outside = (pos_t < 0) | (pos_t > nt - 1)
    it, wt = _cubic_uniform(np.clip(pos_t, 0, nt - 1), nt, False)
    na = psi.n_azimuth
    az = np.arctan2(theta[:, 1], theta[:, 0]) % (2 * np.pi)
    ia, wa = _cubic_uniform(az / (2 * np.pi / na) - 0.5, na, True)
    if psi.m == 2:
        v = psi.values
        out = np.einsum("ka,kt,kat->k", wa, wt, v[ia[:, :, None], it[:, None, :]])
    else:
        ip, wp = _lagrange4(psi.polar, theta[:, 2])
        v = psi.values.reshape(len(psi.polar), na, nt)
        g = v[ip[:, :, None, None], ia[:, None, :, None], it[:, None, None, :]]
        out = np.einsum("kp,ka,kt,kpat->k", wp, wa, wt, g)
    return np.where(outside, 0.0, out), outside


def transfer_from_sphere(psi, geometry):
    """(T^{-1} psi)(a, b) = psi((a - e_m)/sqrt(1+|a|^2), -b/sqrt(1+|a|^2))."""
    sg = Sinogram(geometry, np.zeros(geometry.size))
    a = sg.a_grid.points()
    b = sg.b_axis.axis(0)
    r = np.sqrt(1 + np.sum(a * a, axis=1))
    theta = np.concatenate([a, -np.ones((len(a), 1))], axis=1) / r[:, None]
    nb = len(b)
    vals, _ = sample_sphere(psi, np.repeat(theta, nb, axis=0), (-b[None, :] / r[:, None]).ravel())
    return Sinogram(geometry, vals.reshape(geometry.shape))


def classical_from_transversal(phi, sphere, **kw):
    """(R f)(theta, t) = |theta_m|^{-1} (T R_T f)(theta, t)."""
    T = transfer_to_sphere(phi, sphere, **kw)
    tm = np.abs(sphere.nodes[:, -1])
    tm = np.where(tm == 0, np.inf, tm)
    return T.with_values(T.values / tm[:, None])


def transversal_from_classical(psi, geometry):
    """(R_T f)(a, b) = (1+|a|^2)^{-1/2} (T^{-1} R f)(a, b)."""
    s = transfer_from_sphere(psi, geometry)
    a = s.a_grid.points()
    fac = (1 + np.sum(a * a, axis=1)) ** -0.5
    return Sinogram(geometry, s.values * fac.reshape(geometry.shape[:-1] + (1,)))


def radon_classical(f, sphere, order=3, threads=None, upsample=1):
    """(R f)(theta, t) on the nodes and t-axis of `sphere`.

    Each node is evaluated as a transversal transform along its dominant
    axis k, (R f)(theta, t) = (R_T f)(-theta_{!k}/theta_k, t/theta_k) / |theta_k|,
    so every slope stays bounded by 1 per component.
    """
    m = f.grid.dim
    if sphere.m != m:
        raise ValueError("sphere dimension must match the field dimension")
    _check_decay(f, "field")
    t = sphere.t_axis.axis(0)
    out = np.zeros((len(sphere.nodes), len(t)), np.complex128)
    dom = np.argmax(np.abs(sphere.nodes), axis=1)
    for k in range(m):
        sel = np.flatnonzero(dom == k)
        if not len(sel):
            continue
        perm = [j for j in range(m) if j != k] + [k]
        g = f.grid
        fk = ScalarField(UniformGrid(m, [g.shape[j] for j in perm], [g.origin[j] for j in perm],
                                     [g.spacing[j] for j in perm]),
                         np.transpose(f.values, perm))
        vals, pc, w, q0, dq = _rows(fk, None, upsample)
        for i in sel:
            th = sphere.nodes[i]
            A = -th[perm[:-1]][None, :] / th[k]
            out[i] = _kernels.line_sum(vals, pc, w, q0, dq, A, t / th[k], order,
                                       get_threads(threads))[0] / abs(th[k])
    return sphere.with_values(out)


def dual_sphere(psi, out_grid, order=3, threads=None):
    """(R* psi)(x) = integral over S^{m-1} of psi(theta, x.theta) dtheta."""
    if out_grid.dim != psi.m:
        raise ValueError("output grid dimension must match the sphere dimension")
    ta = psi.t_axis
    out = _kernels.line_sum(psi.values, psi.nodes, psi.weights, ta.origin[0], ta.spacing[0],
                            out_grid.points(), np.zeros(1), order, get_threads(threads))
    return ScalarField(out_grid, out[:, 0])
