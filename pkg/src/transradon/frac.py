"""Riesz potentials and derivatives, the Hilbert transform in the last
variable, and the Semyanistyi fractional families R_T^alpha, *R_T^alpha.

Every operator is a Fourier multiplier. Full potentials use |y|^{-alpha},
partial ones |y_m|^{-alpha} (or |xi|^{-alpha} along b for sinograms); the
singular node y = 0 (y_m = 0) is set to zero, which is exact on Phi-type
inputs whose spectra vanish there. Inputs that are not of that type (a
Gaussian row, say) are handled by the `quadrature` method, which convolves
each row with the exact moments of |b|^{alpha-1} against piecewise-linear
hats.
"""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve, resample
from scipy.special import gamma, roots_jacobi

from .fields import ScalarField, UniformGrid, sample_grid
from .xform import (Sinogram, SphereSinogram, dual_sphere, dual_transversal, radon_transversal,
                    sphere_quadrature)

_POLE_TOL = 1e-12


def _is_pole_sequence(z, start):
    """True when z is within tolerance of start, start+2, start+4, ..."""
    k = (z - start) / 2
    return abs(z.imag) < _POLE_TOL and z.real >= start - _POLE_TOL and \
        abs(k.real - round(k.real)) < _POLE_TOL


def gamma_m(alpha, m):
    """gamma_m(alpha) = 2^alpha pi^{m/2} Gamma(alpha/2) / Gamma((m - alpha)/2).

    Raises where Gamma(alpha/2) has a pole (alpha = 0, -2, ...) and where
    Gamma((m - alpha)/2) does (alpha - m = 0, 2, 4, ...), the potential having
    no normalisation there.
    """
    a = complex(alpha)
    if _is_pole_sequence(-a, 0):
        raise ValueError(f"alpha = {alpha}: Gamma(alpha/2) has a pole")
    if _is_pole_sequence(a - m, 0):
        raise ValueError(f"alpha = {alpha}: alpha - {m} is a non-negative even integer, "
                         f"Gamma(({m} - alpha)/2) has a pole")
    val = 2 ** a * np.pi ** (m / 2) * gamma(a / 2) / gamma((m - a) / 2)
    return val.real if a.imag == 0 else val


def gamma_1(alpha):
    """Normalisation of the one-dimensional potential; alpha = 1, 3, 5, ... excluded."""
    return gamma_m(alpha, 1)


@dataclass(frozen=True)
class FracOrder:
    """Order alpha with its regime.

    "potential": Re alpha > 0 and alpha away from the poles of gamma_m (the
    kernel form exists). "multiplier": any complex alpha, applied on the
    Fourier side only.
    """

    alpha: complex
    regime: str = "multiplier"
    m: int = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.regime not in ("potential", "multiplier"):
            raise ValueError("regime must be 'potential' or 'multiplier'")
        if self.regime == "potential":
            if self.alpha.real <= 0:
                raise ValueError("the potential regime needs Re alpha > 0")
            if self.m is not None:
                gamma_m(self.alpha, self.m)

    @property
    def value(self):
        a = self.alpha
        return a.real if a.imag == 0 else a


def _order(alpha):
    if isinstance(alpha, FracOrder):
        return alpha.value
    a = complex(alpha)
    return a.real if a.imag == 0 else a


def power_multiplier(r, alpha):
    """r^{-alpha} with the r = 0 node set to 0 (1 when alpha = 0)."""
    r = np.asarray(r, float)
    if alpha == 0:
        return np.ones_like(r, dtype=np.complex128)
    out = np.zeros(r.shape, np.complex128)
    nz = r > 0
    out[nz] = np.exp(-alpha * np.log(r[nz]))
    return out


def _freqs(n, d):
    # frequencies y of the +i convention, ordered as numpy's FFT output
    return -2 * np.pi * np.fft.fftfreq(n, d)


def _nyquist_off(y, n):
    # the unpaired Nyquist node of even-length axes has no odd counterpart
    y = y.copy()
    if n % 2 == 0:
        y[n // 2] = 0.0
    return y


def _apply_last(values, spacing, mult, odd=False):
    n = values.shape[-1]
    y = _freqs(n, spacing)
    if odd:
        y = _nyquist_off(y, n)
    return np.fft.ifft(np.fft.fft(values, axis=-1) * mult(y), axis=-1)


def _like(obj, values):
    if isinstance(obj, SphereSinogram):
        return obj.with_values(values)
    return type(obj)(obj.grid, values)


def _last_axis(obj):
    if isinstance(obj, SphereSinogram):
        return obj.values, obj.t_axis.spacing[0]
    return obj.values, obj.grid.spacing[-1]


def _slab_energy(values, spacing):
    n = values.shape[-1]
    F = np.fft.fft(values, axis=-1)
    y = np.abs(_freqs(n, spacing))
    total = np.sum(np.abs(F) ** 2)
    zero = np.sum(np.abs(F[..., y == 0]) ** 2)
    return zero / total if total > 0 else 0.0


def riesz_kernel_weights(alpha, h, n):
    """Weights K_d, |d| < n, of the row convolution approximating I_1^alpha:
    the exact integral of |b|^{alpha-1}/gamma_1(alpha) against the linear hat
    centred d cells away."""
    d = np.arange(-(n - 1), n, dtype=float)
    p = alpha + 1

    def G(x):
        ax = np.abs(x)
        return np.where(ax > 0, np.exp(p * np.log(np.where(ax > 0, ax, 1.0))), 0.0)

    c = h ** alpha / (gamma_1(alpha) * alpha * (alpha + 1))
    return c * (G(d + 1) - 2 * G(d) + G(d - 1))


def riesz_rows_quadrature(values, spacing, alpha, refine=4):
    """I_1^alpha along the last axis by product integration.

    Rows are taken as zero outside their window. `refine` first refines the
    rows by trigonometric interpolation (rows must decay at both ends), which
    reduces the O(h^2) error of the linear hats.
    """
    if complex(alpha).real <= 0:
        raise ValueError("quadrature realisation of I_1^alpha needs Re alpha > 0")
    v = np.asarray(values, np.complex128)
    n = v.shape[-1]
    if refine > 1:
        v = resample(v, refine * n, axis=-1)
    nn = v.shape[-1]
    K = riesz_kernel_weights(alpha, spacing / refine, nn)
    K = K.reshape((1,) * (v.ndim - 1) + (-1,))
    full = fftconvolve(v, K, axes=-1)
    out = full[..., nn - 1:2 * nn - 1]
    return out[..., ::refine]


def riesz_row_point(row, b_axis, alpha, c):
    """(I_1^alpha row)(c) at arbitrary offsets c for one row sampled on b_axis."""
    b = b_axis.axis(0)
    h = b_axis.spacing[0]
    p = alpha + 1
    c = np.atleast_1d(np.asarray(c, float))
    u = (c[:, None] - b[None, :]) / h

    def G(x):
        ax = np.abs(x)
        return np.where(ax > 0, np.exp(p * np.log(np.where(ax > 0, ax, 1.0))), 0.0)

    w = (G(u + 1) - 2 * G(u) + G(u - 1)) * h ** alpha / (gamma_1(alpha) * alpha * (alpha + 1))
    return w @ np.asarray(row, np.complex128)


def riesz_partial(obj, alpha, method="spectral", refine=4):
    """I_2^alpha: multiplier |y_m|^{-alpha} along the last axis.

    Works on fields, sinograms (along b) and sphere sinograms (along t).
    method="spectral" is exact on Phi-type inputs and accepts any complex
    alpha; it warns when Re alpha > 0 and the input carries spectral energy
    on y_m = 0, which the multiplier discards. method="quadrature" needs
    Re alpha > 0 and no pole of gamma_1, and handles inputs of any kind.
    """
    a = _order(alpha)
    values, h = _last_axis(obj)
    if method == "quadrature":
        return _like(obj, riesz_rows_quadrature(values, h, a, refine))
    if method != "spectral":
        raise ValueError("method must be 'spectral' or 'quadrature'")
    if complex(a).real > 0:
        e = _slab_energy(values, h)
        if e > 1e-12:
            warnings.warn(f"input has relative spectral energy {e:.2e} on y_m = 0; "
                          f"the multiplier drops it", stacklevel=2)
    return _like(obj, _apply_last(values, h, lambda y: power_multiplier(np.abs(y), a)))


def riesz_partial_derivative(obj, alpha):
    """D_2^alpha: multiplier |y_m|^{alpha} along the last axis."""
    a = _order(alpha)
    values, h = _last_axis(obj)
    return _like(obj, _apply_last(values, h, lambda y: power_multiplier(np.abs(y), -a)))


def hilbert_last(obj):
    """H_2: multiplier sgn(y_m) along the last axis (0 on y_m = 0)."""
    values, h = _last_axis(obj)
    return _like(obj, _apply_last(values, h, np.sign, odd=True))


def derivative_last(obj, k=1):
    """k-th derivative along the last axis, multiplier (-i y_m)^k.

    The unpaired Nyquist node is zeroed for every k so that derivatives
    compose exactly: d^j d^k = d^{j+k}.
    """
    values, h = _last_axis(obj)
    if k == 0:
        return _like(obj, np.array(values, np.complex128))
    return _like(obj, _apply_last(values, h, lambda y: (-1j * y) ** k, odd=True))


def riesz_potential(f, alpha):
    """I^alpha f = F^{-1}[|y|^{-alpha} F f] on the grid of f (y = 0 node zeroed)."""
    a = _order(alpha)
    g = f.grid
    r2 = 0.0
    for k in range(g.dim):
        y = _freqs(g.shape[k], g.spacing[k])
        shp = [1] * g.dim
        shp[k] = -1
        r2 = r2 + (y * y).reshape(shp)
    mult = power_multiplier(np.sqrt(r2), a)
    return f.with_values(np.fft.ifftn(np.fft.fftn(f.values) * mult))


def riesz_derivative(f, alpha):
    """D^alpha f: multiplier |y|^{alpha}."""
    return riesz_potential(f, -_order(alpha))


def power_moment_point(f, power, x, n_radial=96, n_angular=None):
    """integral f(y) |x - y|^power dy by polar quadrature about x.

    Gauss-Jacobi nodes in r absorb the factor r^{power + m - 1}, a product
    sphere rule covers the directions and f is interpolated with cubic
    stencils. Needs real power > -m.
    """
    g = f.grid
    m = g.dim
    beta = float(power) + m - 1
    if not beta > -1:
        raise ValueError("power must exceed -m")
    x = np.asarray(x, float)
    corners = np.array(np.meshgrid(*[[o, u] for o, u in zip(g.origin, g.upper)])).reshape(m, -1).T
    R = float(np.max(np.linalg.norm(corners - x, axis=1)))
    s, ws = roots_jacobi(n_radial, 0.0, beta)
    r = R * (1 + s) / 2
    wr = ws * (R / 2) ** (beta + 1)
    n_ang = n_angular or (4 * n_radial if m == 2 else 2 * n_radial)
    if m == 1:
        dirs, wd = np.array([[1.0], [-1.0]]), np.ones(2)
    else:
        dirs, wd, _ = sphere_quadrature(m, n_ang)
    pts = x[None, None, :] + r[:, None, None] * dirs[None, :, :]
    vals, _ = sample_grid(f.values, g, pts.reshape(-1, m))
    vals = vals.reshape(len(r), len(wd))
    return complex(wr @ vals @ wd)


def riesz_potential_point(f, alpha, x, n_radial=96, n_angular=None):
    """(I^alpha f)(x) = gamma_m(alpha)^{-1} integral f(y) |x - y|^{alpha - m} dy.

    Direct quadrature in polar coordinates about x (`power_moment_point`).
    Real alpha in (0, m) minus the poles.
    """
    a = _order(alpha)
    if np.iscomplexobj(a) or not a > 0:
        raise ValueError("direct quadrature needs real alpha > 0")
    m = f.grid.dim
    return power_moment_point(f, a - m, x, n_radial, n_angular) / gamma_m(a, m)


def _psi(a, alpha):
    return (1 + np.sum(a * a, axis=1)) ** ((1 - alpha) / 2)


def _check_semyanistyi(alpha):
    a = _order(alpha)
    if complex(a).real <= 0:
        raise ValueError("R_T^alpha needs Re alpha > 0")
    gamma_1(a)
    return a


def semyanistyi_forward(f, alpha, geometry, method="spectral", order=3, threads=None,
                        upsample=1, refine=4):
    """R_T^alpha f = psi_alpha I_1^alpha R_T f, psi_alpha(a) = (1+|a|^2)^{(1-alpha)/2}."""
    a = _check_semyanistyi(alpha)
    phi = radon_transversal(f, geometry, order, threads, upsample)
    return _semyanistyi_rows(phi, a, method, refine)


def _semyanistyi_rows(phi, a, method, refine):
    if not isinstance(phi, Sinogram):
        phi = Sinogram(phi.grid, phi.values)
    v = riesz_partial(phi, a, method, refine).values
    w = _psi(phi.a_grid.points(), a).reshape(phi.grid.shape[:-1] + (1,))
    return Sinogram(phi.grid, v * w)


def semyanistyi_dual(phi, alpha, out_grid, method="spectral", order=3, threads=None, refine=4):
    """*R_T^alpha phi = *R_T (psi_alpha I_1^alpha phi) on a truncated uniform a-grid."""
    a = _check_semyanistyi(alpha)
    return dual_transversal(_semyanistyi_rows(phi, a, method, refine), out_grid, order, threads)


def semyanistyi_dual_point(phi, alpha, x):
    """*R_T^alpha phi at one point by direct quadrature of its kernel form:
    gamma_1(alpha)^{-1} sum over a-nodes and b of phi(a, b) dist(x, h)^{alpha-1}
    with dist(x, h) = |a.x' + b - x_m| / sqrt(1+|a|^2), product integration in
    b and trapezoid weights times (1+|a|^2)^{-m/2} in a."""
    a = _check_semyanistyi(alpha)
    if not isinstance(phi, Sinogram):
        phi = Sinogram(phi.grid, phi.values)
    m = phi.m
    x = np.asarray(x, float)
    ag = phi.a_grid
    A = ag.points()
    w = np.ones(ag.shape)
    for k in range(m - 1):
        shp = [1] * (m - 1)
        shp[k] = -1
        w = w * ag.trapezoid_weights(k).reshape(shp)
    w = w.ravel() * (1 + np.sum(A * A, axis=1)) ** (-m / 2) * _psi(A, a)
    rows = phi.values.reshape(len(A), -1)
    total = 0j
    for i in range(len(A)):
        if w[i] == 0:
            continue
        c = x[-1] - A[i] @ x[:-1]
        total += w[i] * riesz_row_point(rows[i], phi.b_axis, a, c)[0]
    return total


def semyanistyi_dual_sphere(psi, alpha, out_grid, order=3, threads=None, refine=4,
                            method="quadrature"):
    """*R_T^alpha phi over all slopes, from classical data psi = |theta_m|^{-1} T phi.

    Substituting a = -theta'/theta_m, b = t/theta_m turns the a-integral into
    an integral over the half sphere with d~a = d theta, so that
    *R_T^alpha phi = (1/2) R^*(I_1^alpha psi) with the full-sphere rule of psi.
    Nothing is truncated in a.
    """
    a = _check_semyanistyi(alpha)
    rows = riesz_partial(psi, a, method, refine)
    out = dual_sphere(rows, out_grid, order, threads)
    return ScalarField(out_grid, 0.5 * out.values)


def point_grid(x):
    """A one-node grid at x, for point evaluations through grid-valued operators."""
    x = np.asarray(x, float)
    return UniformGrid(len(x), (2,) * len(x), tuple(x), (1.0,) * len(x))
