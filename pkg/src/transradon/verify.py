"""Numerical checks of the exact identities, weighted bounds and scaling laws,
and the benchmark suites behind the command line `verify` subcommand.

Every check returns a VerificationReport. Suites collect reports into a
plain dict whose JSON form (sorted keys, no timings) depends only on the
inputs, the seed and the thread count.
"""
import csv
import io
import json
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gamma

from .fields import (ScalarField, UniformGrid, get_threads, phi_space_phantom, sample_grid,
                     set_threads)
from .frac import (point_grid, power_moment_point, riesz_partial, riesz_potential_point,
                   semyanistyi_dual, semyanistyi_dual_sphere, semyanistyi_forward)
from .invert import (HypersingularSpec, WaveletSpec, cbp_reconstruct, hyper_constant,
                     hypersingular_invert, invert_derivative_odd, invert_heisenberg,
                     kappa_wavelet, kernel_convolution_point, riesz_data, wavelet_transform)
from .slice import MixingConfig, invert_fourier, slice_residual
from .xform import (Sinogram, backprojection, dual_heisenberg_direct, dual_transversal,
                    empty_sphere_sinogram, radon_classical, radon_heisenberg_on,
                    radon_transversal, sinogram_grid, sphere_area, sphere_quadrature)

TINY = 1e-300


def _num(z):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass
class VerificationReport:
    """Both sides of one identity plus everything needed to interpret them.

    rel_error is |L - R| / max(|L|, |R|, tiny) (Euclidean norms for vector
    sides). Benchmarks that measure a residual rather than two sides leave
    left and right as None (rel_error is then None) and put the residual in
    `measure`, a (name, value) pair; two-sided reports default it to rel_error.
    The runtime is kept on the object but left out of `to_dict` unless asked
    for, so that serialised reports are reproducible.
    """

    name: str
    left: object
    right: object
    constant: dict = None
    grid: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    runtime: float = 0.0
    measure: tuple = None

    @property
    def rel_error(self):
        if self.left is None or self.right is None:
            return None
        L = np.atleast_1d(np.asarray(self.left, np.complex128))
        R = np.atleast_1d(np.asarray(self.right, np.complex128))
        den = max(np.linalg.norm(L), np.linalg.norm(R), TINY)
        return float(np.linalg.norm(L - R) / den)

    def to_dict(self, include_runtime=False):
        def conv(v):
            if isinstance(v, dict):
                return {str(k): conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            if isinstance(v, np.ndarray):
                return [conv(x) for x in v.tolist()]
            if isinstance(v, (complex, np.complexfloating)):
                return _num(v)
            if isinstance(v, (np.floating,)):
                return float(v)
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, np.bool_):
                return bool(v)
            return v

        d = {"name": self.name, "left": conv(self.left), "right": conv(self.right),
             "rel_error": self.rel_error, "constant": conv(self.constant),
             "grid": conv(self.grid), "truncation": conv(self.truncation),
             "details": conv(self.details), "measure": conv(self.headline())}
        if include_runtime:
            d["runtime"] = self.runtime
        return d


    def headline(self):
        if self.measure is not None:
            return tuple(self.measure)
        return ("rel_error", self.rel_error)


class _Timer:
    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t


def gaussian_field(grid, scale=1.0, center=None):
    """exp(-|scale (x - center)|^2) on the grid nodes."""
    x = grid.points()
    if center is not None:
        x = x - np.asarray(center)
    return ScalarField(grid, np.exp(-np.sum((scale * x) ** 2, axis=1)).reshape(grid.shape))


# ---------------------------------------------------------------------------
# Weighted sinogram integrals


def eq_constant(alpha, m):
    """pi^{(m-1)/2} Gamma(alpha/2) / Gamma((alpha+m-1)/2)."""
    return np.pi ** ((m - 1) / 2) * gamma(alpha / 2) / gamma((alpha + m - 1) / 2)


def power_weights(axis, alpha):
    """w_j = int hat_j(s) |s|^{alpha-1} ds on a uniform axis (product integration)."""
    s = axis.axis(0)
    h = axis.spacing[0]
    a = float(alpha)

    def G0(x):  # antiderivative of |s|^{a-1}
        return np.sign(x) * np.abs(x) ** a / a

    def G1(x):  # antiderivative of s |s|^{a-1}
        return np.abs(x) ** (a + 1) / (a + 1)

    w = np.zeros(len(s))
    lo, hi = s[:-1], s[1:]
    I0 = G0(hi) - G0(lo)
    I1 = G1(hi) - G1(lo)
    # on [lo, hi]: hat of lo is (hi - s)/h, hat of hi is (s - lo)/h
    w[:-1] += (hi * I0 - I1) / h
    w[1:] += (I1 - lo * I0) / h
    return w


def _check_alpha(alpha):
    a = complex(alpha)
    if a.imag != 0:
        raise ValueError("the quadrature checks take real alpha")
    if a.real <= 0:
        raise ValueError("alpha must be positive")
    return a.real


def _sphere_for(f, n_azimuth, t_extent=None, t_points=None):
    g = f.grid
    T = t_extent or float(np.sqrt(np.sum(np.maximum(np.abs(np.array(g.origin)),
                                                    np.abs(np.array(g.upper))) ** 2)))
    h = min(g.spacing)
    n = t_points or int(2 * np.ceil(T / h)) + 1
    t_axis = UniformGrid(1, (n,), (-T,), (2 * T / (n - 1),))
    return empty_sphere_sinogram(g.dim, t_axis, n_azimuth)


def _weighted_lhs(Rf, alpha, smooth=None, absolute=False):
    # Substituting a = -theta'/theta_m, b = t/theta_m in the (a, b) integral:
    # R_T f = |theta_m| R f, da db = dtheta dt / |theta_m|^{m+1}, and the weights
    # |b|^{alpha-1} (1+|a|^2)^{-(alpha+m-1)/2} contribute |t|^{alpha-1}
    # |theta_m|^{alpha+m-1-(alpha-1)}, so every power of theta_m cancels; the
    # half sphere is half of the full sphere rule.
    rows = np.abs(Rf.values) if absolute else Rf.values
    t = Rf.t_axis.axis(0)
    w = power_weights(Rf.t_axis, alpha)
    if smooth is not None:
        w = w * smooth(t)
    return 0.5 * complex(Rf.weights @ (rows @ w))


def check_eq1(f, alpha, n_azimuth=256, upsample=2, variant="eq1"):
    """Weighted sinogram integral against lambda times the weighted field integral.

    variant "eq1": weights |b|^{alpha-1} (1+|a|^2)^{-(alpha+m-1)/2} and |x|^{alpha-1};
    variant "eq2": |b|^{alpha-1} (1+|a|^2+b^2)^{-(alpha+m-1)/2} and
    |x|^{alpha-1} (1+|x|^2)^{-alpha/2}. The slope integral runs over all of
    R^{m-1} through the sphere parameterisation (nothing is truncated); the
    field side is a polar quadrature about the origin.
    """
    a = _check_alpha(alpha)
    m = f.grid.dim
    lam = eq_constant(a, m)
    with _Timer() as tm:
        Rf = radon_classical(f, _sphere_for(f, n_azimuth), upsample=upsample)
        if variant == "eq1":
            left = _weighted_lhs(Rf, a)
            right = lam * power_moment_point(f, a - 1, np.zeros(m))
        elif variant == "eq2":
            left = _weighted_lhs(Rf, a, lambda s: (1 + s * s) ** (-(a + m - 1) / 2))
            r2 = np.sum(f.grid.points() ** 2, axis=1).reshape(f.grid.shape)
            fw = f.with_values(f.values * (1 + r2) ** (-a / 2))
            right = lam * power_moment_point(fw, a - 1, np.zeros(m))
        else:
            raise ValueError("variant must be 'eq1' or 'eq2'")
    return VerificationReport(
        variant, left, right,
        {"symbolic": "pi^((m-1)/2) Gamma(alpha/2) / Gamma((alpha+m-1)/2)", "value": lam,
         "alpha": a, "m": m},
        f.grid.header(), {"slopes": "all (sphere parameterisation)",
                          "t_extent": Rf.t_axis.upper[0], "n_azimuth": n_azimuth},
        runtime=tm.elapsed)


def check_eq2(f, alpha, **kw):
    return check_eq1(f, alpha, variant="eq2", **kw)


def _lp_norm(f, p):
    return float((np.sum(np.abs(f.values) ** p) * f.grid.cell_volume) ** (1 / p))


def _dilate(f, lam):
    vals, _ = sample_grid(f.values, f.grid, lam * f.grid.points())
    return f.with_values(vals.reshape(f.grid.shape))


def check_weighted_bound(f, alpha, p, kind="transversal", dilations=(0.5, 1.0, 2.0, 4.0),
                         n_azimuth=256, geometry=None):
    """Weighted L^1 norm of the transform and its ratio to ||f||_p.

    kind "transversal": int |R_T f| |b|^{alpha-1} (1+|a|^2+b^2)^{-(alpha+m-1)/2} da db
    over all slopes. kind "heisenberg": int |R_H f| |t|^{alpha-1}
    (1+|z|^2+t^2)^{-(alpha+2n)/2} dz dt on the (a, b) layout `geometry`
    (dz = 4^n da, |z| = 2|a|); slopes beyond the layout are truncated and
    reported. The ratio is recorded for every dilation f(lam x).
    """
    a = float(alpha)
    m = f.grid.dim
    if not 1 <= p < m / (m - 1):
        raise ValueError(f"p must satisfy 1 <= p < m/(m-1) = {m / (m - 1):.4g}; at and beyond "
                         "m/(m-1) the bound fails (the transform can be infinite everywhere)")
    pp = math.inf if p == 1 else p / (p - 1)
    lo = 1 - (m / pp if pp != math.inf else 0.0)
    if not a > lo:
        raise ValueError(f"alpha must exceed 1 - m/p' = {lo:.4g}")

    def lhs(fl):
        if kind == "transversal":
            Rf = radon_classical(fl, _sphere_for(fl, n_azimuth), upsample=2)
            return _weighted_lhs(Rf, a, lambda s: (1 + s * s) ** (-(a + m - 1) / 2),
                                 absolute=True).real
        if kind == "heisenberg":
            if m % 2 == 0:
                raise ValueError("Heisenberg data need odd m")
            n = (m - 1) // 2
            phi = radon_transversal(fl, geometry, upsample=2)
            A = phi.a_grid.points()
            w = np.ones(phi.a_grid.shape)
            for k in range(m - 1):
                shp = [1] * (m - 1)
                shp[k] = -1
                w = w * phi.a_grid.trapezoid_weights(k).reshape(shp)
            b = phi.b_axis.axis(0)
            z2 = 4 * np.sum(A * A, axis=1)
            wb = power_weights(phi.b_axis, a)
            rows = np.abs(phi.values.reshape(len(A), -1))
            sm = (1 + z2[:, None] + b[None, :] ** 2) ** (-(a + 2 * n) / 2)
            return float(4 ** n * np.sum(w.ravel()[:, None] * rows * sm * wb[None, :]))
        raise ValueError("kind must be 'transversal' or 'heisenberg'")

    with _Timer() as tm:
        vals = []
        for lam in dilations:
            fl = f if lam == 1 else _dilate(f, lam)
            L = lhs(fl)
            vals.append({"dilation": lam, "value": L, "norm_p": _lp_norm(fl, p),
                         "ratio": L / max(_lp_norm(fl, p), TINY)})
    base = next((v for v in vals if v["dilation"] == 1.0), vals[0])
    trunc = {"slopes": "all" if kind == "transversal" else
             (geometry.header() if geometry is not None else None)}
    return VerificationReport(f"weighted_bound_{kind}", base["value"], None,
                              {"p": p, "alpha": a, "p_dual": pp if pp != math.inf else "inf"},
                              f.grid.header(), trunc, {"dilations": vals}, tm.elapsed,
                              ("ratio", base["ratio"]))


# ---------------------------------------------------------------------------
# Duality relations


def _sino_weights(phi, weight=True):
    sg = phi.a_grid
    m = phi.m
    w = np.ones(sg.shape)
    for k in range(m - 1):
        shp = [1] * (m - 1)
        shp[k] = -1
        w = w * sg.trapezoid_weights(k).reshape(shp)
    w = w.ravel()
    if weight:
        a = sg.points()
        w = w * (1 + np.sum(a * a, axis=1)) ** (-m / 2)
    return np.outer(w, phi.b_axis.trapezoid_weights(0)).reshape(phi.grid.shape)


def _field_weights(grid):
    w = np.ones(grid.shape)
    for k in range(grid.dim):
        shp = [1] * grid.dim
        shp[k] = -1
        w = w * grid.trapezoid_weights(k).reshape(shp)
    return w


def check_duality(kind, f, phi, alpha=None, upsample=2):
    """<transform f, phi> against <f, dual phi>.

    kind "transversal": R_T and *R_T with d~a db on the (a, b) grid of phi.
    kind "heisenberg": R_H f evaluated on the (u, v, t) grid of phi with
    d~z dt, against the direct z-quadrature of *R_H phi on f's grid.
    kind "alpha": the Semyanistyi pair R_T^alpha, *R_T^alpha (quadrature
    Riesz rows).
    """
    with _Timer() as tm:
        if kind == "transversal":
            phi = phi if isinstance(phi, Sinogram) else Sinogram(phi.grid, phi.values)
            Rf = radon_transversal(f, phi.grid, upsample=upsample)
            left = np.sum(Rf.values * phi.values * _sino_weights(phi))
            D = dual_transversal(phi, f.grid, upsample=upsample)
            right = np.sum(f.values * D.values * _field_weights(f.grid))
        elif kind == "heisenberg":
            m = f.grid.dim
            n = (m - 1) // 2
            Rf = radon_heisenberg_on(f, phi.grid)
            z = phi.grid.sub(range(2 * n)).points()
            wz = 2.0 / (4 + np.sum(z * z, axis=1)) ** (n + 0.5)
            w = _field_weights(phi.grid) * wz.reshape(phi.grid.shape[:-1] + (1,))
            left = np.sum(Rf.values * phi.values * w)
            D = dual_heisenberg_direct(phi, f.grid)
            right = np.sum(f.values * D.values * _field_weights(f.grid))
        elif kind == "alpha":
            phi = phi if isinstance(phi, Sinogram) else Sinogram(phi.grid, phi.values)
            Rf = semyanistyi_forward(f, alpha, phi.grid, method="quadrature", upsample=upsample)
            left = np.sum(Rf.values * phi.values * _sino_weights(phi))
            D = semyanistyi_dual(phi, alpha, f.grid, method="quadrature")
            right = np.sum(f.values * D.values * _field_weights(f.grid))
        else:
            raise ValueError("kind must be 'transversal', 'heisenberg' or 'alpha'")
    return VerificationReport(f"duality_{kind}", complex(left), complex(right),
                              None if alpha is None else {"alpha": _num(alpha)},
                              f.grid.header(), {"data_grid": phi.grid.header()},
                              runtime=tm.elapsed)


# ---------------------------------------------------------------------------
# Measure changes between the sphere and the slope space


def check_measure_change(direction, profile, m=3, n_sphere=64):
    """Change of variables between S^{m-1} and R^{m-1}, for zonal/radial profiles.

    sphere_to_plane: int_S F(theta_m) dtheta against the slope integral of
    F((+-1)/sqrt(1+|a|^2)) summed over both signs with d~a. plane_to_sphere:
    int_{R^{m-1}} F(|a|) da against the half-sphere integral of
    F(|theta'|/theta_m) dtheta/theta_m^m. Sphere sides use the product sphere
    rule; slope sides a radial quadrature to infinity.
    """
    sig = 2.0 if m == 2 else sphere_area(m - 1)  # area of S^{m-2}
    with _Timer() as tm:
        nodes, wts, _ = sphere_quadrature(m, 2 * n_sphere if m == 2 else n_sphere,
                                          None if m == 2 else n_sphere)
        th = nodes[:, -1]
        if direction == "sphere_to_plane":
            left = float(wts @ profile(th))
            fr = lambda r: (profile(1 / np.sqrt(1 + r * r)) + profile(-1 / np.sqrt(1 + r * r))) \
                * (1 + r * r) ** (-m / 2) * r ** (m - 2)
            right = sig / (1 if m > 2 else 2) * integrate.quad(fr, 0, np.inf, limit=400,
                                                               epsabs=1e-13, epsrel=1e-12)[0]
            if m == 2:
                right *= 2  # S^0 has two points: a and -a
        elif direction == "plane_to_sphere":
            fr = lambda r: profile(r) * r ** (m - 2)
            left = sig * integrate.quad(fr, 0, np.inf, limit=400, epsabs=1e-13,
                                        epsrel=1e-12)[0]
            up = th > 0
            rad = np.sqrt(np.maximum(1 - th[up] ** 2, 0)) / th[up]
            right = float(wts[up] @ (profile(rad) / th[up] ** m))
        else:
            raise ValueError("direction must be 'sphere_to_plane' or 'plane_to_sphere'")
    return VerificationReport(f"measure_change_{direction}", left, right,
                              {"sphere_area": sphere_area(m), "m": m}, {"n_sphere": n_sphere},
                              {"slopes": "all (quadrature to infinity)"}, runtime=tm.elapsed)


# ---------------------------------------------------------------------------
# Mixed norms and the scaling law


def mixed_norm(phi, q, r):
    """(int (int |phi|^r db)^{q/r} da)^{1/q}: inner integral along the last axis,
    trapezoid rules on every axis."""
    if q < 1 or r < 1:
        raise ValueError("q and r must be at least 1")
    g = phi.grid
    wb = g.trapezoid_weights(g.dim - 1)
    inner = (np.abs(phi.values) ** r @ wb) ** (q / r)
    wa = _field_weights(g.sub(range(g.dim - 1)))
    return float(np.sum(inner * wa) ** (1 / q))


def scaling_exponents(m, p):
    """q = p', 1/r = 1 - m/p'."""
    pp = p / (p - 1)
    return pp, 1 / (1 - m / pp)


def scaling_exponent_test(p, dilations=(0.5, 1.0, 2.0, 4.0), m=2, q=None, r=None, n=256,
                          extent=12.0, a_extent=2.0, na=65, profile=None):
    """Slope of log(||R_T f_lam||_{q,r} / ||f_lam||_p) against log(lam), f_lam(x) = f(lam x).

    The exponent of lam in the ratio is 1 - m - 1/r + m/p, zero exactly at
    q = p', 1/r = 1 - m/p'. `profile` maps points to values (default: the
    unit Gaussian); all dilations share one grid.
    """
    if not 1 <= p < m / (m - 1):
        raise ValueError(f"p must satisfy 1 <= p < m/(m-1) = {m / (m - 1):.4g}")
    if len(set(dilations)) < 3:
        raise ValueError("the slope fit needs at least three distinct dilations")
    q0, r0 = scaling_exponents(m, p)
    q = q0 if q is None else q
    r = r0 if r is None else r
    grid = UniformGrid.symmetric(m, n, extent)
    geo = sinogram_grid(m, grid.axis_grid(m - 1), a_extent, na)
    prof = profile or (lambda x: np.exp(-np.sum(x * x, axis=1)))
    rows = []
    with _Timer() as tm:
        for lam in dilations:
            f = ScalarField(grid, prof(lam * grid.points()).reshape(grid.shape))
            phi = radon_transversal(f, geo, upsample=2)
            ratio = mixed_norm(phi, q, r) / _lp_norm(f, p)
            rows.append({"dilation": lam, "ratio": ratio})
    x = np.log([v["dilation"] for v in rows])
    y = np.log([v["ratio"] for v in rows])
    slope = float(np.polyfit(x, y, 1)[0])
    predicted = 1 - m - 1 / r + m / p
    return VerificationReport("scaling_exponent", slope, predicted,
                              {"p": p, "q": q, "r": r, "critical_q": q0, "critical_r": r0},
                              grid.header(), {"a_extent": a_extent, "na": na},
                              {"ratios": rows, "slope": slope, "predicted_slope": predicted},
                              tm.elapsed, ("slope", slope))


# ---------------------------------------------------------------------------
# Benchmark suites


def _phi_phantom(m, n, extent, lo, hi, seed):
    g = UniformGrid.symmetric(m, n, extent)
    dual = g.dual()
    nyq = dual.spacing[0] * (n // 2)
    f = phi_space_phantom(g, (lo * nyq, hi * nyq), 2 * dual.spacing[-1], seed=seed)
    return g, f, nyq


def _rel_l2(u, v):
    return float(np.linalg.norm(np.asarray(u) - np.asarray(v)) / np.linalg.norm(np.asarray(v)))


def bench_forward_oracle():
    """R_T of exp(-|x|^2) on 256^2 over [-8, 8]^2 against
    sqrt(pi) (1+a^2)^{-1/2} exp(-b^2/(1+a^2)), |a| <= 8."""
    g = UniformGrid.symmetric(2, 256, 8.0)
    f = gaussian_field(g)
    geo = sinogram_grid(2, g.axis_grid(1), 8.0, 257)
    with _Timer() as tm:
        phi = radon_transversal(f, geo, threads=1)
    a = phi.a_grid.axis(0)[:, None]
    b = phi.b_axis.axis(0)[None, :]
    oracle = np.sqrt(np.pi) / np.sqrt(1 + a * a) * np.exp(-b * b / (1 + a * a))
    err = float(np.max(np.abs(phi.values - oracle)) / np.max(np.abs(oracle)))
    return VerificationReport("forward_oracle", None, None, None, g.header(), geo.header(),
                              {"max_rel_error": err, "threads": 1}, tm.elapsed,
                              ("max_rel_error", err))


def bench_slice():
    """Projection-slice residual for the unit Gaussian, m = 2 (256^2) and m = 3 (96^3)."""
    out = []
    for m, n, A, na in [(2, 256, 8.0, 257), (3, 96, 4.0, 33)]:
        g = UniformGrid.symmetric(m, n, 8.0)
        f = gaussian_field(g)
        geo = sinogram_grid(m, g.axis_grid(m - 1), A, na)
        res = slice_residual(f, radon_transversal(f, geo))
        out.append(VerificationReport(f"projection_slice_m{m}", None, None, None, g.header(),
                                      geo.header(), res, measure=("max_residual", res["max"])))
    return out


def bench_eq1():
    g = UniformGrid.symmetric(2, 256, 8.0)
    rep = check_eq1(gaussian_field(g), 1.0)
    rep.details["lambda_error"] = abs(rep.constant["value"] - np.pi) / np.pi
    return rep


def bench_semyanistyi_point():
    """*R_T^{1/2} R_T f at 0 against 2 pi I^{3/2} f(0) for the unit Gaussian, m = 2."""
    g = UniformGrid.symmetric(2, 256, 8.0)
    f = gaussian_field(g)
    sph = empty_sphere_sinogram(2, UniformGrid(1, (257,), (-8.0,), (1 / 16,)), 128)
    Rf = radon_classical(f, sph, upsample=2)
    left = semyanistyi_dual_sphere(Rf, 0.5, point_grid([0.0, 0.0])).values.flat[0]
    right = 2 * np.pi * riesz_potential_point(f, 1.5, [0.0, 0.0])
    return VerificationReport("semyanistyi_point", left, right,
                              {"closed_form_right": 2 * np.pi * gamma(0.25) / 2 ** 1.5},
                              g.header(), {"slopes": "all (sphere parameterisation)"})


def bench_intertwining(seed):
    """R~_T R_T f against (2 pi)^{m-1} I_2^{m-1} f on an m = 2 Phi phantom."""
    g, f, nyq = _phi_phantom(2, 256, 8.0, 0.1, 0.3, seed)
    phi = radon_transversal(f, sinogram_grid(2, g.axis_grid(1), 8.0, 257), upsample=2)
    bp = backprojection(phi, g, method="spectral")
    ref = riesz_partial(f, 1)
    err = _rel_l2(bp.values, 2 * np.pi * ref.values)
    return VerificationReport("intertwining", None, None, {"symbolic": "(2 pi)^(m-1)"},
                              g.header(), {"a_extent": 8.0, "na": 257}, {"rel_l2": err},
                              measure=("rel_l2", err))


def bench_duality():
    out = []
    g = UniformGrid.symmetric(2, 128, 8.0)
    f = gaussian_field(g, center=[0.3, -0.2])
    geo = sinogram_grid(2, g.axis_grid(1), 6.0, 193)
    sg = Sinogram(geo, np.zeros(geo.shape))
    a = sg.a_grid.axis(0)[:, None]
    b = sg.b_axis.axis(0)[None, :]
    phi = Sinogram(geo, np.exp(-a * a / 2 - (b - 0.5) ** 2))
    out.append(check_duality("transversal", f, phi))
    g3 = UniformGrid.symmetric(3, 48, 6.0)
    f3 = gaussian_field(g3, center=[0.2, -0.1, 0.3])
    pg = UniformGrid.symmetric(3, 48, 6.0)
    p = pg.points()
    ph = ScalarField(pg, np.exp(-np.sum(p[:, :2] ** 2, axis=1) / 4 - (p[:, 2] - 0.4) ** 2)
                     .reshape(pg.shape))
    out.append(check_duality("heisenberg", f3, ph))
    out.append(check_duality("alpha", f, phi, alpha=0.6))
    return out


def bench_measure_change():
    return [check_measure_change("sphere_to_plane", lambda t: np.ones_like(t), m=3),
            check_measure_change("plane_to_sphere", lambda r: np.exp(-r * r), m=3)]


def suite_identities(seed=7):
    reps = [bench_forward_oracle()] + bench_slice()
    reps += [bench_eq1(), bench_semyanistyi_point(), bench_intertwining(seed)]
    reps += bench_duality()
    reps += bench_measure_change()
    g = UniformGrid.symmetric(2, 128, 8.0)
    reps.append(check_weighted_bound(gaussian_field(g), 0.8, 1.5, n_azimuth=128))
    return reps


def bench_fourier_inversion(seed):
    """Fourier-slice round trips on Phi phantoms, m = 2 and m = 3."""
    g, f, nyq = _phi_phantom(2, 256, 8.0, 0.1, 0.3, seed)
    geo = sinogram_grid(2, g.axis_grid(1), 8.0, 1025)
    phi = radon_transversal(f, geo, upsample=2)
    rec, rep = invert_fourier(phi, g, MixingConfig(gap=0.05 * nyq, radius=0.3 * nyq))
    e2 = _rel_l2(rec.values, f.values)
    g3, f3, phi3, nyq3 = _m3_case(seed)
    rec3, rep3 = invert_fourier(phi3, g3, MixingConfig(gap=0.15 * nyq3, radius=0.75 * nyq3,
                                                       refine=4))
    e3 = _rel_l2(rec3.values, f3.values)
    return [VerificationReport("fourier_inversion_m2", None, None, None, g.header(),
                               geo.header(), {"rel_l2": e2, "mixing": rep},
                               measure=("rel_l2", e2)),
            VerificationReport("fourier_inversion_m3", None, None, None, g3.header(),
                               phi3.grid.header(), {"rel_l2": e3, "mixing": rep3},
                               measure=("rel_l2", e3))]


_M3 = {}


def _m3_case(seed):
    if seed not in _M3:
        g, f, nyq = _phi_phantom(3, 64, 8.0, 0.3, 0.75, seed)
        phi = radon_transversal(f, sinogram_grid(3, g.axis_grid(2), 3.0, 49), upsample=4)
        _M3.clear()
        _M3[seed] = (g, f, phi, nyq)
    return _M3[seed]


def bench_derivative_inversion(seed):
    g, f, phi, _ = _m3_case(seed)
    res = {p: invert_derivative_odd(phi, g, p, refine=4) for p in ("post", "pre", "split")}
    errs = {p: _rel_l2(r.values, f.values) for p, r in res.items()}
    scale = float(np.max(np.abs(res["post"].values)))
    agree = max(float(np.max(np.abs(res[a].values - res[b].values))) / scale
                for a, b in (("post", "pre"), ("pre", "split"), ("post", "split")))
    return VerificationReport("derivative_inversion", None, None, None,
                              g.header(), {"a_extent": 3.0, "na": 49, "refine": 4},
                              {"errors": errs, "placement_agreement": agree},
                              measure=("rel_l2", max(errs.values())))


def bench_heisenberg_inversion(seed):
    g, f, phi, nyq = _m3_case(seed)
    der = invert_heisenberg(phi, g, "derivative", refine=4)
    four = invert_heisenberg(phi, g, "fourier",
                             MixingConfig(gap=0.15 * nyq, radius=0.75 * nyq, refine=4))
    split = invert_derivative_odd(phi, g, "split", refine=4)
    err = _rel_l2(der.values, f.values)
    flipped = _rel_l2(-der.values, f.values)
    return VerificationReport(
        "heisenberg_inversion", None, None, {"sign": -1, "n": 1},
        g.header(), {"a_extent": 3.0, "na": 49, "refine": 4},
        {"error_derivative": err, "error_fourier": _rel_l2(four.values, f.values),
         "error_sign_flipped": flipped,
         "fourier_vs_derivative": _rel_l2(four.values, der.values),
         "derivative_vs_split": float(np.max(np.abs(der.values - split.values)))},
        measure=("rel_l2", err))


def bench_cbp():
    """Closed-form gamma, the t -> 0 plateau of W~ R_T f / f, and W~ R_T f = f * k_t."""
    spec = WaveletSpec(2, 1)
    wav = kappa_wavelet(spec)
    g = UniformGrid.symmetric(2, 256, 8.0)
    f = gaussian_field(g)
    T, h = 6.0, 1 / 256
    nt = int(round(2 * T / h)) + 1
    sph = empty_sphere_sinogram(2, UniformGrid(1, (nt,), (-T,), (h,)), 128)
    Rf = radon_classical(f, sph, upsample=2)
    og = UniformGrid.symmetric(2, 32, 4.0)
    u, rep = cbp_reconstruct(Rf, spec, og, t0=1.0, levels=9, reference=gaussian_field(og))
    x = np.array([0.3, -0.2])
    pairs = []
    for t in (0.5, 0.125):
        W = wavelet_transform(Rf, spec, point_grid(x), t=t).values.flat[0]
        K = kernel_convolution_point(f, spec, x, t=t)
        pairs.append({"t": t, "sinogram": W, "convolution": K,
                      "rel_diff": abs(W - K) / abs(K)})
    ratio = rep.get("plateau_ratio")
    rr = None if ratio is None else abs(complex(*ratio) - wav.gamma) / wav.gamma
    return VerificationReport(
        "cbp", wav.gamma, np.pi ** 2, {"symbolic": "pi^(m-1/2) Gamma(l-(m-1)/2) / Gamma(m/2)"},
        og.header(), {"slopes": "all (sphere parameterisation)", "t_spacing": h},
        {"schedule": rep, "plateau_rel_to_gamma": rr, "two_evaluations": pairs,
         "gamma_error": abs(wav.gamma - np.pi ** 2) / np.pi ** 2},
        measure=("plateau_rel_to_gamma", rr))


def bench_hypersingular():
    """eps-refinement of the truncated hypersingular inversion, m = 2, l = 1."""
    h, Y, C = 1 / 32, 8.0, 3.0
    L = C + Y
    n = int(round(2 * L / h)) + 1
    ext = UniformGrid(2, (n, n), (-L, -L), (h, h))
    g0 = UniformGrid.symmetric(2, 256, 8.0)
    sph = empty_sphere_sinogram(2, UniformGrid(1, (321,), (-10.0,), (1 / 16,)), 256)
    Rf = radon_classical(gaussian_field(g0), sph, upsample=2)
    g = riesz_data(Rf, ext)
    errs = []
    for eps in (0.5, 0.25, 0.125, 0.0625):
        rec, info = hypersingular_invert(g, HypersingularSpec(2, 1, eps=eps, Y=Y))
        ref = gaussian_field(rec.grid).values
        errs.append({"eps": eps, "error": _rel_l2(rec.values.real, ref)})
    d = hyper_constant(2, 1)
    return VerificationReport("hypersingular", d, 2 * np.pi, {"symbolic": "d_{2,1} = 2 pi"},
                              ext.header(), {"Y": Y, "output_half_width": C},
                              {"errors": errs, "d_imag_over_real": abs(d.imag) / abs(d.real)},
                              measure=("final_error", errs[-1]["error"]))


def suite_inversion(seed=7):
    return bench_fourier_inversion(seed) + [bench_derivative_inversion(seed),
            bench_heisenberg_inversion(seed), bench_cbp(), bench_hypersingular()]


def suite_scaling(seed=7, p=1.5):
    base = scaling_exponent_test(p)
    q, r = scaling_exponents(2, p)
    pert = scaling_exponent_test(p, r=r + 0.5)
    pert.name = "scaling_exponent_perturbed_r"
    return [base, pert]


SUITES = {"identities": suite_identities, "inversion": suite_inversion,
          "scaling": suite_scaling}


def run_suite(name="all", seed=7, threads=None, p=1.5):
    """Run one suite (or all) and return a JSON-ready dict without timings.

    `p` is the Lebesgue exponent of the scaling suite (m = 2).
    """
    if threads is not None:
        set_threads(threads)
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise ValueError(f"suite must be one of {sorted(SUITES)} or 'all'")
    out = {"suite": name, "seed": seed, "p": p, "threads": get_threads(), "reports": {},
           "warnings": {}}
    for n in names:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            reps = SUITES[n](seed, p) if n == "scaling" else SUITES[n](seed)
            out["reports"][n] = [r.to_dict() for r in reps]
        out["warnings"][n] = [str(w.message) for w in caught]
    return out


def to_json(report):
    return json.dumps(report, sort_keys=True, indent=1)


def curves_csv(report):
    """Error-vs-t, error-vs-eps and slope-fit curves as CSV with header x,y,label."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "label"])
    for reps in report["reports"].values():
        for r in reps:
            d = r["details"]
            if r["name"] == "cbp":
                for lv in d["schedule"]["levels"]:
                    if "error" in lv:
                        w.writerow([lv["t"], lv["error"], "cbp_error_vs_t"])
            elif r["name"] == "hypersingular":
                for e in d["errors"]:
                    w.writerow([e["eps"], e["error"], "hypersingular_error_vs_eps"])
            elif r["name"].startswith("scaling_exponent"):
                for v in d["ratios"]:
                    w.writerow([v["dilation"], v["ratio"], r["name"]])
    return buf.getvalue()
