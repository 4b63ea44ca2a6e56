"""Projection-slice identity and Fourier-domain inversion of R_T.

The one-dimensional transform of a sinogram row is a slice of the full
spectrum,

    F_2[(R_T f)(a, .)](xi) = (F f)(-a xi, xi),

so the mixing map (Lambda u)(a, xi) = u(-a xi, xi) and its inverse
(Lambda^{-1} v)(y) = v(-y'/y_m, y_m) carry the problem between the two
domains. The inverse is singular at y_m = 0; a slab |y_m| <= gap is zeroed.
"""
from dataclasses import dataclass

import numpy as np
from scipy.signal import resample

from .fields import (ScalarField, SpectralField, UniformGrid, fourier_forward, fourier_inverse,
                     pad_field, sample_spectrum)
from .xform import Sinogram

COVERAGE_LIMIT = 0.10


@dataclass(frozen=True)
class MixingConfig:
    """gap: half-width of the zeroed slab |y_m| <= gap (None: two dual cells).
    radius: frequencies beyond this are outside the band of interest; they are
    neither requested nor counted for coverage (None: no limit).
    order: 3 for Catmull-Rom, 1 for linear resampling.
    refine: before resampling over a, refine the a-axes of the sinogram
    spectrum this many times by trigonometric interpolation (the rows must
    decay at the a-boundaries)."""

    gap: float = None
    radius: float = None
    order: int = 3
    refine: int = 1

    def __post_init__(self):
        if self.gap is not None and self.gap < 0:
            raise ValueError("gap must be non-negative")
        if self.refine < 1:
            raise ValueError("refine must be a positive integer")
        if self.order not in (1, 3):
            raise ValueError("order must be 1 or 3")

    def resolved_gap(self, dy):
        return 2 * dy if self.gap is None else float(self.gap)


def _coverage(outside, requested, what):
    n = int(requested.sum())
    miss = int((outside & requested).sum())
    frac = miss / n if n else 0.0
    if frac > COVERAGE_LIMIT:
        raise ValueError(f"{what}: {100 * frac:.1f}% of requested samples fall outside the "
                         f"available extent (limit {100 * COVERAGE_LIMIT:.0f}%)")
    return frac


def mixing_apply(U, a_grid, config=MixingConfig()):
    """(Lambda U)(a, xi) = U(-a xi, xi) on a_grid x (y_m axis of U)."""
    m = U.grid.dim
    if a_grid.dim != m - 1:
        raise ValueError("a-grid must have m-1 axes")
    xi = U.grid.axis(m - 1)
    grid = UniformGrid(m, a_grid.shape + (len(xi),), a_grid.origin + (xi[0],),
                       a_grid.spacing + (U.grid.spacing[-1],))
    a = a_grid.points()
    pts = np.concatenate([(-a[:, None, :] * xi[None, :, None]).reshape(-1, m - 1),
                          np.tile(xi, len(a))[:, None]], axis=1)
    req = np.ones(len(pts), bool)
    if config.radius is not None:
        req = np.tile(np.abs(xi) <= config.radius, len(a))
    vals, outside = sample_spectrum(U, pts[req], config.order)
    full = np.zeros(len(pts), np.complex128)
    full[req] = vals
    out_mask = np.zeros(len(pts), bool)
    out_mask[req] = outside
    frac = _coverage(out_mask, req, "mixing map")
    src = U.source
    sino = UniformGrid(m, grid.shape, a_grid.origin + (src.origin[-1],),
                       a_grid.spacing + (src.spacing[-1],))
    return SpectralField(grid, full, sino, (m - 1,),
                         {"outside_fraction": frac, "outside": out_mask.reshape(grid.shape)})


def mixing_invert(V, out_grid, config=MixingConfig(), keep_slab=False):
    """(Lambda^{-1} V)(y) = V(-y'/y_m, y_m) on the dual grid of out_grid.

    Nodes with |y_m| <= gap are zero unless keep_slab is set (y_m = 0 always
    is). The resampled energy that the slab removes is stored in meta.
    """
    m = V.grid.dim
    if out_grid.dim != m:
        raise ValueError("output grid must match the data dimension")
    dual = out_grid.dual()
    gap = config.resolved_gap(dual.spacing[-1])
    if gap >= np.max(np.abs(dual.axis(m - 1))):
        raise ValueError("gap must lie inside the dual y_m extent")
    y = dual.points()
    ym = y[:, -1]
    live = ym != 0
    if config.radius is not None:
        live &= np.sqrt(np.sum(y * y, axis=1)) <= config.radius
    pts = np.concatenate([-y[live, :-1] / ym[live, None], ym[live, None]], axis=1)
    vals, outside = sample_spectrum(V, pts, config.order)
    full = np.zeros(len(y), np.complex128)
    full[live] = vals
    slab = np.abs(ym) <= gap
    out_mask = np.zeros(len(y), bool)
    out_mask[live] = outside
    frac = _coverage(out_mask, live & ~slab, "inverse mixing map")
    cell = dual.cell_volume
    slab_energy = float(np.sum(np.abs(full[slab]) ** 2) * cell)
    if not keep_slab:
        full[slab] = 0.0
    meta = {"gap": gap, "outside_fraction": frac, "slab_energy": slab_energy,
            "energy": float(np.sum(np.abs(full) ** 2) * cell)}
    return SpectralField(dual, full, out_grid, tuple(range(m)), meta)


def sinogram_spectrum(phi):
    """F_2: the transform of every sinogram row along b."""
    return fourier_forward(phi, axes=(phi.grid.dim - 1,))


def refine_slopes(V, factor):
    """Trigonometric refinement of the a-axes of a sinogram spectrum."""
    if factor == 1:
        return V
    g = V.grid
    v = V.values
    shape, spacing = list(g.shape), list(g.spacing)
    for k in range(g.dim - 1):
        v = resample(v, factor * g.shape[k], axis=k)
        shape[k] *= factor
        spacing[k] /= factor
    grid = UniformGrid(g.dim, shape, g.origin, spacing)
    src = UniformGrid(g.dim, shape, tuple(g.origin[:-1]) + tuple(V.source.origin[-1:]),
                      tuple(spacing[:-1]) + tuple(V.source.spacing[-1:]))
    return SpectralField(grid, v, src, V.axes, V.meta)


def slice_residual(f, phi, config=MixingConfig(), pad=None, edge_tol=1e-7):
    """Compare F_2 phi with Lambda(F f) over the covered (a, xi) region.

    A sample is covered when (-a xi, xi) lies on the dual grid and its
    sinogram row has decayed below edge_tol (relative to the sinogram peak)
    at both ends of the b-axis, so that F_2 is not polluted by truncation.
    `pad` zero-pads the x' axes before transforming f so that the spectrum is
    resampled from a finer dual grid (default 4 for m = 2, 2 otherwise).
    Returns max and L2 residuals relative to the largest / total reference.
    """
    m = f.grid.dim
    if not isinstance(phi, Sinogram):
        phi = Sinogram(phi.grid, phi.values)
    if phi.m != m:
        raise ValueError("sinogram and field dimensions differ")
    if not np.allclose(phi.b_axis.spacing, f.grid.spacing[-1]) or \
            phi.b_axis.shape[0] != f.grid.shape[-1]:
        raise ValueError("sinogram b-axis must match the field's last axis")
    pad = (4 if m == 2 else 2) if pad is None else pad
    lhs = sinogram_spectrum(phi)
    U = fourier_forward(pad_field(f, [pad] * (m - 1) + [1]))
    cfg = MixingConfig(config.gap, config.radius, config.order)
    a_grid = phi.a_grid
    xi = lhs.grid.axis(m - 1)
    a = a_grid.points()
    pts = np.concatenate([(-a[:, None, :] * xi[None, :, None]).reshape(-1, m - 1),
                          np.tile(xi, len(a))[:, None]], axis=1)
    req = np.ones(len(pts), bool)
    if cfg.radius is not None:
        req &= np.tile(np.abs(xi) <= cfg.radius, len(a))
    rhs, outside = sample_spectrum(U, pts, cfg.order)
    rows = np.abs(phi.values.reshape(-1, xi.size))
    edge = np.maximum(rows[:, 0], rows[:, -1]) <= edge_tol * rows.max(initial=0.0)
    cov = req & ~outside & np.repeat(edge, xi.size)
    L = lhs.values.ravel()[cov]
    R = rhs[cov]
    scale = max(np.max(np.abs(R), initial=0.0), np.max(np.abs(L), initial=0.0))
    if scale == 0:
        return {"max": 0.0, "l2": 0.0, "covered": float(cov.mean())}
    d = L - R
    return {"max": float(np.max(np.abs(d)) / scale),
            "l2": float(np.linalg.norm(d) / max(np.linalg.norm(R), np.linalg.norm(L))),
            "covered": float(cov.mean())}


def invert_fourier(phi, out_grid, config=MixingConfig()):
    """f = F^{-1} Lambda^{-1} F_2 phi, with the slab |y_m| <= gap zeroed.

    Returns (field, report); the report carries the slab gap, the coverage
    and the resampled energy discarded in the slab.
    """
    V = refine_slopes(sinogram_spectrum(phi), config.refine)
    W = mixing_invert(V, out_grid, config)
    f = fourier_inverse(W)
    return ScalarField(out_grid, f.values), dict(W.meta)


def phi_membership(f, k_max=8, tol=1e-8):
    """Check that every x_m-moment up to k_max vanishes on every x' row.

    Moments are trapezoid sums over x_m normalised by the largest row sum of
    |f| |x_m|^k. Returns (member, normalised moments per order).
    """
    if k_max > 12:
        raise ValueError("moments above order 12 are too ill-conditioned to test")
    g = f.grid
    xm = g.axis(g.dim - 1)
    w = g.trapezoid_weights(g.dim - 1)
    v = f.values.reshape(-1, g.shape[-1])
    av = np.abs(v)
    moments = []
    for k in range(k_max + 1):
        pk = w * xm ** k
        num = np.max(np.abs(v @ pk), initial=0.0)
        den = np.max(av @ np.abs(pk), initial=0.0)
        moments.append(num / den if den > 0 else 0.0)
    return bool(max(moments) <= tol), moments
