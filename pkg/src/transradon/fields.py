"""Uniform grids, sampled fields and Fourier transforms.

The Fourier transform uses the convention

    (F f)(y) = integral f(x) exp(+i x.y) dx,

with the factor (2 pi)^{-k} carried by the inverse over k axes. Discrete
versions are DFTs scaled by the cell size and modulated by the phase of the
grid origin, so transform pairs are reproduced to rounding for well-resolved
functions.
"""
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from . import _kernels

_default_threads = 1


def set_threads(n):
    """Set the default worker count used by transforms and quadratures."""
    global _default_threads
    _default_threads = max(1, int(n))


def get_threads(n=None):
    """Worker count: TRANSRADON_THREADS overrides the explicit or default value."""
    env = os.environ.get("TRANSRADON_THREADS")
    if env:
        return max(1, int(env))
    return _default_threads if n is None else max(1, int(n))


@dataclass(frozen=True)
class UniformGrid:
    """Cartesian grid with nodes origin[k] + spacing[k] * j, j < shape[k]."""

    dim: int
    shape: tuple
    origin: tuple
    spacing: tuple

    def __post_init__(self):
        shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        spacing = tuple(float(h) for h in np.atleast_1d(self.spacing))
        if self.dim < 1 or not (len(shape) == len(origin) == len(spacing) == self.dim):
            raise ValueError("grid shape, origin and spacing must all have length dim")
        if any(s < 2 for s in shape):
            raise ValueError("every axis needs at least two samples")
        if not all(np.isfinite(h) and h > 0 for h in spacing):
            raise ValueError("spacings must be finite and positive")
        if not all(np.isfinite(o) for o in origin):
            raise ValueError("origin must be finite")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def symmetric(cls, dim, n, half_extent):
        """Grid of n nodes per axis covering [-half_extent, half_extent]."""
        h = 2.0 * half_extent / (n - 1)
        return cls(dim, (n,) * dim, (-half_extent,) * dim, (h,) * dim)

    @classmethod
    def from_axes(cls, *axes):
        """Stack 1-d grids into a product grid."""
        return cls(len(axes), [a.shape[0] for a in axes], [a.origin[0] for a in axes],
                   [a.spacing[0] for a in axes])

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def extent(self):
        return tuple(h * (n - 1) for h, n in zip(self.spacing, self.shape))

    @property
    def upper(self):
        return tuple(o + e for o, e in zip(self.origin, self.extent))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axis(self, k):
        return self.origin[k] + self.spacing[k] * np.arange(self.shape[k])

    def axis_grid(self, k):
        return UniformGrid(1, (self.shape[k],), (self.origin[k],), (self.spacing[k],))

    def sub(self, axes):
        axes = tuple(axes)
        return UniformGrid(len(axes), [self.shape[k] for k in axes],
                           [self.origin[k] for k in axes], [self.spacing[k] for k in axes])

    def mesh(self):
        """Broadcastable coordinate arrays, one per axis."""
        return np.meshgrid(*[self.axis(k) for k in range(self.dim)], indexing="ij", sparse=True)

    def points(self):
        """All nodes as an (size, dim) array in row-major order."""
        mesh = np.meshgrid(*[self.axis(k) for k in range(self.dim)], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def dual(self, axes=None):
        """Grid whose listed axes are replaced by their centred frequency axes."""
        axes = range(self.dim) if axes is None else axes
        shape, origin, spacing = list(self.shape), list(self.origin), list(self.spacing)
        for k in axes:
            dy = 2.0 * np.pi / (self.shape[k] * self.spacing[k])
            origin[k] = -(self.shape[k] // 2) * dy
            spacing[k] = dy
        return UniformGrid(self.dim, shape, origin, spacing)

    def trapezoid_weights(self, k):
        w = np.full(self.shape[k], self.spacing[k])
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def header(self):
        return {"dim": self.dim, "shape": list(self.shape), "origin": list(self.origin),
                "spacing": list(self.spacing)}


def _as_values(grid, values):
    v = np.asarray(values)
    if v.size != grid.size:
        raise ValueError(f"expected {grid.size} values for grid shape {grid.shape}, got {v.size}")
    return np.ascontiguousarray(v.reshape(grid.shape), dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Complex samples of a function on a uniform grid (row-major)."""

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.grid, self.values))

    @property
    def flat(self):
        return self.values.ravel()

    def is_real(self, tol=1e-12):
        scale = np.max(np.abs(self.values)) if self.values.size else 0.0
        return bool(np.max(np.abs(self.values.imag), initial=0.0) <= tol * scale)

    def with_values(self, values):
        return type(self)(self.grid, values)

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier samples on a grid whose `axes` are frequency axes.

    `source` is the real-space grid the transform came from; the inverse uses
    its origin for the phase factor.
    """

    grid: UniformGrid
    values: np.ndarray
    source: UniformGrid
    axes: tuple
    meta: dict = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.grid, self.values))
        object.__setattr__(self, "axes", tuple(int(k) for k in self.axes))
        object.__setattr__(self, "meta", dict(self.meta or {}))

    def with_values(self, values):
        return SpectralField(self.grid, values, self.source, self.axes, self.meta)

    def frequency(self, k):
        return self.grid.axis(k)


def _check_axes(dim, axes):
    axes = tuple(range(dim)) if axes is None else tuple(sorted({int(k) for k in np.atleast_1d(axes)}))
    if not axes:
        raise ValueError("at least one axis must be transformed")
    for k in axes:
        if not 0 <= k < dim:
            raise ValueError(f"axis {k} out of range for a {dim}-d grid")
    return axes


def _origin_phase(grid, dual, axes, sign):
    ph = np.ones((1,) * grid.dim, np.complex128)
    for k in axes:
        shp = [1] * grid.dim
        shp[k] = grid.shape[k]
        ph = ph * np.exp(sign * 1j * dual.axis(k) * grid.origin[k]).reshape(shp)
    return ph


def fourier_forward(f, axes=None, threads=None):
    """Approximate integral f(x) exp(+i x.y) dx over the selected axes."""
    grid = f.grid
    axes = _check_axes(grid.dim, axes)
    if not np.all(np.isfinite(f.values)):
        raise ValueError("field contains non-finite samples")
    dual = grid.dual(axes)
    scale = np.prod([grid.shape[k] * grid.spacing[k] for k in axes])
    v = sfft.ifftn(f.values, axes=axes, workers=get_threads(threads)) * scale
    v = np.fft.fftshift(v, axes=axes) * _origin_phase(grid, dual, axes, +1)
    return SpectralField(dual, v, grid, axes)


def fourier_inverse(F, axes=None, threads=None):
    """Inverse of `fourier_forward`, with (2 pi)^{-k} over k axes.

    `axes` defaults to every axis that is currently a frequency axis.
    """
    src = F.source
    axes = F.axes if axes is None else _check_axes(src.dim, axes)
    for k in axes:
        if k not in F.axes:
            raise ValueError(f"axis {k} is not a frequency axis")
    if not np.all(np.isfinite(F.values)):
        raise ValueError("spectrum contains non-finite samples")
    v = F.values * _origin_phase(src, F.grid, axes, -1)
    v = sfft.fftn(np.fft.ifftshift(v, axes=axes), axes=axes, workers=get_threads(threads))
    v /= np.prod([src.shape[k] * src.spacing[k] for k in axes])
    rest = tuple(k for k in F.axes if k not in axes)
    if rest:
        shape, origin, spacing = list(F.grid.shape), list(F.grid.origin), list(F.grid.spacing)
        for k in axes:
            origin[k], spacing[k] = src.origin[k], src.spacing[k]
        return SpectralField(UniformGrid(src.dim, shape, origin, spacing), v, src, rest)
    return ScalarField(src, v)


def pad_field(f, factors):
    """Embed f in a grid `factors` times larger per axis, filled with zeros.

    The original nodes keep their coordinates; padding is split evenly on
    both sides. Transforming the padded field samples the spectrum on a
    proportionally finer dual grid.
    """
    factors = np.broadcast_to(np.asarray(factors, int), (f.grid.dim,))
    g = f.grid
    pads, shape, origin = [], [], []
    for k, r in enumerate(factors):
        extra = (r - 1) * g.shape[k]
        lo = extra // 2
        pads.append((lo, extra - lo))
        shape.append(g.shape[k] + extra)
        origin.append(g.origin[k] - lo * g.spacing[k])
    return ScalarField(UniformGrid(g.dim, shape, origin, g.spacing), np.pad(f.values, pads))


def gaussian_phantom(grid, center=None, width=1.0):
    """Samples of exp(-|x - center|^2 / width^2)."""
    if not width > 0:
        raise ValueError("width must be positive")
    center = np.zeros(grid.dim) if center is None else np.asarray(center, float)
    if center.shape != (grid.dim,):
        raise ValueError("center must have one coordinate per axis")
    r2 = sum((x - c) ** 2 for x, c in zip(grid.mesh(), center))
    return ScalarField(grid, np.exp(-r2 / width ** 2))


def slab_cutoff(ym, rho_lo, gap, eps=1e-16):
    """Cutoff (1 - exp(-ym^2/rho_lo^2))^q, exactly zero for |ym| <= gap.

    q is the smallest power that makes the cutoff at |ym| = gap fall below
    eps, so the jump left by the exact zeroing is at rounding level. Being a
    finite sum of Gaussians, the cutoff keeps Gaussian-type spatial tails.
    """
    if not 0 < gap < rho_lo:
        raise ValueError("gap must be positive and below rho_lo")
    q = int(np.ceil(np.log(eps) / np.log1p(-np.exp(-(gap / rho_lo) ** 2))))
    c = (-np.expm1(-(np.asarray(ym) / rho_lo) ** 2)) ** q
    return np.where(np.abs(ym) <= gap, 0.0, c)


def phi_space_spectrum(grid, band, gap, seed=0, bumps=3, spread=0.2):
    """Spectral window of `phi_space_phantom` on the dual grid of `grid`.

    The window is a Gaussian radial envelope that reaches rounding level at
    |y| = band[1], times `slab_cutoff` in y_m (which suppresses |y_m| below
    band[0] and is exactly zero on |y_m| <= gap), times the phases of a few
    randomly placed real bumps. It is Hermitian, so its inverse is real.
    """
    lo, hi = (float(b) for b in band)
    if not 0 < lo < hi:
        raise ValueError("band must satisfy 0 < rho_lo < rho_hi")
    dual = grid.dual()
    nyq = min(dual.spacing[k] * (grid.shape[k] // 2) for k in range(grid.dim))
    if hi > nyq:
        raise ValueError(f"band edge {hi:g} exceeds the dual-grid radius {nyq:g}")
    if gap >= nyq:
        raise ValueError("gap must lie inside the dual grid")
    rng = np.random.default_rng(seed)
    half = np.array(grid.extent) / 2
    mid = np.array(grid.origin) + half
    centers = mid + spread * half * rng.uniform(-1, 1, size=(bumps, grid.dim))
    amps = rng.normal(size=bumps)
    amps[0] = abs(amps[0]) + 1.0
    y = dual.mesh()
    w = hi / np.sqrt(2 * np.log(1e16))
    env = np.exp(-sum(yk ** 2 for yk in y) / (2 * w ** 2)) * slab_cutoff(y[-1], lo, gap)
    phase = sum(a * np.exp(1j * sum(yk * ck for yk, ck in zip(y, c))) for a, c in zip(amps, centers))
    W = env * phase
    # drop unpaired Nyquist planes so that W(-y) = conj(W(y)) holds node for node
    for k in range(grid.dim):
        if grid.shape[k] % 2 == 0:
            idx = [slice(None)] * grid.dim
            idx[k] = 0
            W[tuple(idx)] = 0.0
    return SpectralField(dual, W, grid, tuple(range(grid.dim)))


def phi_space_phantom(grid, band, gap, seed=0, **kw):
    """Real field whose spectrum vanishes identically on |y_m| <= gap."""
    f = fourier_inverse(phi_space_spectrum(grid, band, gap, seed, **kw))
    return ScalarField(grid, f.values)


def integrate(f, weight=None):
    """Trapezoid-rule integral of weight(x) f(x) over the grid.

    `weight` is called with the broadcastable coordinate arrays of the grid.
    """
    grid = f.grid
    v = f.values
    if weight is not None:
        wv = np.broadcast_to(np.asarray(weight(*grid.mesh())), grid.shape)
        if not np.all(np.isfinite(wv)):
            raise ValueError("weight has non-finite values")
        v = v * wv
    for k in range(grid.dim - 1, -1, -1):
        v = np.sum(v * grid.trapezoid_weights(k), axis=-1)
    return complex(v)


def sample_grid(values, grid, points, order=3, threads=None):
    """Interpolate array samples on `grid` at scattered points.

    Returns (values, outside); points beyond the grid extent give 0.
    """
    pts = np.atleast_2d(np.asarray(points, float))
    if pts.shape[1] != grid.dim:
        raise ValueError("points must have one coordinate per grid axis")
    if np.isnan(pts).any():
        raise ValueError("NaN in sample coordinates")
    if order not in (1, 3):
        raise ValueError("order must be 1 (linear) or 3 (cubic)")
    return _kernels.sample_nd(np.asarray(values).reshape(grid.shape), grid.origin, grid.spacing,
                              pts, order, get_threads(threads))


def sample_spectrum(F, points, order=3, threads=None):
    """Catmull-Rom (or linear) resampling of a spectrum at off-grid frequencies.

    Returns (values, extrapolated) where `extrapolated` flags points outside
    the dual-grid extent, whose values are 0.
    """
    return sample_grid(F.values, F.grid, points, order, threads)
