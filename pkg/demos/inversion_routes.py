"""Several ways back from a sinogram to the field.

A band-limited phantom whose spectrum vanishes near y_m = 0 is transformed
and reconstructed by the Fourier-slice route, by backprojection followed by a
fractional derivative in x_m, and (in three dimensions) by the Heisenberg
inversion formula. All routes should agree with the phantom.
"""
import numpy as np

from transradon import (MixingConfig, UniformGrid, invert_derivative_odd, invert_fourier,
                        invert_heisenberg, invert_semyanistyi, phi_space_phantom,
                        radon_transversal, sinogram_grid)


def phantom(m, n, band, seed):
    g = UniformGrid.symmetric(m, n, 8.0)
    dual = g.dual()
    nyq = dual.spacing[0] * (n // 2)
    f = phi_space_phantom(g, (band[0] * nyq, band[1] * nyq), 2 * dual.spacing[-1], seed=seed)
    return g, f, nyq


def rel(u, v):
    return np.linalg.norm(u - v) / np.linalg.norm(v)


# plane
g, f, nyq = phantom(2, 256, (0.1, 0.3), seed=0)
phi = radon_transversal(f, sinogram_grid(2, g.axis_grid(1), 10.0, 1281), upsample=2)
rec, rep = invert_fourier(phi, g, MixingConfig(gap=0.5, radius=0.3 * nyq))
print(f"m=2 Fourier slice:        rel L2 {rel(rec.values, f.values):.2e}")
rec = invert_semyanistyi(phi, g, alpha=-1.0, beta=0.0)
print(f"m=2 backprojection + D^1: rel L2 {rel(rec.values, f.values):.2e}")

# space: the three placements of the derivative give the same field
g, f, nyq = phantom(3, 64, (0.3, 0.75), seed=1)
phi = radon_transversal(f, sinogram_grid(3, g.axis_grid(2), 3.0, 49), upsample=4)
recs = {p: invert_derivative_odd(phi, g, p, refine=4) for p in ("post", "pre", "split")}
for p, r in recs.items():
    print(f"m=3 derivative ({p:5s}):   rel L2 {rel(r.values, f.values):.2e}")
h = invert_heisenberg(phi, g, "derivative", refine=4)
print(f"m=3 Heisenberg formula:   rel L2 {rel(h.values, f.values):.2e}")
print(f"with the sign flipped:    rel L2 {rel(-h.values, f.values):.2f}")
