"""Approximate inversion: wavelet backprojection and a truncated hypersingular integral.

Both methods reconstruct f as a limit. The wavelet route convolves the
backprojected data with a kernel of width t; the hypersingular route cuts a
ball of radius eps out of a finite-difference integral of backprojected data.
The error falls as t and eps shrink.
"""
import numpy as np

from transradon import UniformGrid, empty_sphere_sinogram, gaussian_phantom, radon_classical
from transradon.frac import point_grid
from transradon.invert import (HypersingularSpec, WaveletSpec, hyper_constant,
                               hypersingular_invert, kappa_wavelet, kernel_convolution_point,
                               riesz_data, wavelet_transform)

f = gaussian_phantom(UniformGrid.symmetric(2, 256, 8.0))
# data on the whole circle of directions, offsets t in [-10, 10]
sph = empty_sphere_sinogram(2, UniformGrid(1, (321,), (-10.0,), (1 / 16,)), 256)
Rf = radon_classical(f, sph, upsample=2)

spec = WaveletSpec(2, 1)
wav = kappa_wavelet(spec)
print(f"wavelet normalising constant {wav.gamma:.12f} (pi^2 = {np.pi ** 2:.12f})")
x = [0.3, -0.2]
for t in (1.0, 0.5):
    W = wavelet_transform(Rf, spec, point_grid(x), t=t).values.flat[0]
    K = kernel_convolution_point(f, spec, x, t=t)
    print(f"t={t}: from the sinogram {complex(W):.6f}, as f * k_t {complex(K):.6f}, "
          f"relative difference {abs(W - K) / abs(K):.1e}")

print(f"hypersingular constant d_2,1 = {hyper_constant(2, 1).real:.10f} (2 pi)")
h, Y, C = 1 / 32, 4.0, 2.0
n = int(round(2 * (C + Y) / h)) + 1
ext = UniformGrid(2, (n, n), (-(C + Y),) * 2, (h, h))
g = riesz_data(Rf, ext)
for eps in (0.5, 0.25, 0.125, 0.0625):
    rec, _ = hypersingular_invert(g, HypersingularSpec(2, 1, eps=eps, Y=Y))
    ref = gaussian_phantom(rec.grid).values
    print(f"eps={eps:<6}: rel L2 {np.linalg.norm(rec.values.real - ref) / np.linalg.norm(ref):.3f}")
