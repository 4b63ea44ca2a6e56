"""Transversal and Heisenberg Radon transforms on uniform grids."""
from .fields import (UniformGrid, ScalarField, SpectralField, fourier_forward, fourier_inverse,
                     gaussian_phantom, phi_space_phantom, integrate, sample_spectrum)
from .xform import (Sinogram, sinogram_grid, radon_transversal, radon_heisenberg,
                    dual_transversal, backprojection, radon_classical, empty_sphere_sinogram)
from .slice import MixingConfig, invert_fourier, slice_residual
from .frac import riesz_potential, riesz_partial, riesz_partial_derivative, hilbert_last
from .invert import (invert_semyanistyi, invert_derivative_odd, invert_laplacian_odd,
                     invert_heisenberg, cbp_reconstruct, hypersingular_invert)

__all__ = ["UniformGrid", "ScalarField", "SpectralField", "fourier_forward", "fourier_inverse",
           "gaussian_phantom", "phi_space_phantom", "integrate", "sample_spectrum",
           "Sinogram", "sinogram_grid", "radon_transversal", "radon_heisenberg",
           "dual_transversal", "backprojection", "radon_classical", "empty_sphere_sinogram",
           "MixingConfig", "invert_fourier", "slice_residual",
           "riesz_potential", "riesz_partial", "riesz_partial_derivative", "hilbert_last",
           "invert_semyanistyi", "invert_derivative_odd", "invert_laplacian_odd",
           "invert_heisenberg", "cbp_reconstruct", "hypersingular_invert"]
