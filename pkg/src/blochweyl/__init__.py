"""Bloch-Floquet fiber decomposition of periodic (magnetic) Weyl operators.

Plane-wave fiber matrices from the closed-form matrix-element formula,
toroidal distribution kernels and the symmetric Weyl quantization on the
torus, periodic zero-flux magnetic gauges, band structures, and independent
brute-force oracles for all of it.
"""

__version__ = "0.1.0"

from .fiber import DualWindow, FiberMatrix, band_periodicity_check, build_fiber_matrix, \
    hermiticity_defect
from .lattice import LatticeSpec, character_chi1, character_chi2, decompose_even_odd, \
    pairing, reduce_to_cell, reduce_to_double_cell
from .magnetic import MagneticField2Form, VectorPotential, curl, face_flux, \
    gradient_potential, lambda_phase, line_integral, magnetic_fiber_matrix, \
    minimal_coupling, zero_flux_defect
from .oracle import discrete_bfz, discrete_bloch_floquet, fd_bloch_spectrum, \
    supercell_identity_check
from .spectra import BandStructure, MomentumPath, band_smoothness_probe, bands, \
    eig_hermitian, truncation_convergence
from .symbols import CutoffProfile, PeriodicSymbol, TrigSeries, ellipticity_probe, \
    free_symbol, potential_symbol, schrodinger_symbol, seminorm_probe
from .torus_kernel import Amplitude, GridSpec, ToroidalKernel, ToroidalSymbolSeq, \
    apply_kernel, build_amplitude, build_kernel, difference_op, matrix_from_kernel, \
    quantize_kohn_nirenberg, quantize_symmetric, weyl_apply

__all__ = [name for name in dir() if not name.startswith("_")]
