"""Numerical laboratory for the one-soliton solution of the Kerr NLS equation."""

from .field import (
    ComplexField,
    Grid,
    WaveguideParams,
    fft_forward,
    fft_inverse,
    l2_norm_sq,
    max_abs_diff,
    wavenumbers,
)
from .propagator import StepperConfig, Trajectory, conserved_quantities, evolve, strang_step
from .soliton import (
    SolitonParams,
    ZSParams,
    constraint_residual,
    from_photon_number,
    photon_number,
    sech_spectrum,
    soliton_field,
)

__version__ = "0.1.0"
