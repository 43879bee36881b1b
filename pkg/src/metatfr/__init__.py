"""Metaplectic time-frequency representations and covariance verification."""

__version__ = "0.1.0"

from .grid import Field, Grid, conjugate, gaussian, hermite, inner_product, l2_norm, tensor_product
from .shifts import rho, rho_power, weyl_phase
from .symplectic import (
    expected_phi_wigner,
    factor_generators,
    is_symplectic,
    random_symplectic,
    standard_J,
    symplectic_form,
    tensor_reorder_permutation,
)
from .metaplectic import MetaplecticOp, apply_metaplectic, collins_oracle, intertwining_residual
from .tfr import a_wigner, stft, wigner_direct, wigner_fast
from .covariance import BlackBoxTFR, certify, estimate_shift, negative_control, recover_phi
