"""Fourier analysis on the paraboloid over finite fields: extension operators,
additive energy and the regular-function machinery, with numerical checks."""

__version__ = "0.1.0"

from .errors import ConsistencyError, ContractError, ResourceLimitError
from .field import FieldContext, additive_character, field, gauss_sum, quadratic_character
from .transform import GridFunction, Measure, convolve, fourier_forward, fourier_inverse, lp_norm
from .paraboloid import (
    ParaboloidGeometry,
    SurfaceFunction,
    build_paraboloid,
    dsigma_inverse_explicit,
    extension_operator,
    maximal_isotropic_subspace,
    restriction_operator,
)
from .energy import PointSubset, additive_energy, energy_bound_report, energy_extremizer_search
from .norms import NormEstimate, exact_norm_2_2, norm_lower_bound, scaling_scan
from .exponents import ExponentProfile, FieldClass, exponent_profile, necessary_exponents
from .machinery import (
    bochner_riesz_kernel,
    is_regular,
    l2_restriction_bounds,
    level_structure,
    regular_decomposition,
    slice_to_surface,
    verify_duality_identity,
    verify_slice_inequality,
)

__all__ = [
    "ConsistencyError",
    "ContractError",
    "ExponentProfile",
    "FieldClass",
    "FieldContext",
    "GridFunction",
    "Measure",
    "NormEstimate",
    "ParaboloidGeometry",
    "PointSubset",
    "ResourceLimitError",
    "SurfaceFunction",
    "additive_character",
    "additive_energy",
    "bochner_riesz_kernel",
    "build_paraboloid",
    "convolve",
    "dsigma_inverse_explicit",
    "energy_bound_report",
    "energy_extremizer_search",
    "exact_norm_2_2",
    "exponent_profile",
    "extension_operator",
    "field",
    "fourier_forward",
    "fourier_inverse",
    "gauss_sum",
    "is_regular",
    "l2_restriction_bounds",
    "level_structure",
    "lp_norm",
    "maximal_isotropic_subspace",
    "necessary_exponents",
    "norm_lower_bound",
    "quadratic_character",
    "regular_decomposition",
    "restriction_operator",
    "scaling_scan",
    "slice_to_surface",
    "verify_duality_identity",
    "verify_slice_inequality",
]
