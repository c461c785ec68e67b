"""Order, type and subsequence growth functionals of entire functions."""

from .coeffs import (CoefficientSource, GroundTruth, IndexSequence, catalog, catalog_listing,
                     complement, parse_index_sequence, parse_source)
from .errors import EntireGrowthError
from .growth import (GrowthEstimate, order_from_coeffs, order_regression, theta_of_rho,
                     type_from_coeffs)
from .subseq import max_identity_check, rho_nu, sigma_nu, tau_nu, theta_nu
from .xarith import XComplex, XReal

__version__ = "0.1.0"

__all__ = [
    "CoefficientSource", "GroundTruth", "IndexSequence", "catalog", "catalog_listing",
    "complement", "parse_index_sequence", "parse_source", "EntireGrowthError",
    "GrowthEstimate", "order_from_coeffs", "order_regression", "theta_of_rho",
    "type_from_coeffs", "max_identity_check", "rho_nu", "sigma_nu", "tau_nu", "theta_nu",
    "XComplex", "XReal",
]
