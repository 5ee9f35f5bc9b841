"""Exact integer and rational linear algebra."""
from .certified import Certified, round_dyadic, sqrt_lower, sqrt_upper
from .gaussian import GaussianRational, as_gaussian_vector
from .matrix import (as_int_matrix, as_rat_matrix, as_rat_vector, det, dot,
                     gram_schmidt, identity, inverse, matmul, matvec, norm2,
                     nullspace, rank, transpose)
from .normal_forms import (hnf, hnf_basis, invariant_factors, is_saturated,
                           kernel_lattice_basis, snf, solve_integer)
from .spectral import RankError, sigma_bounds, sigma_max_upper, sigma_min_2approx

__all__ = [
    "Certified", "GaussianRational", "RankError",
    "as_gaussian_vector", "as_int_matrix", "as_rat_matrix", "as_rat_vector",
    "det", "dot", "gram_schmidt", "hnf", "hnf_basis", "identity",
    "invariant_factors", "inverse", "is_saturated", "kernel_lattice_basis",
    "matmul", "matvec", "norm2", "nullspace", "rank", "round_dyadic",
    "sigma_bounds", "sigma_max_upper", "sigma_min_2approx", "snf",
    "solve_integer", "sqrt_lower", "sqrt_upper", "transpose",
]
