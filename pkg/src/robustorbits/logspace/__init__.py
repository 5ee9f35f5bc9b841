"""Certified logarithms and exponentials, the quotient metric and orbit distances."""
from .elementary import (arg_turns, atan_certified, cos_sin_turns, exp_certified,
                         exp_complex, log_certified, pi_certified)
from .metric import (PiApprox, QuotientPoint, delta_metric, delta_orbit,
                     exp_approx, h_distance, k_orbit_dist_bounds,
                     linear_form_in_logs, log_approx)

__all__ = [
    "PiApprox", "QuotientPoint", "arg_turns", "atan_certified", "cos_sin_turns",
    "delta_metric", "delta_orbit", "exp_approx", "exp_certified", "exp_complex",
    "h_distance", "k_orbit_dist_bounds", "linear_form_in_logs", "log_approx",
    "log_certified", "pi_certified",
]
