"""Lattices, CVP and subspace-to-lattice distance solvers."""
from .cvp import (CvpInstance, DistanceEstimate, Lattice, babai_nearest_plane,
                  closest_vector, cvp_exact, max_enum_dim)
from .lll import is_lll_reduced, lll_reduce, lll_reduce_rows
from .sldp import (SldpInstance, SldpWitness, affine_lattice_nonempty,
                   projected_lattice_basis, sldp_exact, sldp_exact_witness,
                   sldp_h_based, sldp_lll)

__all__ = [
    "CvpInstance", "DistanceEstimate", "Lattice", "SldpInstance", "SldpWitness",
    "affine_lattice_nonempty", "babai_nearest_plane", "closest_vector",
    "cvp_exact", "is_lll_reduced", "lll_reduce", "lll_reduce_rows",
    "max_enum_dim", "projected_lattice_basis", "sldp_exact",
    "sldp_exact_witness", "sldp_h_based", "sldp_lll",
]
