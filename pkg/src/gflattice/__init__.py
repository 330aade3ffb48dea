"""Lattice eigenproblems solved through rational generating functions.

Site amplitudes of a tight-binding eigenstate are the Taylor coefficients of
G(z) = P(z)/Q(z); requiring every zero of the bulk kernel Q to be cancelled
by the boundary numerator P selects the eigenvalues.
"""

from .errors import (ConfigError, GFLatticeError, MissedRoots, NonConvergence, NumericalFailure,
                     UnsupportedCombination)
from .genfunc import RationalGF, coefficients, rescale, shift_tail
from .models import Boundary, Impurity, Kind, ModelSpec, dense_matrix, kernel_Q, kernel_roots, numerator_P
from .oracle import det_at, oracle_eigenvector, oracle_spectrum
from .poly import ComplexPoly, roots
from .solvers import EigenPair, SpectralResult, solve, verify_cancellation
from .topology import gbz_radius, winding_nuA, winding_W

__version__ = "0.1.0"

__all__ = [
    "Boundary", "ComplexPoly", "ConfigError", "EigenPair", "GFLatticeError", "Impurity", "Kind",
    "MissedRoots", "ModelSpec", "NonConvergence", "NumericalFailure", "RationalGF", "SpectralResult",
    "UnsupportedCombination", "coefficients", "dense_matrix", "det_at", "gbz_radius", "kernel_Q",
    "kernel_roots", "numerator_P", "oracle_eigenvector", "oracle_spectrum", "rescale", "roots",
    "shift_tail", "solve", "verify_cancellation", "winding_W", "winding_nuA",
]
