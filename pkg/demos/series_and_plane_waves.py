"""
Recurrences as rational functions, and plane waves on infinite lattices
=======================================================================

The Fibonacci numbers are the Taylor coefficients of z/(1 - z - z^2);
the roots of the denominator give Binet's closed form. On an infinite
lattice a damped plane wave still has a rational generating function,
and pairing it with the bulk operator measures distance from the band.
"""
from __future__ import annotations

import numpy as np

from gflattice.genfunc import RationalGF, coefficients, shift_tail
from gflattice.infinite import residual_table
from gflattice.poly import ComplexPoly

fib = RationalGF(ComplexPoly([0, 1]), ComplexPoly([1, -1, -1]))
b = coefficients(fib, 20).coeffs.real.round().astype(int)
print("Fibonacci:", b.tolist())

# dropping the first two terms leaves the same recurrence with a new numerator
tail = shift_tail(fib, 2, b[:2])
print("tail numerator:", tail.P.coeffs.real.tolist())

# plane wave residual at E = 2t cos k, shrinking with the damping
for dim, k in ((1, 0.7), (2, (0.7, 1.9))):
    E = 2 * float(np.sum(np.cos(k)))
    for rho, r in residual_table(k, 1.0, E, dim=dim):
        print(f"dim={dim} rho={rho:<6} residual={r:.3e}")
