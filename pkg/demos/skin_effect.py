"""
Skin effect on an open Hatano-Nelson chain
==========================================

Asymmetric hopping piles every open-chain eigenstate against one edge.
The propagating factors z1, z2 of each state share one modulus, and
that modulus sets the decay rate along the chain.
"""
from __future__ import annotations

import numpy as np

from gflattice import ModelSpec, solve
from gflattice.solvers import verify_cancellation
from gflattice.topology import gbz_radius, winding_W

chain = ModelSpec.hn(tL=1.0, tR=0.6, N=20)
res = solve(chain)

# every state is pinned to the circle |z| = sqrt(tL/tR)
print("circle radius       ", gbz_radius(chain))
print("spread of |z1|      ", np.ptp([abs(p.z1) for p in res.pairs]))
print("tags of state 0     ", res.pairs[0].tags)

# amplitudes decay geometrically from left to right
psi = np.abs(res.pairs[0].psi)
print("|psi| at sites 1, 10, 20:", psi[[0, 9, 19]].round(5))

# the same hoppings on a ring: no skin, |z2| = 1 everywhere
ring = solve(ModelSpec.hn(1.0, 0.6, 20, "pbc"))
print("ring max ||z2| - 1| ", max(abs(abs(p.z2) - 1) for p in ring.pairs))

# winding of the bulk kernel around the unit circle flags the direction
print("W(E=0)              ", winding_W(chain, 0.0).value)
print("W(E=0), mirrored    ", winding_W(ModelSpec.hn(0.6, 1.0, 20), 0.0).value)

# zero cancellation: each kernel zero has a numerator zero sitting on top of it
rep = verify_cancellation(chain, res.pairs[3])
for row in rep["pairing"]:
    print(f"Q-zero {row['q_zero']:.6f}  nearest P-zero distance {row['distance']:.1e}")
