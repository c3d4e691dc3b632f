"""
Three degenerate brackets for the planar oscillator
====================================================

Build the oscillator, construct the three rank-2 Poisson tensors from its
first integrals and compare them with the closed-form tables.
"""

import numpy as np

from nambupoisson import build_oscillator, golden_brackets, poisson_tensor, volume_density
from nambupoisson.oscillator import COORDINATES, PAIRS

osc = build_oscillator()
P0 = np.array([1.0, 1.0, 1.0, 0.0])   # x, y, px, py

# the volume density fixes the normalization of every tensor
print("sqrt g at P0 =", volume_density(osc, P0))

# %%
# Each tensor is antisymmetric with rank 2; the table below reads off the six
# independent entries and sets them next to the closed forms.

golden = golden_brackets(osc, P0)
for alpha in (1, 2, 3):
    J = poisson_tensor(osc, alpha, P0)
    print(f"J_{alpha}: rank {np.linalg.matrix_rank(J)}")
    for a, b in PAIRS:
        c = J[COORDINATES.index(a), COORDINATES.index(b)]
        print(f"  [{a:>2},{b:>2}]  constructed {c:+.6f}   closed form {golden[alpha][(a, b)]:+.6f}")

# %%
# Any of the three brackets generates the same motion as the usual Hamiltonian
# flow: J_alpha grad H^alpha is the canonical velocity for every alpha.

from nambupoisson import canonical_velocity, nambu_velocity

print("canonical:", canonical_velocity(osc, P0))
for alpha in (1, 2, 3):
    print(f"alpha={alpha}:  ", nambu_velocity(osc, alpha, P0))
