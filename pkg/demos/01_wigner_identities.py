"""
Wigner matrices and the even/odd orthogonality sums
===================================================

Build a few D-matrices, compare with a brute-force matrix exponential and look
at what happens when the orthogonality sum is split by the parity of k.
"""

import math

import numpy as np

from wigmetro import (
    EulerAngles,
    HalfInt,
    ParitySelector,
    d_matrix,
    d_matrix_oracle,
    parity_orthogonality_contract,
    parity_orthogonality_matrix,
)

# a balanced beam splitter acts on spin 1/2 as a quarter turn about y
print(np.round(d_matrix("1/2", EulerAngles.ry(math.pi / 2)).entries.real, 6))

# quantum numbers are exact: HalfInt(11) is 11/2, floats are refused
# the fast kernel agrees with expm(-i beta J_y)
for tj in (4, 11, 20):
    fast = d_matrix(HalfInt(tj), EulerAngles.ry(1.1)).entries
    slow = d_matrix_oracle(HalfInt(tj), 1.1).entries
    print(f"2j={tj:2d}  max |fast - expm| = {np.abs(fast - slow).max():.1e}")

# keep only even k = j - mu at beta = pi/2: half of the identity survives on the diagonal
N = 5
even = parity_orthogonality_matrix(N, ParitySelector.EVEN, alpha=0.3, gamma=0.0)
print(np.round(even.real, 3))

# ... plus a signed copy on the anti-diagonal m' = -m, which the closed form predicts
ref = parity_orthogonality_contract(N, ParitySelector.EVEN, gamma=0.0)
print("closed form residual:", np.abs(even - ref).max())
