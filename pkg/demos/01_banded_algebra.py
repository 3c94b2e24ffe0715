"""Upper banded operators under the truncated product circ_k.

Everything lives in a finite box: entry j of the i-th upper diagonal sits at
position (j, j + i). Group elements are the identity outside the box.
"""
from fractions import Fraction

import numpy as np

from toda import UpperBanded, as_group, bracket_k, circ_k, exp_k, identity, inverse_k

# A 3-band operator with integer entries. circ_3 keeps only the first three
# diagonals of the ordinary product.
x = UpperBanded([[1, 2, 3, 4], [1, 1, 1], [0, 5]])
y = UpperBanded([[2, 2, 2, 2], [0, 1, 0], [1, 1]])
print("x circ y diagonals:", [d.tolist() for d in circ_k(x, y).diags])
dense = x.to_dense() @ y.to_dense()
print("same as the truncated dense product:", circ_k(x, y).allclose(UpperBanded.from_dense(dense, 3)))

# The commutator only sees off-diagonal structure, so its main diagonal is zero.
print("[x, y] main diagonal:", bracket_k(x, y)[0].tolist())

# Inversion is a forward recursion over the diagonals. With Fraction entries
# the round trip is exact.
g = as_group(UpperBanded([[Fraction(2), Fraction(-1), Fraction(3)], [Fraction(1), Fraction(1)], [Fraction(1)]]))
h = inverse_k(g)
print("g^-1 diagonals:", [[str(v) for v in d] for d in h.diags])
print("g circ g^-1 is the unit:", circ_k(g, h).equals(identity(3)))

# 1 - S^2 is invertible in the truncated algebra (its inverse is 1 + S^2)
# even though it has no bounded inverse on sequences.
g = as_group(UpperBanded([np.ones(5), np.zeros(4), -np.ones(3)]))
print("(1 - S^2)^-1 second diagonal:", inverse_k(g)[2])

# The exponential series lands in the group.
e = exp_k(UpperBanded([np.zeros(4), 0.1 * np.ones(3), np.zeros(2)]))
print("exp of 0.1 S, second diagonal (expect 0.005):", e[2])
