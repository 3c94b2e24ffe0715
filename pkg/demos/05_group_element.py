"""The bidiagonal group element that carries J(0) to J(t).

Its entries are ratios of Hankel determinants at times 0 and t. Acting by
coadjoint conjugation on J(0) reproduces the spectral solution.
"""
import numpy as np

from toda import group_element, reconstruct_from_group, toda_solve
from toda.invariants import random_jacobi

rng = np.random.default_rng(5)
J = random_jacobi(rng, 5)
for t in ({}, {1: 0.5}, {1: 1.0, 2: -0.5}):
    g = group_element(J, t)
    err = reconstruct_from_group(J, g).max_abs_diff(toda_solve(J, t))
    print(f"t = {t}: g diagonal {np.round(g[0], 4)}, reconstruction error {err:.1e}")
