"""From canonical particle coordinates to banded operators.

The Flaschka map sends (q, p) with weights nu to a lower bidiagonal operator
with p on the diagonal and nu e^{q_{i+k-1} - q_i} on the (k-1)-th subdiagonal.
It intertwines the group action on phase space with the coadjoint action,
and the canonical bracket of pulled-back linear functions matches the
Lie-Poisson bracket.
"""
import numpy as np

from toda import (
    NuWeight,
    PhasePoint,
    canonical_bracket,
    coadjoint_group,
    flaschka_map,
    linear_gradient,
    poisson_bracket_linear,
    sigma_action,
)
from toda.invariants import random_bidiag_group
from toda.multidiag_algebra import UpperBanded

rng = np.random.default_rng(0)
n, k = 6, 3
pt = PhasePoint(rng.normal(scale=0.5, size=n), rng.normal(size=n))
w = NuWeight(rng.uniform(0.5, 1.5, n - k + 1), k)
rho = flaschka_map(pt, w)
print("rho_0 =", np.round(rho.rho0, 4))
print("rho_2 =", np.round(rho.rho_km1, 4))

# Shifting every q by the same amount changes nothing (up to rounding in the exponent).
shifted = flaschka_map(PhasePoint(pt.q + 3.0, pt.p), w)
print("translation changes rho by", np.max(np.abs(shifted.rho_km1 - rho.rho_km1)))

# Equivariance: act on phase space, then map, or map, then act coadjointly.
g = random_bidiag_group(rng, n, k)
lhs = flaschka_map(sigma_action(g, pt, w), w).to_lower()
rhs = coadjoint_group(g, rho.to_lower())
print("equivariance residual:", lhs.max_abs_diff(rhs))

# Momentum map: brackets of linear functions agree on both sides.
def rand_x():
    return UpperBanded([rng.normal(size=n), np.zeros(n - 1), rng.normal(size=n - 2)], k)

x, y = rand_x(), rand_x()
left = canonical_bracket(linear_gradient(x, pt, w), linear_gradient(y, pt, w))
right = poisson_bracket_linear(x, y, rho.to_lower())
print(f"canonical bracket {left:.12f}, Lie-Poisson bracket {right:.12f}")
