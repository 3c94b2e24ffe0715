"""Moments, the tau function and the inverse problem.

The moments sigma_k = sum_m mu_m lambda_m^k of the spectral measure evolve by
a closed quadratic system, and tau(t) = sum_m mu_m(0) exp(2 sum_l lambda_m^l t_l)
solves a linear system of PDEs. The Jacobi matrix can be rebuilt from the
moments alone through Hankel determinants, which needs extended precision.
"""
import numpy as np

from toda import (
    JacobiBanded,
    evolve_spectral,
    jacobi_from_moments,
    jacobi_from_spectral,
    moments,
    spectral_decompose,
    tau_eval,
    weyl_eval,
    weyl_laurent,
)
from toda.invariants import hirota_residual, moment_ode_residual, random_jacobi

rng = np.random.default_rng(4)
J = random_jacobi(rng, 6)
sd = spectral_decompose(J)
print("eigenvalues:", np.round(sd.lambdas, 5))
print("masses:     ", np.round(sd.mus, 5), "sum", sd.mus.sum())

# d sigma_k / dt_l = 2 (sigma_{k+l} - sigma_l sigma_k), checked by central differences.
print("moment ODE residual:", moment_ode_residual(sd))
print("tau PDE residual:   ", hirota_residual(sd))
print("tau at t_1 = 0.5:", tau_eval(sd, {1: 0.5}))

# Two inverse routes. Lanczos is the stable one; the Hankel route works
# here because the moments are summed exactly in mpmath.
Js = jacobi_from_spectral(sd)
Jh = jacobi_from_moments(moments(sd, 11, dps=60), 6)
print("Lanczos error:", Js.max_abs_diff(J), " Hankel error:", Jh.max_abs_diff(J))

# In plain double precision the Hankel route degrades quickly with N.
Jd = jacobi_from_moments(moments(sd, 11), 6)
print("Hankel with float moments:", Jd.max_abs_diff(J))

# The Weyl function and its expansion at infinity.
print("Weyl at z=10:", weyl_eval(sd, 10.0), "Laurent sum:", weyl_laurent(moments(sd, 20), 10.0))

# Mass flows toward the largest eigenvalue as t_1 grows.
for t in (0.0, 2.0, 10.0):
    print(f"t_1 = {t:4}: mu =", np.round(evolve_spectral(sd, {1: t}).mus, 4))

# Small hand example: sigma = (1, 0, 1, 0) is the measure (delta_-1 + delta_1)/2.
from toda import MomentSeq
print(jacobi_from_moments(MomentSeq([1, 0, 1, 0])).to_dense())
