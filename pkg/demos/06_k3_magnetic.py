"""Three-band reduction: particles in a magnetic field.

Phase space gets an extra pair (q1, p1). The two-form picks up a non-canonical
term, which disappears after the momentum shift p1 -> p1 - nu e^{...} q1.
The Hamiltonians H_1 and H_2 are conserved along each other's flows.
"""
import numpy as np

from toda import PhasePoint, PhasePoint3, flaschka3, hamiltonians_k3, omega3_matrix, rk4_k3

rng = np.random.default_rng(6)
n = 4
pt = PhasePoint3(PhasePoint(rng.normal(scale=0.3, size=n), rng.normal(size=n)),
                 rng.normal(size=n - 1), rng.normal(size=n - 1))
nu = rng.uniform(0.5, 1.5, n - 2)

J = flaschka3(pt, nu)
print("J_3 diagonals:", [np.round(d, 4) for d in J.diags])

W = omega3_matrix(pt, nu)
print("Omega_3 antisymmetric:", np.allclose(W, -W.T), " nondegenerate:", abs(np.linalg.det(W)) > 1e-8)

for l in (1, 2):
    end = rk4_k3(pt, nu, l, 0.5, 100)
    drift = [abs(hamiltonians_k3(end, nu, m) - hamiltonians_k3(pt, nu, m)) for m in (1, 2)]
    print(f"flow of H_{l}: H_1 drift {drift[0]:.1e}, H_2 drift {drift[1]:.1e}")
