"""Solving the Toda hierarchy three independent ways.

The spectral path diagonalizes J(0), moves the masses by
mu_m(t) ~ mu_m(0) exp(2 sum_l lambda_m^l t_l) and rebuilds a Jacobi matrix.
The QR path factors exp(t M^l) = QR and conjugates by Q. RK4 integrates the
Lax equation directly. All three should agree to roundoff level.
"""
import time

import numpy as np

from toda import JacobiBanded, casimir, qr_flow, rk4_lax, toda_solve

J0 = JacobiBanded([0.2, 0.5, 0.3, 0.8, 0.6], [0.2, 0.1, 0.3, 0.15])
M0 = J0.to_dense()

for l in (1, 2, 3):
    t0 = time.perf_counter()
    sol = toda_solve(J0, {l: 1.0}).to_dense()
    t1 = time.perf_counter()
    qr = qr_flow(M0, l, 1.0)
    t2 = time.perf_counter()
    rk = rk4_lax(M0, l, 1.0, 2000)
    t3 = time.perf_counter()
    print(f"flow {l}: |spectral - qr| = {np.max(np.abs(sol - qr)):.1e}, "
          f"|spectral - rk4| = {np.max(np.abs(sol - rk)):.1e}  "
          f"({1e3 * (t1 - t0):.1f} ms, {1e3 * (t2 - t1):.1f} ms, {1e3 * (t3 - t2):.1f} ms)")

# Long times sort the diagonal: the off-diagonal decays and the diagonal
# approaches the eigenvalues in decreasing order. Close eigenvalues separate slowest.
late = toda_solve(J0, {1: 40.0})
print("diag at t=40:", np.round(late.diag, 6))
print("eigenvalues: ", np.round(np.sort(np.linalg.eigvalsh(M0))[::-1], 6))
print("offdiag at t=40:", late.offdiag)

# The Casimirs I_l = Tr(M^l)/l are constants of every flow.
M = toda_solve(J0, {1: 0.7, 2: -0.4, 3: 0.2}).to_dense()
print("I_1..I_4 drift:", [float(abs(casimir(M, m) - casimir(M0, m))) for m in range(1, 5)])

# Matrices outside (0, 1) are rescaled internally; the answer does not depend on it.
J1 = JacobiBanded([3.0, -1.0, 2.0], [1.5, 2.0])
a = toda_solve(J1, {2: 0.1}, normalize=True)
b = toda_solve(J1, {2: 0.1}, normalize=False)
print("normalized vs direct:", a.max_abs_diff(b))
