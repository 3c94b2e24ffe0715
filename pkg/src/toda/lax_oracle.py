"""Dense-matrix oracles for the Toda flows.

Everything here works on plain N x N arrays (or stacks of them, shape
(..., N, N)) and shares no code with the closed-form paths.

Generator conventions. The symmetric generator built from M^power is
B = P_-(M^power) - P_-(M^power)^T, where P_- keeps the strictly lower part.
Flow l of the hierarchy written as dM/dt_l = [M, B] uses power = l, while
the same flow written as the Hamiltonian flow of I_l uses power = l - 1.
Callers always pass ``power`` explicitly. The lower generator is the
diagonal of M^power, and the lower flow of I_l uses power = l - 1.
"""

from __future__ import annotations

from typing import Literal

import numpy as np

Mode = Literal["symmetric", "lower"]


def _diag_part(m: np.ndarray) -> np.ndarray:
    d = np.einsum("...ii->...i", m)
    out = np.zeros_like(m)
    idx = np.arange(m.shape[-1])
    out[..., idx, idx] = d
    return out


def build_generator(M: np.ndarray, power: int, mode: Mode = "symmetric") -> np.ndarray:
    """B from M^power: P_-(.) - P_-(.)^T (symmetric) or the diagonal (lower)."""
    if power < 0:
        raise ValueError("power must be >= 0")
    M = np.asarray(M, float)
    mp = np.linalg.matrix_power(M, power)
    if mode == "symmetric":
        low = np.tril(mp, -1)
        return low - np.swapaxes(low, -1, -2)
    if mode == "lower":
        return _diag_part(mp)
    raise ValueError(f"unknown mode {mode!r}")


def lax_rhs(M: np.ndarray, power: int, mode: Mode = "symmetric") -> np.ndarray:
    """[M, B] (symmetric) or [B, M] (lower)."""
    B = build_generator(M, power, mode)
    if mode == "symmetric":
        return M @ B - B @ M
    return B @ M - M @ B


def rk4_lax(M0: np.ndarray, power: int, T: float, steps: int, mode: Mode = "symmetric") -> np.ndarray:
    """Classical RK4 for the Lax equation; re-symmetrizes after every step."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    M = np.array(M0, float)
    h = T / steps
    for _ in range(steps):
        k1 = lax_rhs(M, power, mode)
        k2 = lax_rhs(M + 0.5 * h * k1, power, mode)
        k3 = lax_rhs(M + 0.5 * h * k2, power, mode)
        k4 = lax_rhs(M + h * k3, power, mode)
        M = M + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if mode == "symmetric":
            M = 0.5 * (M + np.swapaxes(M, -1, -2))
    return M


def qr_flow(M0: np.ndarray, power: int, T: float) -> np.ndarray:
    """Factorization solution: exp(T M0^power) = Q R, M(T) = Q^T M0 Q.

    The exponential comes from the eigendecomposition of M0; R is made
    unique by forcing its diagonal positive.
    """
    M0 = np.asarray(M0, float)
    lam, V = np.linalg.eigh(M0)
    E = (V * np.exp(T * lam[..., None, :] ** power)) @ np.swapaxes(V, -1, -2)
    Q, R = np.linalg.qr(E)
    sgn = np.sign(np.einsum("...ii->...i", R))
    sgn[sgn == 0] = 1
    Q = Q * sgn[..., None, :]
    out = np.swapaxes(Q, -1, -2) @ M0 @ Q
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def casimir(M: np.ndarray, l: int) -> float:
    """I_l = Tr(M^l) / l."""
    if l < 1:
        raise ValueError("l must be >= 1")
    return np.trace(np.linalg.matrix_power(np.asarray(M, float), l), axis1=-2, axis2=-1) / l
