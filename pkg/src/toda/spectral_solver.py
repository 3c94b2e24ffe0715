"""Closed-form solution of the Toda hierarchy through spectral data.

A Jacobi matrix J (diagonal b, positive off-diagonal a) is encoded by its
eigenvalues lambda_m and masses mu_m (squared first eigenvector components).
Flow l of the hierarchy, dJ/dt_l = [J, B_l] with B_l = P_-(J^l) - P_-(J^l)^T,
keeps lambda fixed and moves the masses as

    mu_m(t) = mu_m(0) exp(2 sum_l lambda_m^l t_l) / (normalization),

so solving means: decompose, update masses, rebuild J from (lambda, mu(t)).
The rebuild uses Lanczos/Stieltjes orthogonalization against the discrete
measure sum_m mu_m delta_{lambda_m}. The Hankel-determinant inverse is kept
as an independent high-precision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping, Optional, Sequence, Union

import mpmath
import numpy as np
import scipy.linalg

from .diag_algebra import _as_array, pad, s_up
from .lie_poisson import LowerBanded, coadjoint_group
from .multidiag_algebra import GroupElement, UpperBanded, as_group


class DegenerateSpectrumError(ValueError):
    """Two eigenvalues closer than the simplicity threshold."""


class SplitBlockError(ValueError):
    """A zero off-diagonal entry splits the matrix into independent blocks."""


class InvalidMomentsError(ValueError):
    """Hankel matrix of the moments is not positive definite."""


class PoleError(ValueError):
    """Weyl function evaluated at an eigenvalue."""


GAP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class JacobiBanded:
    """Symmetric banded matrix: main diagonal plus a mirrored band.

    For k = 2 this is a Jacobi matrix with ``offdiag`` on the first
    off-diagonal. For k > 2 ``offdiag`` sits on off-diagonal k - 1.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    k: int = 2

    def __init__(self, diag, offdiag=(), k: int = 2):
        d = np.asarray(_as_array(diag), float)
        n = len(d)
        o = np.asarray(pad(_as_array(offdiag), max(n - k + 1, 0)), float)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", o)
        object.__setattr__(self, "k", k)

    @property
    def N(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        j = self.k - 1
        return np.diag(self.diag) + np.diag(self.offdiag, j) + np.diag(self.offdiag, -j)

    @classmethod
    def from_dense(cls, m: np.ndarray, k: int = 2) -> "JacobiBanded":
        m = np.asarray(m, float)
        return cls(np.diag(m).copy(), np.diag(m, -(k - 1)).copy(), k)

    def to_lower(self) -> LowerBanded:
        return LowerBanded([self.diag] + [np.zeros(0)] * (self.k - 2) + [self.offdiag], self.k)

    @classmethod
    def from_lower(cls, rho: LowerBanded) -> "JacobiBanded":
        n = rho.size
        b = rho.boxed(n)
        return cls(b[0], b[-1], rho.k)

    def max_abs_diff(self, other: "JacobiBanded") -> float:
        return float(np.max(np.abs(self.to_dense() - other.to_dense()), initial=0.0))


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalues (strictly increasing), masses (positive, sum 1), eigmatrix.

    ``eigmatrix[l, m] = P_l(lambda_m)``: column m is the eigenvector for
    lambda_m scaled to first entry 1, so that J O = O diag(lambda) and
    O diag(mu) O^T = 1.
    """

    lambdas: np.ndarray
    mus: np.ndarray
    eigmatrix: Optional[np.ndarray] = None

    def __init__(self, lambdas, mus, eigmatrix=None, check: bool = True):
        lam = np.asarray(lambdas, float).reshape(-1)
        mu = np.asarray(mus, float).reshape(-1)
        if check:
            if len(lam) != len(mu):
                raise ValueError("lambdas and mus differ in length")
            if len(lam) > 1 and np.min(np.diff(lam)) <= 0:
                raise ValueError("lambdas must be strictly increasing")
            if np.any(mu <= 0):
                raise ValueError("masses must be positive")
            if abs(np.sum(mu) - 1) > 1e-10:
                raise ValueError(f"masses sum to {np.sum(mu)}, not 1")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "mus", mu)
        object.__setattr__(self, "eigmatrix", eigmatrix)

    @property
    def N(self) -> int:
        return len(self.lambdas)


@dataclass(frozen=True, eq=False)
class MomentSeq:
    """Moments sigma_0..sigma_K; entries are floats or mpmath numbers."""

    sigmas: tuple

    def __init__(self, sigmas):
        object.__setattr__(self, "sigmas", tuple(sigmas))

    @property
    def K(self) -> int:
        return len(self.sigmas) - 1

    def as_float(self) -> np.ndarray:
        return np.array([float(s) for s in self.sigmas])


TimeVector = Mapping[int, float]


def as_time_vector(t: Union[TimeVector, None]) -> dict:
    """Validate a sparse flow-time map {l: t_l}, l >= 1."""
    if t is None:
        return {}
    out = {}
    for l, v in dict(t).items():
        li = int(l)
        if li < 1 or li != float(l):
            raise ValueError(f"flow index must be a positive integer, got {l!r}")
        out[li] = out.get(li, 0.0) + float(v)
    return {l: v for l, v in out.items() if v != 0.0}


# ---------------------------------------------------------------- decomposition


def split_blocks(J: JacobiBanded, tol: float = 0.0) -> list:
    """Index ranges [start, stop) of the blocks cut by zero off-diagonals."""
    if J.k != 2:
        raise ValueError("block splitting is implemented for k = 2")
    cuts = [0] + [i + 1 for i, a in enumerate(J.offdiag) if abs(a) <= tol] + [J.N]
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _sub(J: JacobiBanded, start: int, stop: int) -> JacobiBanded:
    return JacobiBanded(J.diag[start:stop], J.offdiag[start:stop - 1])


def spectral_decompose(J: JacobiBanded) -> SpectralData:
    """Eigenvalues, masses and eigmatrix of a generic Jacobi matrix.

    Tridiagonal input goes to LAPACK's implicit-shift QL/QR (``stev``),
    other bands to a dense symmetric eigensolver.
    """
    if J.N == 0:
        raise ValueError("empty matrix")
    if J.k == 2:
        if np.any(J.offdiag == 0):
            i = int(np.flatnonzero(J.offdiag == 0)[0])
            raise SplitBlockError(f"offdiag[{i}] = 0 splits the matrix; use split_blocks")
        if J.N == 1:
            lam, V = J.diag.copy(), np.ones((1, 1))
        else:
            lam, V = scipy.linalg.eigh_tridiagonal(J.diag, J.offdiag, lapack_driver="stev")
    else:
        lam, V = np.linalg.eigh(J.to_dense())
    if len(lam) > 1:
        gaps = np.diff(lam)
        m = int(np.argmin(gaps))
        if gaps[m] <= GAP_TOL:
            raise DegenerateSpectrumError(
                f"eigenvalues {m} and {m + 1} are {gaps[m]:.3e} apart (threshold {GAP_TOL})"
            )
    first = V[0, :]
    if np.any(first == 0):
        raise SplitBlockError("an eigenvector has zero first component")
    mu = first ** 2
    mu = mu / np.sum(mu)
    O = V / first
    return SpectralData(lam, mu, O)


def moments(sd: SpectralData, K: int, dps: Optional[int] = None) -> MomentSeq:
    """sigma_k = sum_m lambda_m^k mu_m for k = 0..K, with sigma_0 = 1.

    With ``dps`` the sums are taken exactly in mpmath at that precision.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if dps is None:
        powers = sd.lambdas[None, :] ** np.arange(K + 1)[:, None]
        sig = powers @ sd.mus
        sig[0] = 1.0
        return MomentSeq(sig.tolist())
    with mpmath.workdps(dps):
        lam = [mpmath.mpf(float(x)) for x in sd.lambdas]
        mu = [mpmath.mpf(float(x)) for x in sd.mus]
        tot = mpmath.fsum(mu)
        mu = [m / tot for m in mu]
        out = [mpmath.mpf(1)]
        pw = list(mu)
        for _ in range(K):
            pw = [p * l for p, l in zip(pw, lam)]
            out.append(mpmath.fsum(pw))
    return MomentSeq(out)


def log_weights(sd0: SpectralData, t: TimeVector) -> np.ndarray:
    """Unnormalized log masses: log mu_m(0) + 2 sum_l lambda_m^l t_l."""
    out = np.log(sd0.mus).copy()
    for l, tl in as_time_vector(t).items():
        out += 2.0 * sd0.lambdas ** l * tl
    return out


def tau_eval(sd0: SpectralData, t: TimeVector, tau0: float = 1.0) -> float:
    """tau(t) = tau0 sum_m mu_m(0) exp(2 sum_l lambda_m^l t_l)."""
    if tau0 <= 0:
        raise ValueError("tau0 must be positive")
    w = log_weights(sd0, t)
    c = np.max(w)
    return float(tau0 * np.exp(c) * np.sum(np.exp(w - c)))


def evolve_spectral(sd0: SpectralData, t: TimeVector) -> SpectralData:
    """Masses at time t; eigenvalues are unchanged. Drops the eigmatrix.

    Masses are positive in exact arithmetic but may underflow to zero for
    very large times, so the positivity check is skipped here.
    """
    w = log_weights(sd0, t)
    w -= np.max(w)
    mu = np.exp(w)
    return SpectralData(sd0.lambdas, mu / np.sum(mu), check=False)


# ---------------------------------------------------------------- inverse maps


def jacobi_from_spectral(sd: SpectralData) -> JacobiBanded:
    """Jacobi matrix of the measure sum mu_m delta_{lambda_m} (Stieltjes/Lanczos).

    Lanczos on diag(lambda) from the unit vector sqrt(mu), with full
    reorthogonalization (two Gram-Schmidt passes) at every step.
    """
    lam = sd.lambdas
    n = sd.N
    Q = np.zeros((n, n))
    Q[:, 0] = np.sqrt(sd.mus / np.sum(sd.mus))
    a = np.zeros(n)
    b = np.zeros(max(n - 1, 0))
    for j in range(n):
        w = lam * Q[:, j]
        a[j] = Q[:, j] @ w
        if j == n - 1:
            break
        for _ in range(2):
            w -= Q[:, :j + 1] @ (Q[:, :j + 1].T @ w)
        b[j] = np.linalg.norm(w)
        if b[j] == 0:
            raise DegenerateSpectrumError(f"Lanczos broke down at step {j}")
        Q[:, j + 1] = w / b[j]
    return JacobiBanded(a, b)


def hankel_determinants(m: MomentSeq, n: int, dps: int = 60):
    """d_0k = det[sigma_{i+j}]_{i,j<=k} and d_1k (last column shifted by one).

    Returns lists indexed k = -1..n-1 (index 0 holds d_{.,-1} = 1 and 0).
    The leading minors come from a Cholesky factorization carried out in
    mpmath; d_1k/d_0k is the last entry of H_k^{-1}(sigma_{k+1..2k+1}).
    """
    if m.K < 2 * n - 1:
        raise InvalidMomentsError(f"need K >= {2 * n - 1} moments, got K = {m.K}")
    with mpmath.workdps(dps):
        sig = [mpmath.mpf(s) if not isinstance(s, mpmath.mpf) else s for s in m.sigmas]
        H = [[sig[i + j] for j in range(n)] for i in range(n)]
        L = [[mpmath.mpf(0)] * n for _ in range(n)]
        d0 = [mpmath.mpf(1)]
        d1 = [mpmath.mpf(0)]
        for k in range(n):
            for j in range(k):
                L[k][j] = (H[k][j] - mpmath.fsum(L[k][i] * L[j][i] for i in range(j))) / L[j][j]
            piv = H[k][k] - mpmath.fsum(L[k][i] ** 2 for i in range(k))
            if piv <= 0:
                raise InvalidMomentsError(f"leading Hankel minor {k} is not positive (pivot {piv})")
            L[k][k] = mpmath.sqrt(piv)
            d0.append(d0[-1] * piv)
            v = [sig[i + k + 1] for i in range(k + 1)]
            y = []
            for i in range(k + 1):
                y.append((v[i] - mpmath.fsum(L[i][j] * y[j] for j in range(i))) / L[i][i])
            x = [mpmath.mpf(0)] * (k + 1)
            for i in range(k, -1, -1):
                x[i] = (y[i] - mpmath.fsum(L[j][i] * x[j] for j in range(i + 1, k + 1))) / L[i][i]
            d1.append(d0[-1] * x[k])
    return d0, d1


def jacobi_from_moments(m: MomentSeq, n: Optional[int] = None, dps: int = 60) -> JacobiBanded:
    """Jacobi matrix from moments through Hankel determinants.

    rho_kk = d_1k/d_0k - d_{1,k-1}/d_{0,k-1},
    rho_{k,k+1} = sqrt(d_{0,k-1} d_{0,k+1}) / d_0k.
    Exponentially ill-conditioned in n; pass exact (mpmath) moments for n > 4.
    """
    if n is None:
        n = (m.K + 1) // 2
    d0, d1 = hankel_determinants(m, n, dps)
    with mpmath.workdps(dps):
        diag = [d1[k + 1] / d0[k + 1] - d1[k] / d0[k] for k in range(n)]
        off = [mpmath.sqrt(d0[k] * d0[k + 2]) / d0[k + 1] for k in range(n - 1)]
        return JacobiBanded([float(x) for x in diag], [float(x) for x in off])


# ---------------------------------------------------------------- solution


def _normalizer(lam: np.ndarray, lo: float = 0.05, hi: float = 0.95):
    span = lam[-1] - lam[0]
    if span == 0:
        return 1.0, 0.5 * (lo + hi) - lam[0]
    c = (hi - lo) / span
    return c, lo - c * lam[0]


def normalized_times(t: TimeVector, c: float, b: float) -> dict:
    """Times t' for J' = cJ + b so that J'(t') = c J(t) + b.

    Solves t_j = sum_{l >= j} C(l, j) c^j b^{l-j} t'_l (upper triangular).
    """
    t = as_time_vector(t)
    if not t:
        return {}
    L = max(t)
    tp = {}
    for j in range(L, 0, -1):
        rest = sum(comb(l, j) * c ** j * b ** (l - j) * tp[l] for l in range(j + 1, L + 1))
        tp[j] = (t.get(j, 0.0) - rest) / c ** j
    return as_time_vector(tp)


def _solve_block(J: JacobiBanded, t: dict, normalize: bool) -> JacobiBanded:
    if J.N == 1 or not t:
        return J
    sd = spectral_decompose(J)
    if normalize:
        c, b = _normalizer(sd.lambdas)
        sdn = SpectralData(c * sd.lambdas + b, sd.mus)
        Jn = jacobi_from_spectral(evolve_spectral(sdn, normalized_times(t, c, b)))
        return JacobiBanded((Jn.diag - b) / c, Jn.offdiag / c)
    return jacobi_from_spectral(evolve_spectral(sd, t))


def toda_solve(J0: JacobiBanded, t: TimeVector, normalize: Union[bool, str] = "auto") -> JacobiBanded:
    """J(t) for the Toda hierarchy flow times t = {l: t_l}.

    Blocks cut by zero off-diagonals evolve independently. ``normalize``
    maps each block's spectrum into (0.05, 0.95) first ("auto": only when
    it is not already inside (0, 1)); the result is the same either way.
    """
    if J0.k != 2:
        raise ValueError("toda_solve handles Jacobi (k = 2) matrices")
    if np.any(J0.offdiag < 0):
        raise ValueError("off-diagonal entries must be non-negative")
    t = as_time_vector(t)
    diag, off = J0.diag.copy(), J0.offdiag.copy()
    for a, b in split_blocks(J0):
        blk = _sub(J0, a, b)
        norm = normalize
        if normalize == "auto":
            lam = np.linalg.eigvalsh(blk.to_dense())
            norm = bool(lam[0] <= 0 or lam[-1] >= 1)
        out = _solve_block(blk, t, bool(norm))
        diag[a:b] = out.diag
        off[a:b - 1] = out.offdiag
    return JacobiBanded(diag, off)


def orthopoly(J: JacobiBanded, n: int, lam):
    """P_n(lam) from lam P_k = a_{k-1} P_{k-1} + b_k P_k + a_k P_{k+1}, P_0 = 1.

    P_N uses a_{N-1} = 1, i.e. it is det(lam - J) / prod(a).
    """
    if not 0 <= n <= J.N:
        raise ValueError(f"n must lie in [0, {J.N}]")
    lam = np.asarray(lam, float)
    a = np.append(J.offdiag, 1.0)
    prev, cur = np.zeros_like(lam), np.ones_like(lam)
    for k in range(n):
        if a[k] == 0:
            raise SplitBlockError(f"offdiag[{k}] = 0 stops the recurrence")
        prev, cur = cur, ((lam - J.diag[k]) * cur - (a[k - 1] if k else 0.0) * prev) / a[k]
    return cur


def orthopoly_matrix(J: JacobiBanded, lam: np.ndarray) -> np.ndarray:
    """O[l, m] = P_l(lam_m) for l = 0..N-1."""
    return np.array([orthopoly(J, l, lam) for l in range(J.N)])


def eigenbasis_change(sd0: SpectralData, sdt: SpectralData) -> np.ndarray:
    """Z(t) = O(0) mu(0)^{1/2} (O(t) mu(t)^{1/2})^T; orthogonal, J(t) = Z^T J(0) Z."""
    u0 = sd0.eigmatrix * np.sqrt(sd0.mus)
    ut = sdt.eigmatrix * np.sqrt(sdt.mus)
    return u0 @ ut.T


def weyl_eval(sd: SpectralData, z: float) -> float:
    """Weyl function sum_m mu_m / (lambda_m - z)."""
    d = sd.lambdas - z
    if np.min(np.abs(d)) <= 1e-12:
        raise PoleError(f"z = {z} is within 1e-12 of an eigenvalue")
    return float(np.sum(sd.mus / d))


def weyl_laurent(m: MomentSeq, z: float) -> float:
    """Partial sum -sum_k sigma_k / z^{k+1} of the expansion at infinity."""
    s = m.as_float()
    return float(-np.sum(s / z ** np.arange(1, len(s) + 1)))


# ---------------------------------------------------------------- group element


def group_element(J0: JacobiBanded, t: TimeVector, dps: int = 80) -> GroupElement:
    """Bidiagonal g(t) with J(t) = Ad*_{g(t)^{-1}} J(0), normalized by g_00 = 1.

    g_0k = sqrt(d_{0,k-1}(0) d_0k(t) / (d_0k(0) d_{0,k-1}(t))),
    g_1k = (d_1k(t) d_0k(0) - d_1k(0) d_0k(t))
           / sqrt(d_0k(t) d_0k(0) d_{0,k-1}(t) d_{0,k+1}(0)).
    All determinants are evaluated in mpmath from exact moments.
    """
    n = J0.N
    sd0 = spectral_decompose(J0)
    sdt = evolve_spectral(sd0, t)
    K = 2 * n
    D0a, D1a = hankel_determinants(moments(sd0, K, dps), n, dps)
    D0b, D1b = hankel_determinants(moments(sdt, K, dps), n, dps)
    # index shift: D[k + 1] = d_k, D[0] = d_{-1}
    with mpmath.workdps(dps):
        g0 = [mpmath.sqrt(D0a[k] * D0b[k + 1] / (D0a[k + 1] * D0b[k])) for k in range(n)]
        g1 = []
        for k in range(n - 1):
            num = D1b[k + 1] * D0a[k + 1] - D1a[k + 1] * D0b[k + 1]
            den = mpmath.sqrt(D0b[k + 1] * D0a[k + 1] * D0b[k] * D0a[k + 2])
            g1.append(num / den)
        return as_group(UpperBanded([[float(x) for x in g0], [float(x) for x in g1]], 2))


def reconstruct_from_group(J0: JacobiBanded, g) -> JacobiBanded:
    """Symmetric coadjoint reconstruction pi_-(g rho(0) g^{-1}), mirrored."""
    return JacobiBanded.from_lower(coadjoint_group(g, J0.to_lower()))


# ---------------------------------------------------------------- lower flows


def lower_flow(rho: LowerBanded, l: int, T: float) -> LowerBanded:
    """Closed-form lower triangular flow d rho/dt = [P_0(rho^{l-1}), rho].

    rho_0 stays put; entry i of subdiagonal j gains the factor
    exp(T((rho_0)_{i+j}^{l-1} - (rho_0)_i^{l-1})).
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    n = rho.size
    b = rho.boxed(n)
    d = np.asarray(b[0], float) ** (l - 1)
    out = [b[0]]
    for j in range(1, rho.k):
        m = n - j
        out.append(b[j] * np.exp(T * (d[j:] - d[:m])))
    return LowerBanded(out, rho.k)
