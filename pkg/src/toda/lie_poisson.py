"""Coadjoint actions and the Lie-Poisson bracket on lower k-band operators.

rho = rho_0 + sum_j (S^T)^j rho_j, with entry i of rho_j at position (i + j, i).
Elements of this space pair with upper banded x through

    Tr(rho x) = sum_j <rho_j, x_j>.

Sign conventions used throughout:

    coadjoint_group(g, rho)   = pi_-(g rho g^{-1})     (the left action Ad*_{g^{-1}})
    coadjoint_algebra(x, rho) = -pi_-([x, rho])        (ad*_x = transpose of ad_x)
    Hamilton's equations      d rho/dt = -ad*_{dh} rho

so that d/de coadjoint_group(exp(e x), rho) at e = 0 equals -coadjoint_algebra(x, rho).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .diag_algebra import DiagSeq, _as_array, pad, s_down, s_up, trace_pair
from .multidiag_algebra import (
    GroupElement,
    UpperBanded,
    as_group,
    bracket_k,
    inverse_k,
)


@dataclass(frozen=True, eq=False)
class LowerBanded:
    """Lower triangular operator with k subdiagonals rho_0..rho_{k-1}."""

    diags: tuple

    def __init__(self, diags: Sequence, k: Optional[int] = None):
        arrs = [_as_array(d) for d in diags]
        if k is None:
            k = len(arrs)
        if k < 1:
            raise ValueError("band count k must be >= 1")
        if len(arrs) > k:
            raise ValueError(f"{len(arrs)} diagonals given for k={k}")
        arrs += [np.zeros(0)] * (k - len(arrs))
        object.__setattr__(self, "diags", tuple(arrs))

    @property
    def k(self) -> int:
        return len(self.diags)

    @property
    def size(self) -> int:
        return max((len(d) + j for j, d in enumerate(self.diags) if len(d)), default=0)

    def __getitem__(self, j) -> np.ndarray:
        return self.diags[j]

    def __repr__(self) -> str:
        return f"LowerBanded({[d.tolist() for d in self.diags]})"

    def boxed(self, n: int) -> list:
        return [pad(d, max(n - j, 0)) for j, d in enumerate(self.diags)]

    def to_dense(self, n: Optional[int] = None) -> np.ndarray:
        n = self.size if n is None else n
        bx = self.boxed(n)
        dtype = np.result_type(*[b.dtype for b in bx])
        m = np.zeros((n, n), dtype=dtype)
        for j, d in enumerate(bx):
            if j < n:
                m[np.arange(j, n), np.arange(n - j)] = d
        return m

    @classmethod
    def from_dense(cls, m: np.ndarray, k: int) -> "LowerBanded":
        return cls([np.diagonal(m, -j).copy() for j in range(min(k, len(m)))], k)

    def to_symmetric(self, n: Optional[int] = None) -> np.ndarray:
        """The symmetric operator with the same lower band (rho_0 + mirrored band)."""
        m = self.to_dense(n)
        return m + np.tril(m, -1).T

    def __add__(self, other: "LowerBanded") -> "LowerBanded":
        _check_k(self, other)
        return LowerBanded([DiagSeq(a) + b for a, b in zip(self.diags, other.diags)], self.k)

    def __sub__(self, other: "LowerBanded") -> "LowerBanded":
        _check_k(self, other)
        return LowerBanded([DiagSeq(a) - b for a, b in zip(self.diags, other.diags)], self.k)

    def __mul__(self, c) -> "LowerBanded":
        return LowerBanded([c * d for d in self.diags], self.k)

    __rmul__ = __mul__

    def __neg__(self) -> "LowerBanded":
        return LowerBanded([-d for d in self.diags], self.k)

    def allclose(self, other: "LowerBanded", atol: float = 1e-12) -> bool:
        if self.k != other.k:
            raise ValueError(f"band mismatch: k={self.k} vs k={other.k}")
        n = max(self.size, other.size)
        return all(
            np.allclose(np.asarray(a, float), np.asarray(b, float), rtol=0, atol=atol)
            for a, b in zip(self.boxed(n), other.boxed(n))
        )

    def max_abs_diff(self, other: "LowerBanded") -> float:
        n = max(self.size, other.size)
        return max(
            (float(np.max(np.abs(a - b))) for a, b in zip(self.boxed(n), other.boxed(n)) if len(a)),
            default=0.0,
        )


@dataclass(frozen=True, eq=False)
class BidiagLower:
    """rho = rho_0 + (S^T)^{k-1} rho_{k-1}, all middle subdiagonals zero."""

    k: int
    rho0: np.ndarray
    rho_km1: np.ndarray

    def __init__(self, k: int, rho0, rho_km1):
        if k < 2:
            raise ValueError("bidiagonal elements need k >= 2")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "rho0", np.asarray(_as_array(rho0)))
        object.__setattr__(self, "rho_km1", np.asarray(_as_array(rho_km1)))

    def to_lower(self) -> LowerBanded:
        return LowerBanded([self.rho0] + [np.zeros(0)] * (self.k - 2) + [self.rho_km1], self.k)

    @classmethod
    def from_lower(cls, rho: LowerBanded) -> "BidiagLower":
        return cls(rho.k, rho.diags[0], rho.diags[-1])


def _check_k(a, b) -> None:
    if a.k != b.k:
        raise ValueError(f"band mismatch: k={a.k} vs k={b.k}")


def pairing(rho: LowerBanded, x) -> float:
    """Tr(rho x) for lower banded rho and upper banded x."""
    _check_k(rho, x)
    return sum(trace_pair(r, xi) for r, xi in zip(rho.diags, x.diags))


def coadjoint_group(g, rho: LowerBanded) -> LowerBanded:
    """Ad*_{g^{-1}} rho = pi_-(g rho g^{-1}).

    Computed as a dense conjugation inside the common box followed by the
    lower k-band projection. This is exact: g is the identity outside its
    box and rho vanishes outside its own.
    """
    _check_k(g, rho)
    g = as_group(g)
    n = max(g.size, rho.size)
    gd = g.to_dense(n)
    hd = inverse_k(g).to_dense(n)
    m = gd @ rho.to_dense(n) @ hd
    return LowerBanded.from_dense(m, rho.k)


def coadjoint_algebra(x, rho: LowerBanded) -> LowerBanded:
    """ad*_x rho = -pi_-([x, rho]), the transpose of ad_x under Tr."""
    _check_k(x, rho)
    n = max(x.size, rho.size)
    xd = x.to_dense(n)
    rd = rho.to_dense(n)
    return LowerBanded.from_dense(rd @ xd - xd @ rd, rho.k)


def coadjoint_algebra_coords(x, rho: LowerBanded) -> LowerBanded:
    """ad*_x rho from the diagonal-coordinate formula.

    ad*_x rho = sum_j (S^T)^j sum_{i>=j} ( s~^{i-j}(rho_i x_{i-j}) - rho_i s^j(x_{i-j}) ).
    """
    _check_k(x, rho)
    k = rho.k
    n = max(x.size, rho.size)
    rb, xb = rho.boxed(n), x.boxed(n)
    out = []
    for j in range(k):
        m = max(n - j, 0)
        acc = np.zeros(m)
        for i in range(j, k):
            a = rb[i] * pad(xb[i - j], len(rb[i]))
            acc = acc + pad(s_up(a, i - j), m)
            acc = acc - pad(rb[i] * pad(s_down(xb[i - j], j), len(rb[i])), m)
        out.append(acc)
    return LowerBanded(out, k)


def poisson_bracket_linear(x, y, rho: LowerBanded) -> float:
    """{f, g}(rho) = Tr(rho [x, y]_k) for f = Tr(. x), g = Tr(. y)."""
    _check_k(x, y)
    _check_k(x, rho)
    return pairing(rho, bracket_k(x, y))


def orbit_form_bidiagonal(rho: BidiagLower, x, y) -> float:
    """Orbit symplectic form on (ad*_x rho, ad*_y rho) for bidiagonal x, y.

    sum_i rho_{k-1,i} ( x_{k-1,i}(y_{0,i+k-1} - y_{0,i}) - y_{k-1,i}(x_{0,i+k-1} - x_{0,i}) )
    """
    k = rho.k
    r = rho.rho_km1
    n = len(r)
    x0, y0 = pad(x.diags[0], n + k - 1), pad(y.diags[0], n + k - 1)
    xk, yk = pad(x.diags[k - 1], n), pad(y.diags[k - 1], n)
    dy = y0[k - 1:] - y0[:n]
    dx = x0[k - 1:] - x0[:n]
    return float(np.sum(r * (xk * dy - yk * dx)))


def bidiagonal_hamilton_rhs(dh0, dhk, rho: BidiagLower):
    """Hamilton's equations on bidiagonal rho for caller-supplied gradients.

    Returns (d rho_0/dt, d rho_{k-1}/dt) with
        d rho_0/dt     = rho_{k-1} dhk - s~^{k-1}(rho_{k-1} dhk)
        d rho_{k-1}/dt = rho_{k-1} (s^{k-1}(dh0) - dh0)
    Mismatched lengths are zero padded.
    """
    k = rho.k
    r = DiagSeq(rho.rho_km1)
    n_r = len(r)
    a = (r * pad(_as_array(dhk), n_r)).entries
    n0 = max(len(rho.rho0), n_r + k - 1)
    drho0 = pad(a, n0) - pad(s_up(a, k - 1), n0)
    d0 = pad(_as_array(dh0), n_r + k - 1)
    drk = r.entries * (d0[k - 1:k - 1 + n_r] - d0[:n_r])
    return DiagSeq(drho0), DiagSeq(drk)


def fd_gradient(h: Callable[[np.ndarray], float], v: np.ndarray) -> np.ndarray:
    """Central-difference gradient with step 1e-6 (1 + |v_i|)."""
    v = np.asarray(v, float)
    g = np.empty_like(v)
    for i in range(len(v)):
        step = 1e-6 * (1 + abs(v[i]))
        e = np.zeros_like(v)
        e[i] = step
        g[i] = (h(v + e) - h(v - e)) / (2 * step)
    return g


def bidiagonal_hamilton_fd(h: Callable[[BidiagLower], float], rho: BidiagLower):
    """bidiagonal_hamilton_rhs with finite-difference gradients of h."""
    n0, n1 = len(rho.rho0), len(rho.rho_km1)

    def flat(v):
        return h(BidiagLower(rho.k, v[:n0], v[n0:]))

    g = fd_gradient(flat, np.concatenate([rho.rho0, rho.rho_km1]).astype(float))
    return bidiagonal_hamilton_rhs(g[:n0], g[n0:], rho)


def hamilton_rhs(dh: UpperBanded, rho: LowerBanded) -> LowerBanded:
    """General k-band Hamilton equations: d rho/dt = -ad*_{dh} rho."""
    return -coadjoint_algebra(dh, rho)

