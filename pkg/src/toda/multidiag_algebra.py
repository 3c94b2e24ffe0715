"""The algebra of k-band upper triangular operators under the truncated product.

An element x = x_0 + x_1 S + ... + x_{k-1} S^{k-1} keeps its diagonals as
arrays; entry j of x_i sits at matrix position (j, j + i). The product

    (x o_k y)_l = sum_{i=0}^{l} x_i s^i(y_{l-i}),    l = 0..k-1,

is the ordinary operator product with every diagonal past k-1 discarded.

Finite data lives in an N x N box, N = max_i(len(x_i) + i). Inside the box
diagonal i has N - i entries. Outside it an algebra element is zero and a
group element is the identity, so the box computations are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .diag_algebra import DiagSeq, _as_array, pad


class NotInvertibleError(ValueError):
    """Main diagonal entry too small for inversion in the o_k product."""


@dataclass(frozen=True, eq=False)
class UpperBanded:
    """Upper triangular operator with k diagonals x_0..x_{k-1}."""

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
        """Smallest box N holding every stored entry."""
        return max((len(d) + i for i, d in enumerate(self.diags) if len(d)), default=0)

    def __getitem__(self, i) -> np.ndarray:
        return self.diags[i]

    def __repr__(self) -> str:
        return f"UpperBanded({[d.tolist() for d in self.diags]})"

    def boxed(self, n: int, fill0=0) -> list:
        """Diagonals padded to the n x n box (diagonal i gets n - i entries)."""
        out = [pad(self.diags[0], n, fill0)]
        out += [pad(d, max(n - i, 0)) for i, d in enumerate(self.diags) if i > 0]
        return out

    def to_dense(self, n: Optional[int] = None) -> np.ndarray:
        n = self.size if n is None else n
        return _dense_upper(self.boxed(n))

    @classmethod
    def from_dense(cls, m: np.ndarray, k: int) -> "UpperBanded":
        return cls([np.diagonal(m, i).copy() for i in range(min(k, len(m)))], k)

    def __add__(self, other: "UpperBanded") -> "UpperBanded":
        _check_k(self, other)
        return UpperBanded([DiagSeq(a) + b for a, b in zip(self.diags, other.diags)], self.k)

    def __sub__(self, other: "UpperBanded") -> "UpperBanded":
        _check_k(self, other)
        return UpperBanded([DiagSeq(a) - b for a, b in zip(self.diags, other.diags)], self.k)

    def __mul__(self, c) -> "UpperBanded":
        return UpperBanded([c * d for d in self.diags], self.k)

    __rmul__ = __mul__

    def __neg__(self) -> "UpperBanded":
        return UpperBanded([-d for d in self.diags], self.k)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        _check_k(self, other)
        n = max(self.size, other.size)
        f0, g0 = _fill0(self), _fill0(other)
        return all(
            np.allclose(np.asarray(a, float), np.asarray(b, float), rtol=0, atol=atol)
            for a, b in zip(self.boxed(n, f0), other.boxed(n, g0))
        )

    def equals(self, other) -> bool:
        """Exact comparison inside the common box."""
        _check_k(self, other)
        n = max(self.size, other.size)
        return all(
            np.array_equal(a, b)
            for a, b in zip(self.boxed(n, _fill0(self)), other.boxed(n, _fill0(other)))
        )


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Upper banded element with a main diagonal bounded away from zero.

    Past the stored entries the main diagonal is 1, so the element acts as
    the identity outside its box. ``floor`` is min |x_0| over the box.
    """

    body: UpperBanded
    floor: float

    @property
    def k(self) -> int:
        return self.body.k

    @property
    def size(self) -> int:
        return self.body.size

    @property
    def diags(self) -> tuple:
        return self.body.diags

    def __getitem__(self, i) -> np.ndarray:
        return self.body.diags[i]

    def __repr__(self) -> str:
        return f"GroupElement({[d.tolist() for d in self.body.diags]}, floor={self.floor})"

    def boxed(self, n: int, fill0=1) -> list:
        return self.body.boxed(n, fill0)

    def to_dense(self, n: Optional[int] = None) -> np.ndarray:
        n = self.size if n is None else n
        return _dense_upper(self.boxed(n))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return UpperBanded.allclose(self, other, atol)

    def equals(self, other) -> bool:
        return UpperBanded.equals(self, other)


def _fill0(x) -> int:
    return 1 if isinstance(x, GroupElement) else 0


def _check_k(x, y) -> None:
    if x.k != y.k:
        raise ValueError(f"band mismatch: k={x.k} vs k={y.k}")


def _dense_upper(diags: list) -> np.ndarray:
    n = len(diags[0])
    dtype = np.result_type(*[np.asarray(d).dtype for d in diags])
    m = np.zeros((n, n), dtype=dtype)
    for i, d in enumerate(diags):
        if i < n:
            m[np.arange(n - i), np.arange(i, n)] = d
    return m


def identity(k: int) -> GroupElement:
    """The unit 1 = (ones, 0, ..., 0); stored empty, the tail does the rest."""
    return GroupElement(UpperBanded([np.ones(0)], k), 1.0)


def _circ_boxed(xb: list, yb: list, n: int, k: int) -> list:
    out = []
    for l in range(k):
        m = max(n - l, 0)
        acc = None
        for i in range(l + 1):
            term = xb[i][:m] * yb[l - i][i:i + m]
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def circ_k(x, y):
    """The truncated product x o_k y.

    Two group elements give a group element; otherwise an UpperBanded.
    """
    _check_k(x, y)
    n = max(x.size, y.size)
    res = _circ_boxed(x.boxed(n, _fill0(x)), y.boxed(n, _fill0(y)), n, x.k)
    body = UpperBanded(res, x.k)
    if isinstance(x, GroupElement) and isinstance(y, GroupElement):
        return _wrap(body)
    return body


def bracket_k(x, y) -> UpperBanded:
    """Commutator x o_k y - y o_k x (its main diagonal is identically 0)."""
    a, b = circ_k(x, y), circ_k(y, x)
    a = a.body if isinstance(a, GroupElement) else a
    b = b.body if isinstance(b, GroupElement) else b
    n = max(a.size, b.size)
    diff = [p - q for p, q in zip(a.boxed(n, 1), b.boxed(n, 1))]
    return UpperBanded(diff, x.k)


def _wrap(body: UpperBanded) -> GroupElement:
    x0 = body.diags[0]
    floor = float(np.min(np.abs(x0.astype(float)))) if len(x0) else 1.0
    return GroupElement(body, floor)


def is_invertible(x: UpperBanded, tol: float) -> Optional[GroupElement]:
    """Certify x as a group element if min |x_0| >= tol, else None."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = _wrap(x.body if isinstance(x, GroupElement) else x)
    return g if g.floor >= tol else None


def as_group(x, tol: float = 1e-12) -> GroupElement:
    """Like is_invertible but raises NotInvertibleError on failure."""
    if isinstance(x, GroupElement):
        if x.floor < tol:
            raise NotInvertibleError(f"main diagonal floor {x.floor} < {tol}")
        return x
    g = is_invertible(x, tol)
    if g is None:
        x0 = np.abs(np.asarray(x.diags[0], float))
        j = int(np.argmin(x0))
        raise NotInvertibleError(f"|x_0[{j}]| = {x0[j]} is below {tol}")
    return g


def inverse_k(g, tol: float = 1e-12) -> GroupElement:
    """Inverse in (GL_{+,k}, o_k) by forward recursion on the diagonals.

    Solves g o_k h = 1 for h_0 = 1/g_0, then h_1, ..., h_{k-1} in turn.
    """
    g = as_group(g, tol)
    n, k = g.size, g.k
    gb = g.boxed(n)
    h0 = 1 / gb[0]
    hb = [h0]
    for l in range(1, k):
        m = max(n - l, 0)
        acc = 0
        for i in range(1, l + 1):
            acc = acc + gb[i][:m] * hb[l - i][i:i + m]
        hb.append(-h0[:m] * acc if m else np.zeros(0))
    return _wrap(UpperBanded(hb, k))


def exp_k(x: UpperBanded, tol: float = 1e-17, max_terms: int = 200) -> GroupElement:
    """exp(x) in the o_k algebra by its power series."""
    n = x.size
    xb = x.boxed(n)
    term = [np.ones(n)] + [np.zeros(max(n - i, 0)) for i in range(1, x.k)]
    total = [t.copy() for t in term]
    for j in range(1, max_terms):
        term = [t / j for t in _circ_boxed(term, xb, n, x.k)]
        for a, t in zip(total, term):
            a += t
        if max((np.max(np.abs(t)) if len(t) else 0.0) for t in term) < tol:
            break
    return _wrap(UpperBanded(total, x.k))
