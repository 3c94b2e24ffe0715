"""Diagonal operators on a finite truncation.

A diagonal operator diag(x_0, x_1, ...) is stored as the finite array of its
leading entries; everything past the end is an implicit zero. The two shift
maps act on these sequences:

    s(x)  = (x_1, x_2, ...)          drop the first entry  (S^T x S)
    s~(x) = (0, x_0, x_1, ...)       prepend a zero        (S x S^T)

and are mutually adjoint for the trace pairing <rho, x> = sum_i rho_i x_i.

Arrays keep their dtype, so integer or Fraction (object) data stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Union

import numpy as np

ArrayLike = Union["DiagSeq", np.ndarray, Iterable[float]]


def _as_array(x) -> np.ndarray:
    if isinstance(x, DiagSeq):
        return x.entries
    a = np.asarray(x)
    if a.ndim == 0:
        a = a.reshape(1)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-d sequence, got shape {a.shape}")
    return a


def pad(x, n: int, fill=0) -> np.ndarray:
    """Return the entries of ``x`` extended (or cut) to length ``n``."""
    a = _as_array(x)
    if len(a) >= n:
        return a[:n]
    dtype = object if a.dtype == object else np.result_type(a.dtype, np.asarray(fill).dtype)
    out = np.empty(n, dtype=dtype)
    out[: len(a)] = a
    out[len(a):] = fill
    return out


@dataclass(frozen=True, eq=False)
class DiagSeq:
    """Finite real sequence with an implicit zero tail."""

    entries: np.ndarray

    def __init__(self, entries=()):
        a = np.array(entries.entries if isinstance(entries, DiagSeq) else entries)
        if a.ndim == 0:
            a = a.reshape(1)
        if a.ndim != 1:
            raise ValueError(f"expected a 1-d sequence, got shape {a.shape}")
        if a.size == 0:
            a = np.zeros(0)
        object.__setattr__(self, "entries", a)

    @classmethod
    def zeros(cls, n: int) -> "DiagSeq":
        return cls(np.zeros(n))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __repr__(self) -> str:
        return f"DiagSeq({self.entries.tolist()})"

    def padded(self, n: int, fill=0) -> np.ndarray:
        return pad(self.entries, n, fill)

    def _binary(self, other, op):
        b = _as_array(other) if not np.isscalar(other) else None
        if b is None:
            return DiagSeq(op(self.entries, other))
        n = max(len(self.entries), len(b))
        return DiagSeq(op(pad(self.entries, n), pad(b, n)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return DiagSeq(-self.entries)

    def __eq__(self, other):
        b = _as_array(other)
        n = max(len(self.entries), len(b))
        return bool(np.all(pad(self.entries, n) == pad(b, n)))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.entries))) if len(self) else 0.0

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.entries))) if len(self) else 0.0

    def allclose(self, other, atol: float = 1e-12) -> bool:
        b = _as_array(other)
        n = max(len(self.entries), len(b))
        return bool(np.allclose(pad(self.entries, n), pad(b, n), rtol=0, atol=atol))


def s_down(x, power: int = 1) -> np.ndarray:
    """Apply s^power: drop the first ``power`` entries."""
    if power < 0:
        raise ValueError("power must be non-negative")
    return _as_array(x)[power:]


def s_up(x, power: int = 1) -> np.ndarray:
    """Apply s~^power: prepend ``power`` zeros."""
    if power < 0:
        raise ValueError("power must be non-negative")
    a = _as_array(x)
    return np.concatenate([np.zeros(power, dtype=a.dtype), a])


def shift(x: ArrayLike, direction: Literal["down", "up"], power: int = 1) -> DiagSeq:
    """s^power (``down``) or s~^power (``up``) of a diagonal sequence.

    ``down`` shortens the sequence by ``power`` (never below length 0) and
    ``up`` lengthens it by ``power``.
    """
    if direction == "down":
        return DiagSeq(s_down(x, power))
    if direction == "up":
        return DiagSeq(s_up(x, power))
    raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")


def trace_pair(rho: ArrayLike, x: ArrayLike):
    """Tr(rho x) = sum_i rho_i x_i over the common support."""
    a, b = _as_array(rho), _as_array(x)
    n = min(len(a), len(b))
    if n == 0:
        return 0
    return np.sum(a[:n] * b[:n])
