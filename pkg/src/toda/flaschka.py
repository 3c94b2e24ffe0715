"""Flaschka momentum maps from canonical coordinates to banded operators.

Bidiagonal case (band k >= 2, weight nu on subdiagonal k-1):

    J(q, p) = p + (S^T)^{k-1} nu exp(s^{k-1}(q) - q)

with the canonical form w(u, v) = <dq_u, dp_v> - <dq_v, dp_u>, Hamilton's
equations q' = dH/dp, p' = -dH/dq and bracket {F, G} = <F_q, G_p> - <G_q, F_p>.

Induced case: extra coordinates q_1..q_{k-2}, p_1..p_{k-2} and

    J_k = pi_-(G rho G^{-1}),  G = 1 + q_1 S + ... + q_{k-2} S^{k-2},
    rho = p + S^T p_1 + ... + (S^T)^{k-2} p_{k-2} + (S^T)^{k-1} nu e^{s^{k-1}q - q}.

For k = 3 the reduced form is Omega_3 = -d[Tr(p dq) + Tr(pt_1 dq_1)] with the
shifted momentum pt_1 = p_1 - s~(nu_2 e^{s^2 q - q} q_1).

Sizes for an N x N truncation: q, p have N entries, q_l, p_l have N - l and
nu has N - k + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .diag_algebra import _as_array, pad, s_up
from .lie_poisson import BidiagLower, LowerBanded, coadjoint_group
from .multidiag_algebra import GroupElement, UpperBanded, as_group, inverse_k


@dataclass(frozen=True, eq=False)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    def __init__(self, q, p):
        q, p = _as_array(q), _as_array(p)
        n = max(len(q), len(p))
        object.__setattr__(self, "q", pad(q, n))
        object.__setattr__(self, "p", pad(p, n))

    @property
    def n(self) -> int:
        return len(self.q)


@dataclass(frozen=True, eq=False)
class PhasePoint3:
    base: PhasePoint
    q1: np.ndarray
    p1: np.ndarray

    def __init__(self, base: PhasePoint, q1, p1):
        m = max(base.n - 1, 0)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "q1", pad(_as_array(q1), m))
        object.__setattr__(self, "p1", pad(_as_array(p1), m))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.base.q, self.base.p, self.q1, self.p1])

    @classmethod
    def from_flat(cls, v: np.ndarray, n: int) -> "PhasePoint3":
        q, p, q1, p1 = _split3(v, n)
        return cls(PhasePoint(q, p), q1, p1)


@dataclass(frozen=True, eq=False)
class NuWeight:
    nu: np.ndarray
    k: int = 2

    def __init__(self, nu, k: int = 2):
        if k < 2:
            raise ValueError("k must be >= 2")
        object.__setattr__(self, "nu", _as_array(nu))
        object.__setattr__(self, "k", k)


def _split3(v, n):
    return v[:n], v[n:2 * n], v[2 * n:3 * n - 1], v[3 * n - 1:4 * n - 2]


def _exp_gap(q: np.ndarray, nu: np.ndarray, j: int) -> np.ndarray:
    """nu e^{s^j(q) - q}, cut to the N - j entries inside the box."""
    m = max(len(q) - j, 0)
    return pad(nu, m) * np.exp(q[j:] - q[:m])


def flaschka_map(pt: PhasePoint, w: NuWeight) -> BidiagLower:
    """J(q, p) = p + (S^T)^{k-1} nu e^{s^{k-1}(q) - q}."""
    return BidiagLower(w.k, pt.p, _exp_gap(pt.q, w.nu, w.k - 1))


def _g_bidiag(g, k: int, n: int):
    g = as_group(g)
    if g.k != k:
        raise ValueError(f"band mismatch: k={g.k} vs k={k}")
    for i in range(1, k - 1):
        if np.any(g.diags[i] != 0):
            raise ValueError("sigma action needs g with only slots 0 and k-1")
    g0 = np.asarray(g.boxed(n)[0], float)
    gk = np.asarray(pad(g.diags[k - 1], max(n - k + 1, 0)), float)
    return g0, gk


def sigma_action(g, pt: PhasePoint, w: NuWeight) -> PhasePoint:
    """Action of a bidiagonal group element with positive g_0 on (q, p).

    q' = q + log g_0,  p' = p + d - s~^{k-1}(d),  d = g_{k-1} g_0^{-1} nu e^{s^{k-1}q - q}.
    """
    k, n = w.k, pt.n
    n = max(n, as_group(g).size)
    q, p = pad(pt.q, n), pad(pt.p, n)
    g0, gk = _g_bidiag(g, k, n)
    if np.any(g0 <= 0):
        raise ValueError("sigma action needs g_0 > 0 entrywise")
    d = gk / g0[:len(gk)] * _exp_gap(q, w.nu, k - 1)
    return PhasePoint(q + np.log(g0), p + pad(d, n) - pad(s_up(d, k - 1), n))


def toda_hamiltonian(pt: PhasePoint, w: NuWeight, l: int) -> float:
    """Toda Hamiltonians H_l = I_l o J for the tridiagonal case.

    H_1 = sum p, H_2 = 1/2 sum p^2 + sum nu^2 e^{2(q_{i+1} - q_i)},
    H_l = (1/l) Tr(Sym J)^l in general.
    """
    if w.k != 2:
        raise ValueError("toda_hamiltonian is defined for k = 2")
    if l < 1:
        raise ValueError("l must be >= 1")
    if l == 1:
        return float(np.sum(pt.p))
    a = _exp_gap(pt.q, w.nu, 1)
    if l == 2:
        return float(0.5 * np.sum(pt.p ** 2) + np.sum(a ** 2))
    m = np.diag(pt.p) + np.diag(a, -1) + np.diag(a, 1)
    return float(np.trace(np.linalg.matrix_power(m, l)) / l)


def linear_gradient(x: UpperBanded, pt: PhasePoint, w: NuWeight):
    """(d/dq, d/dp) of f o J for f = Tr(. x) with x bidiagonal in slots 0, k-1."""
    k, n = w.k, pt.n
    x0 = np.asarray(pad(x.diags[0], n), float)
    a = _exp_gap(pt.q, w.nu, k - 1) * pad(x.diags[k - 1], max(n - k + 1, 0))
    dq = pad(s_up(a, k - 1), n) - pad(a, n)
    return dq, x0


def canonical_bracket(grad_f, grad_g) -> float:
    """{F, G} = <F_q, G_p> - <G_q, F_p>."""
    (fq, fp), (gq, gp) = grad_f, grad_g
    return float(np.dot(fq, gp) - np.dot(gq, fp))


def omega_canonical(u, v) -> float:
    """w(u, v) = <dq_u, dp_v> - <dq_v, dp_u> for tangents (dq, dp)."""
    return float(np.dot(u[0], v[1]) - np.dot(v[0], u[1]))


def p_tilde1(pt3: PhasePoint3, nu2) -> np.ndarray:
    """pt_1 = p_1 - s~(nu_2 e^{s^2 q - q} q_1)."""
    q = pt3.base.q
    n = len(q)
    e = _exp_gap(q, nu2, 2)
    return pt3.p1 - pad(s_up(e * pt3.q1[:len(e)], 1), n - 1)


def _flaschka3_arrays(q, p, q1, p1, nu2):
    n = len(q)
    e = pad(_as_array(nu2), max(n - 2, 0)) * np.exp(q[2:] - q[:max(n - 2, 0)])
    pt1 = p1 - pad(s_up(e * q1[:len(e)], 1), n - 1)
    a = q1 * pt1
    d0 = p + pad(a, n) - pad(s_up(a, 1), n)
    d1 = pt1 + pad(q1[1:] * e, n - 1)
    return d0, d1, e


def flaschka3(pt3: PhasePoint3, nu2) -> LowerBanded:
    """Generalized Flaschka map for k = 3 in closed form.

    diag: p + q_1 pt_1 - s~(q_1 pt_1);  sub 1: pt_1 + s(q_1) nu_2 e^{s^2 q - q};
    sub 2: nu_2 e^{s^2 q - q}.
    """
    b = pt3.base
    d0, d1, e = _flaschka3_arrays(b.q, b.p, pt3.q1, pt3.p1, nu2)
    return LowerBanded([d0, d1, e], 3)


def induced_group(qs: Sequence[np.ndarray], k: int) -> GroupElement:
    """G = 1 + q_1 S + ... + q_{k-2} S^{k-2} as a group element of band k."""
    n = len(qs[0]) + 1 if len(qs) else 0
    return as_group(UpperBanded([np.ones(n)] + list(qs), k))


def flaschka_k(q, p, qs: Sequence, ps: Sequence, nu, k: int) -> LowerBanded:
    """Generalized Flaschka map for any k >= 2 by dense conjugation."""
    q, p = _as_array(q), _as_array(p)
    n = len(q)
    diags = [p] + [pad(_as_array(x), n - l) for l, x in enumerate(ps, start=1)]
    diags.append(_exp_gap(q, _as_array(nu), k - 1))
    rho = LowerBanded(diags, k)
    if k == 2:
        return rho
    g = induced_group([pad(_as_array(x), n - l) for l, x in enumerate(qs, start=1)], k)
    return coadjoint_group(g, rho)


def action3(g, pt3: PhasePoint3, nu2) -> PhasePoint3:
    """GL_{+,3} action on (q, p, q_1, p_1).

    q' = q + log g_0,  q_1' = s(g_0^{-1})(g_1 + g_0 q_1),  p_1' = s(g_0) g_0^{-1} p_1,
    p' = p + d - s~^2(d),  d = g_0^{-1} nu_2 e^{s^2 q - q} (g_2 + g_1 s(q_1)).
    """
    g = as_group(g)
    b = pt3.base
    n = b.n
    gb = g.boxed(max(n, g.size))
    g0 = np.asarray(gb[0][:n], float)
    g1 = np.asarray(gb[1][:n - 1], float)
    g2 = np.asarray(gb[2][:max(n - 2, 0)], float)
    if np.any(g0 <= 0):
        raise ValueError("action needs g_0 > 0 entrywise")
    e = _exp_gap(b.q, nu2, 2)
    d = e / g0[:len(e)] * (g2 + g1[:len(e)] * pt3.q1[1:])
    p = b.p + pad(d, n) - pad(s_up(d, 2), n)
    q1 = (g1 + g0[:-1] * pt3.q1) / g0[1:]
    p1 = g0[1:] / g0[:-1] * pt3.p1
    return PhasePoint3(PhasePoint(b.q + np.log(g0), p), q1, p1)


def _dpt1(pt3: PhasePoint3, nu2, u) -> np.ndarray:
    """Directional derivative of pt_1 along u = (dq, dp, dq1, dp1)."""
    q, q1 = pt3.base.q, pt3.q1
    n = len(q)
    dq, _, dq1, dp1 = u
    e = _exp_gap(q, nu2, 2)
    m = len(e)
    de = e * (dq[2:] - dq[:m])
    return dp1 - pad(s_up(de * q1[:m] + e * dq1[:m], 1), n - 1)


def omega_eval(pt, u, v, w: Optional[NuWeight] = None) -> float:
    """Symplectic form at a point on two tangents.

    PhasePoint: the canonical form. PhasePoint3: Omega_3, i.e. the canonical
    form in (q, p) plus <dq1_u, D pt_1(v)> - <dq1_v, D pt_1(u)>.
    """
    if isinstance(pt, PhasePoint):
        if len(u) != 2 or len(v) != 2:
            raise ValueError("tangents at a PhasePoint are (dq, dp)")
        return omega_canonical(u, v)
    if isinstance(pt, PhasePoint3):
        if len(u) != 4 or len(v) != 4:
            raise ValueError("tangents at a PhasePoint3 are (dq, dp, dq1, dp1)")
        if w is None:
            raise ValueError("Omega_3 needs the weight nu_2")
        nu2 = w.nu
        base = omega_canonical(u[:2], v[:2])
        return float(base + np.dot(u[2], _dpt1(pt, nu2, v)) - np.dot(v[2], _dpt1(pt, nu2, u)))
    raise TypeError(f"unsupported point type {type(pt).__name__}")


def omega3_matrix(pt3: PhasePoint3, nu2) -> np.ndarray:
    """Matrix W with Omega_3(u, v) = u^T W v in flat coordinates."""
    n = pt3.base.n
    dim = 4 * n - 2
    w = NuWeight(nu2, 3)
    basis = [_split3(e, n) for e in np.eye(dim)]
    return np.array([[omega_eval(pt3, a, b, w) for b in basis] for a in basis])


def hamiltonians_k3(pt3: PhasePoint3, nu2, l: int) -> float:
    """H_1 = Tr p; H_2 = 1/2 Tr(J_0^2) + Tr(J_1^2) + Tr(J_2^2) for J = flaschka3."""
    if l == 1:
        return float(np.sum(pt3.base.p))
    if l == 2:
        b = pt3.base
        return _h2_k3(b.q, b.p, pt3.q1, pt3.p1, nu2)
    raise ValueError("l must be 1 or 2")


def _h2_k3(q, p, q1, p1, nu2):
    d0, d1, e = _flaschka3_arrays(q, p, q1, p1, nu2)
    return 0.5 * np.sum(d0 ** 2) + np.sum(d1 ** 2) + np.sum(e ** 2)


def complex_step_gradient(f: Callable[[np.ndarray], complex], v: np.ndarray,
                          h: float = 1e-30) -> np.ndarray:
    """Gradient of a real-analytic f by the complex-step rule, exact to roundoff."""
    v = np.asarray(v, float)
    g = np.empty(len(v))
    for i in range(len(v)):
        z = v.astype(complex)
        z[i] += 1j * h
        g[i] = np.imag(f(z)) / h
    return g


def hamiltonian_field_k3(pt3: PhasePoint3, nu2, l: int) -> np.ndarray:
    """X_H in flat coordinates, solving Omega_3(X_H, .) = dH."""
    n = pt3.base.n
    if l == 1:
        def h(z):
            return np.sum(z[n:2 * n])
    else:
        def h(z):
            return _h2_k3(*_split3(z, n), nu2)
    grad = complex_step_gradient(h, pt3.flat())
    w = omega3_matrix(pt3, nu2)
    return np.linalg.solve(w.T, grad)


def rk4_k3(pt3: PhasePoint3, nu2, l: int, T: float, steps: int) -> PhasePoint3:
    """Integrate the Omega_3 Hamiltonian flow of H_l with classical RK4."""
    n = pt3.base.n
    x = pt3.flat()
    dt = T / steps

    def f(v):
        return hamiltonian_field_k3(PhasePoint3.from_flat(v, n), nu2, l)

    for _ in range(steps):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return PhasePoint3.from_flat(x, n)


def theta_k(q, p, qs: Sequence, ps: Sequence, nu, k: int, tangent) -> float:
    """The reduced one-form Tr(p dq) + sum_m Tr(c_m dq_m) for any k >= 3.

    c_m = sum_{l=m}^{k-2} s~^{l-m}(p_l h_{l-m}) + s~^{k-1-m}(nu e^{s^{k-1}q - q} h_{k-1-m}),
    where h_i are the diagonals of (1 + q_1 S + ... + q_{k-2} S^{k-2})^{-1}.
    ``tangent`` is (dq, dp, [dq_1..dq_{k-2}], [dp_1..dp_{k-2}]).
    """
    q = np.asarray(q)
    n = len(q)
    dq, _, dqs, _ = tangent
    total = np.dot(p, dq)
    hinv = _inverse_diags(qs, k, n)
    e = _exp_gap(q, _as_array(nu), k - 1)
    for m in range(1, k - 1):
        c = np.zeros(n - m, dtype=np.result_type(q, e))
        for l in range(m, k - 1):
            pl = ps[l - 1]
            c = c + pad(s_up(pl[:len(hinv[l - m])] * hinv[l - m][:len(pl)], l - m), n - m)
        i = k - 1 - m
        c = c + pad(s_up(e * hinv[i][:len(e)], i), n - m)
        total = total + np.dot(c, dqs[m - 1])
    return total


def _inverse_diags(qs, k, n):
    """Diagonals h_0..h_{k-1} of (1 + q_1 S + ...)^{-1} in the n x n box.

    Written out with plain arithmetic so complex input is supported.
    """
    gb = [np.ones(n, dtype=np.result_type(*[np.asarray(x) for x in qs], float))]
    gb += [pad(np.asarray(x), n - l) for l, x in enumerate(qs, start=1)]
    gb += [np.zeros(n - l) for l in range(len(gb), k)]
    hb = [np.ones(n, dtype=gb[0].dtype)]
    for l in range(1, k):
        m = n - l
        acc = np.zeros(m, dtype=gb[0].dtype)
        for i in range(1, l + 1):
            acc = acc + gb[i][:m] * hb[l - i][i:i + m]
        hb.append(-acc)
    return hb


def omega_k_numeric(q, p, qs, ps, nu, k: int, u, v, h: float = 1e-30) -> float:
    """Omega_k(u, v) = -d theta(u, v) for constant fields, by complex-step derivatives."""
    n = len(q)

    def pack(qq, pp, qqs, pps):
        return np.concatenate([qq, pp] + list(qqs) + list(pps))

    sizes = [n, n] + [n - l for l in range(1, k - 1)] * 2

    def unpack(z):
        out, i = [], 0
        for s in sizes:
            out.append(z[i:i + s])
            i += s
        return out[0], out[1], out[2:k], out[k:]

    x = pack(np.asarray(q, float), np.asarray(p, float), qs, ps)
    uf, vf = pack(u[0], u[1], u[2], u[3]), pack(v[0], v[1], v[2], v[3])

    def dtheta_along(a, b):
        # derivative along a of theta(b)
        z = x.astype(complex) + 1j * h * a
        qq, pp, qqs, pps = unpack(z)
        return np.imag(theta_k(qq, pp, qqs, pps, nu, k, unpack(b))) / h

    return -(dtheta_along(uf, vf) - dtheta_along(vf, uf))
