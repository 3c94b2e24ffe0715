"""Residual checks for the structural identities, shared by the CLI report.

Each check returns the worst residual found; tolerances live with the caller.
"""

from __future__ import annotations

import numpy as np

from .flaschka import (
    NuWeight,
    PhasePoint,
    canonical_bracket,
    flaschka_map,
    linear_gradient,
    sigma_action,
)
from .lax_oracle import casimir, rk4_lax
from .lie_poisson import coadjoint_group, poisson_bracket_linear
from .multidiag_algebra import UpperBanded, as_group
from .spectral_solver import (
    JacobiBanded,
    SpectralData,
    evolve_spectral,
    moments,
    spectral_decompose,
    tau_eval,
    toda_solve,
)

DEFAULT_TOLS = {
    "isospectrality": 1e-10,
    "moment_ode": 1e-6,
    "hirota": 1e-6,
    "momentum_map": 1e-10,
    "involution": 1e-8,
    "equivariance": 1e-10,
}


def random_jacobi(rng: np.random.Generator, n: int, lo: float = 0.05, hi: float = 0.95) -> JacobiBanded:
    """Random Jacobi matrix with off-diagonal in [0.1, 0.5], spectrum rescaled into (lo, hi)."""
    J = JacobiBanded(rng.uniform(0, 1, n), rng.uniform(0.1, 0.5, max(n - 1, 0)))
    if n == 1:
        return JacobiBanded([0.5 * (lo + hi)])
    lam = np.linalg.eigvalsh(J.to_dense())
    c = (hi - lo) / (lam[-1] - lam[0])
    return JacobiBanded(c * J.diag + lo - c * lam[0], c * J.offdiag)


def isospectral_drift(J0: JacobiBanded, times: list) -> float:
    lam0 = np.linalg.eigvalsh(J0.to_dense())
    worst = 0.0
    for t in times:
        lam = np.linalg.eigvalsh(toda_solve(J0, t).to_dense())
        worst = max(worst, float(np.max(np.abs(lam - lam0))))
    return worst


def moment_ode_residual(sd0: SpectralData, kmax: int = 6, flows=(1, 2, 3),
                        base: dict = None, h: float = 1e-4) -> float:
    """Relative residual of d sigma_k/dt_l = 2(sigma_{k+l} - sigma_l sigma_k)."""
    base = dict(base or {})
    K = kmax + max(flows)
    s0 = np.array(moments(evolve_spectral(sd0, base), K).sigmas)
    worst = 0.0
    for l in flows:
        tp, tm = dict(base), dict(base)
        tp[l] = tp.get(l, 0.0) + h
        tm[l] = tm.get(l, 0.0) - h
        sp = np.array(moments(evolve_spectral(sd0, tp), kmax).sigmas)
        sm = np.array(moments(evolve_spectral(sd0, tm), kmax).sigmas)
        for k in range(kmax + 1):
            fd = (sp[k] - sm[k]) / (2 * h)
            rhs = 2 * (s0[k + l] - s0[l] * s0[k])
            scale = 2 * (abs(s0[k + l]) + abs(s0[l] * s0[k]))
            worst = max(worst, abs(fd - rhs) / scale)
    return worst


def hirota_residual(sd0: SpectralData, lmax: int = 3, h: float = 2e-4, tau0: float = 1.0) -> float:
    """Relative residual of d^2 tau / dt_l dt_k = 2 d tau / dt_{k+l}."""

    def tau(shifts):
        t = {}
        for i, v in shifts:
            t[i] = t.get(i, 0.0) + v
        return tau_eval(sd0, t, tau0)

    worst = 0.0
    for l in range(1, lmax + 1):
        for k in range(l, lmax + 1):
            if l == k:
                d2 = (tau([(l, h)]) - 2 * tau([]) + tau([(l, -h)])) / h ** 2
            else:
                d2 = (tau([(l, h), (k, h)]) - tau([(l, h), (k, -h)])
                      - tau([(l, -h), (k, h)]) + tau([(l, -h), (k, -h)])) / (4 * h * h)
            d1 = (tau([(k + l, h)]) - tau([(k + l, -h)])) / (2 * h)
            worst = max(worst, abs(d2 - 2 * d1) / abs(2 * d1))
    return worst


def _rand_bidiag_x(rng, n, k):
    return UpperBanded([rng.normal(size=n)] + [np.zeros(n - i) for i in range(1, k - 1)]
                       + [rng.normal(size=n - k + 1)], k)


def momentum_map_residual(rng: np.random.Generator, n: int = 6, ks=(2, 3), pairs: int = 50) -> float:
    worst = 0.0
    for k in ks:
        for _ in range(pairs):
            pt = PhasePoint(rng.normal(scale=0.5, size=n), rng.normal(size=n))
            w = NuWeight(rng.uniform(0.2, 1.5, n - k + 1), k)
            x, y = _rand_bidiag_x(rng, n, k), _rand_bidiag_x(rng, n, k)
            lhs = canonical_bracket(linear_gradient(x, pt, w), linear_gradient(y, pt, w))
            rhs = poisson_bracket_linear(x, y, flaschka_map(pt, w).to_lower())
            worst = max(worst, abs(lhs - rhs))
    return worst


def random_bidiag_group(rng: np.random.Generator, n: int, k: int):
    body = UpperBanded([rng.uniform(0.5, 2.0, n)] + [np.zeros(n - i) for i in range(1, k - 1)]
                       + [rng.normal(size=n - k + 1)], k)
    return as_group(body)


def equivariance_residual(rng: np.random.Generator, n: int = 6, ks=(2, 3), count: int = 50) -> float:
    worst = 0.0
    for k in ks:
        for _ in range(count):
            pt = PhasePoint(rng.normal(scale=0.5, size=n), rng.normal(size=n))
            w = NuWeight(rng.uniform(0.2, 1.5, n - k + 1), k)
            g = random_bidiag_group(rng, n, k)
            lhs = flaschka_map(sigma_action(g, pt, w), w).to_lower()
            rhs = coadjoint_group(g, flaschka_map(pt, w).to_lower())
            worst = max(worst, lhs.max_abs_diff(rhs))
    return worst


def involution_residual(J0: JacobiBanded, lmax: int = 4, T: float = 1.0, steps: int = 400) -> float:
    """Drift of I_m along the Hamiltonian flow of I_l (power l - 1), all l, m <= lmax."""
    M0 = J0.to_dense()
    worst = 0.0
    for l in range(1, lmax + 1):
        M = rk4_lax(M0, l - 1, T, steps)
        for m in range(1, lmax + 1):
            worst = max(worst, abs(float(casimir(M, m) - casimir(M0, m))))
    return worst


def run_suite(J0: JacobiBanded, rng: np.random.Generator, tols: dict) -> list:
    """Evaluate every check; returns a list of report entries."""
    sd0 = spectral_decompose(J0)
    times = [{1: 1.0}, {2: 1.0}, {3: 1.0}, {1: 0.5, 3: 0.25}]
    residuals = {
        "isospectrality": isospectral_drift(J0, times),
        "moment_ode": moment_ode_residual(sd0),
        "hirota": hirota_residual(sd0),
        "momentum_map": momentum_map_residual(rng),
        "involution": involution_residual(J0),
        "equivariance": equivariance_residual(rng),
    }
    return [
        {"name": name, "residual": r, "tol": tols[name], "pass": bool(r <= tols[name])}
        for name, r in residuals.items()
    ]
