import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toda.flaschka import (
    NuWeight,
    PhasePoint,
    PhasePoint3,
    _split3,
    action3,
    canonical_bracket,
    complex_step_gradient,
    flaschka3,
    flaschka_k,
    flaschka_map,
    hamiltonian_field_k3,
    hamiltonians_k3,
    linear_gradient,
    omega3_matrix,
    omega_eval,
    omega_k_numeric,
    p_tilde1,
    rk4_k3,
    sigma_action,
    theta_k,
    toda_hamiltonian,
)
from toda.lie_poisson import coadjoint_group, poisson_bracket_linear
from toda.multidiag_algebra import UpperBanded, as_group, circ_k, identity


def rand_point3(rng, n):
    return PhasePoint3(PhasePoint(rng.normal(scale=0.4, size=n), rng.normal(size=n)),
                       rng.normal(size=n - 1), rng.normal(size=n - 1))


def test_flaschka_examples():
    out = flaschka_map(PhasePoint([0, 0], [1, 2]), NuWeight([0], 2))
    assert np.array_equal(out.rho0, [1, 2]) and np.array_equal(out.rho_km1, [0])
    out = flaschka_map(PhasePoint([0, np.log(2)], [0, 0]), NuWeight([1], 2))
    assert np.allclose(out.rho_km1, [2], rtol=1e-15)
    out = flaschka_map(PhasePoint([0, 0, 0], [1, -1, 0]), NuWeight([5], 3))
    assert np.array_equal(out.rho0, [1, -1, 0]) and np.array_equal(out.rho_km1, [5])


@given(st.lists(st.floats(-2, 2), min_size=2, max_size=6), st.floats(-5, 5))
def test_translation_invariance(q, alpha):
    q = np.array(q)
    w = NuWeight(np.linspace(0.5, 1.5, len(q) - 1), 2)
    a = flaschka_map(PhasePoint(q, np.zeros_like(q)), w).rho_km1
    b = flaschka_map(PhasePoint(q + alpha, np.zeros_like(q)), w).rho_km1
    assert np.allclose(a, b, rtol=1e-12, atol=0)


def test_sigma_action_examples():
    w = NuWeight([1], 2)
    pt = PhasePoint([0, 0], [0, 0])
    out = sigma_action(identity(2), pt, w)
    assert np.array_equal(out.q, [0, 0]) and np.array_equal(out.p, [0, 0])
    g = UpperBanded([[1, 2], [1]])
    out = sigma_action(g, pt, w)
    assert np.allclose(out.q, [0, np.log(2)]) and np.allclose(out.p, [1, -1])
    lhs = sigma_action(g, sigma_action(g, pt, w), w)
    rhs = sigma_action(circ_k(as_group(g), as_group(g)), pt, w)
    assert np.allclose(lhs.q, rhs.q, atol=1e-14) and np.allclose(lhs.p, rhs.p, atol=1e-14)


def test_sigma_action_rejects_nonpositive_g0():
    with pytest.raises(ValueError):
        sigma_action(UpperBanded([[1, -2], [1]]), PhasePoint([0, 0], [0, 0]), NuWeight([1], 2))


def test_sigma_action_rejects_middle_slots():
    g = UpperBanded([[1, 1, 1], [1, 0], [0]])
    with pytest.raises(ValueError):
        sigma_action(g, PhasePoint([0, 0, 0], [0, 0, 0]), NuWeight([1], 3))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_sigma_action_is_an_action(rng, k):
    n = 6
    w = NuWeight(rng.uniform(0.5, 1.5, n - k + 1), k)
    pt = PhasePoint(rng.normal(size=n), rng.normal(size=n))

    def rg():
        return as_group(UpperBanded([rng.uniform(0.5, 2, n)] + [np.zeros(n - i) for i in range(1, k - 1)]
                                    + [rng.normal(size=n - k + 1)], k))

    g, h = rg(), rg()
    lhs = sigma_action(g, sigma_action(h, pt, w), w)
    rhs = sigma_action(circ_k(g, h), pt, w)
    assert np.allclose(lhs.q, rhs.q, atol=1e-13) and np.allclose(lhs.p, rhs.p, atol=1e-13)


def test_toda_hamiltonian_examples():
    w = NuWeight([1, 1], 2)
    assert toda_hamiltonian(PhasePoint([0, 0, 0], [1, 2, -3]), w, 1) == 0
    assert toda_hamiltonian(PhasePoint([0, 0, 0], [0, 0, 0]), w, 2) == 2
    assert toda_hamiltonian(PhasePoint([0], [3]), NuWeight([], 2), 2) == 4.5


def test_toda_hamiltonian_is_casimir_of_symmetric_image(rng):
    pt = PhasePoint(rng.normal(size=5), rng.normal(size=5))
    w = NuWeight(rng.uniform(0.5, 1.5, 4), 2)
    J = flaschka_map(pt, w)
    M = np.diag(J.rho0) + np.diag(J.rho_km1, 1) + np.diag(J.rho_km1, -1)
    for l in (1, 2, 3, 4):
        assert abs(toda_hamiltonian(pt, w, l) - np.trace(np.linalg.matrix_power(M, l)) / l) <= 1e-12


@pytest.mark.parametrize("k", [2, 3, 4])
def test_linear_gradient_against_complex_step(rng, k):
    n = 6
    pt = PhasePoint(rng.normal(size=n), rng.normal(size=n))
    w = NuWeight(rng.uniform(0.5, 1.5, n - k + 1), k)
    x = UpperBanded([rng.normal(size=n)] + [np.zeros(n - i) for i in range(1, k - 1)]
                    + [rng.normal(size=n - k + 1)], k)

    def f(z):
        q, p = z[:n], z[n:]
        e = w.nu * np.exp(q[k - 1:] - q[:n - k + 1])
        return np.sum(p * x[0]) + np.sum(e * x[k - 1])

    g = complex_step_gradient(f, np.concatenate([pt.q, pt.p]))
    dq, dp = linear_gradient(x, pt, w)
    assert np.allclose(g, np.concatenate([dq, dp]), atol=1e-13)


def test_momentum_map_k2_by_hand():
    # n = 2, k = 2: J = (p, nu e^{q1-q0}); x = diag(0,1), y = S
    pt = PhasePoint([0.3, -0.2], [1.0, 2.0])
    w = NuWeight([1.5], 2)
    x, y = UpperBanded([[0, 1], [0]]), UpperBanded([[0, 0], [1]])
    lhs = canonical_bracket(linear_gradient(x, pt, w), linear_gradient(y, pt, w))
    rho1 = 1.5 * np.exp(-0.5)
    assert np.isclose(lhs, -rho1, rtol=1e-14)
    assert np.isclose(poisson_bracket_linear(x, y, flaschka_map(pt, w).to_lower()), -rho1, rtol=1e-14)


def test_flaschka3_examples():
    pt = PhasePoint3(PhasePoint([0.1, 0.4, -0.2, 0.3], [1, 2, 3, 4]), [0, 0, 0], [0, 0, 0])
    nu = [0.7, 1.3]
    out = flaschka3(pt, nu)
    base = flaschka_map(pt.base, NuWeight(nu, 3))
    assert np.allclose(out[0], base.rho0) and np.allclose(out[1], 0) and np.allclose(out[2], base.rho_km1)
    pt = PhasePoint3(PhasePoint([0, 0, 0], [0, 0, 0]), [1, 0], [0, 0])
    assert np.allclose(p_tilde1(pt, [1.0]), [0, -1])
    out = flaschka3(pt, [1.0])
    assert np.allclose(out[0], [0, 0, 0]) and np.allclose(out[1], [0, -1]) and np.allclose(out[2], [1])


def test_flaschka3_matches_dense_conjugation(rng):
    for _ in range(5):
        n = 6
        pt = rand_point3(rng, n)
        nu = rng.uniform(0.5, 1.5, n - 2)
        b = pt.base
        G = np.eye(n) + np.diag(pt.q1, 1)
        R = np.diag(b.p) + np.diag(pt.p1, -1) + np.diag(nu * np.exp(b.q[2:] - b.q[:-2]), -2)
        dense = G @ R @ np.linalg.inv(G)
        out = flaschka3(pt, nu)
        for j in range(3):
            assert np.allclose(out[j], np.diagonal(dense, -j), atol=1e-13)
        assert flaschka_k(b.q, b.p, [pt.q1], [pt.p1], nu, 3).max_abs_diff(out) <= 1e-13


def test_action3_equivariance(rng):
    for _ in range(10):
        n = 6
        pt = rand_point3(rng, n)
        nu = rng.uniform(0.5, 1.5, n - 2)
        g = as_group(UpperBanded([rng.uniform(0.5, 2, n), rng.normal(size=n - 1), rng.normal(size=n - 2)], 3))
        lhs = flaschka3(action3(g, pt, nu), nu)
        rhs = coadjoint_group(g, flaschka3(pt, nu))
        assert lhs.max_abs_diff(rhs) <= 1e-10


def test_omega_examples():
    e0 = np.array([1.0, 0.0])
    z = np.zeros(2)
    pt = PhasePoint([0, 0], [0, 0])
    assert omega_eval(pt, (e0, z), (z, e0)) == 1
    assert omega_eval(pt, (e0, e0), (e0, e0)) == 0
    pt3 = PhasePoint3(PhasePoint([0.2, 0.1, 0.5], [1, 2, 3]), [0.3, 0.4], [1, 1])
    w = NuWeight([0.0], 3)
    z3, z2, e = np.zeros(3), np.zeros(2), np.array([1.0, 0.0])
    assert omega_eval(pt3, (z3, z3, e, z2), (z3, z3, z2, e), w) == 1


def test_omega3_matches_minus_d_theta(rng):
    n = 5
    pt = rand_point3(rng, n)
    nu = rng.uniform(0.5, 1.5, n - 2)
    b = pt.base
    for _ in range(5):
        u = [rng.normal(size=s) for s in (n, n, n - 1, n - 1)]
        v = [rng.normal(size=s) for s in (n, n, n - 1, n - 1)]
        a = omega_eval(pt, u, v, NuWeight(nu, 3))
        num = omega_k_numeric(b.q, b.p, [pt.q1], [pt.p1], nu, 3, (u[0], u[1], [u[2]], [u[3]]),
                              (v[0], v[1], [v[2]], [v[3]]))
        assert abs(a - num) <= 1e-12 * (1 + abs(a))


def test_theta_k3_is_p_dq_plus_ptilde_dq1(rng):
    n = 5
    pt = rand_point3(rng, n)
    nu = rng.uniform(0.5, 1.5, n - 2)
    b = pt.base
    u = [rng.normal(size=s) for s in (n, n, n - 1, n - 1)]
    th = theta_k(b.q, b.p, [pt.q1], [pt.p1], nu, 3, (u[0], u[1], [u[2]], [u[3]]))
    assert np.isclose(th, b.p @ u[0] + p_tilde1(pt, nu) @ u[2], rtol=1e-13)


def test_omega3_canonical_in_shifted_momentum(rng):
    # Omega_3 = -d[Tr(p dq) + Tr(pt_1 dq_1)]: with coordinates (q, p, q_1, pt_1) it is canonical
    n = 5
    pt = rand_point3(rng, n)
    nu = rng.uniform(0.5, 1.5, n - 2)
    W = omega3_matrix(pt, nu)
    # Jacobian of the change of variables (q, p, q1, p1) -> (q, p, q1, pt1)
    def phi(z):
        q, p, q1, p1 = _split3(z, n)
        e = nu * np.exp(q[2:] - q[:-2])
        pt1 = p1 - np.concatenate([[0], e * q1[:-1]])
        return np.concatenate([q, p, q1, pt1])

    x = pt.flat()
    J = np.array([complex_step_gradient(lambda z, i=i: phi(z)[i], x) for i in range(len(x))])
    m = 2 * n - 1
    std = np.zeros((2 * m, 2 * m))
    # canonical: sum dq_i ^ dp_i on blocks (q,p) and (q1,pt1)
    for i in range(n):
        std[i, n + i], std[n + i, i] = 1, -1
    for i in range(n - 1):
        a, c = 2 * n + i, 3 * n - 1 + i
        std[a, c], std[c, a] = 1, -1
    assert np.allclose(W, J.T @ std @ J, atol=1e-12)


def test_hamiltonians_k3_examples():
    zero3 = PhasePoint3(PhasePoint([0, 0, 0], [0, 0, 0]), [0, 0], [0, 0])
    assert hamiltonians_k3(PhasePoint3(PhasePoint([0, 0], [1, -1]), [0], [0]), [], 1) == 0
    # only the Tr(nu e)^2 term survives at the origin
    assert hamiltonians_k3(zero3, [1.0], 2) == 1
    assert hamiltonians_k3(PhasePoint3(PhasePoint([0, 0], [2, 0]), [0], [3]), [], 2) == 11


def test_hamiltonians_k3_are_casimirs_of_symmetrized_map(rng):
    n = 6
    pt = rand_point3(rng, n)
    nu = rng.uniform(0.5, 1.5, n - 2)
    J = flaschka3(pt, nu)
    M = np.diag(J[0]) + np.diag(J[1], -1) + np.diag(J[1], 1) + np.diag(J[2], -2) + np.diag(J[2], 2)
    assert np.isclose(hamiltonians_k3(pt, nu, 2), np.trace(M @ M) / 2, rtol=1e-13)
    assert np.isclose(hamiltonians_k3(pt, nu, 1), np.trace(M) - np.sum(J[0] - pt.base.p), rtol=1e-13)


def test_pulled_back_flow_maps_to_lax_flow(rng):
    # the Omega_3 flow of H_2 pushed through J_3 solves the symmetric Lax flow with power 1
    from toda.lax_oracle import rk4_lax

    n = 5
    pt = rand_point3(rng, n)
    nu = rng.uniform(0.5, 1.5, n - 2)

    def sym(J):
        return np.diag(J[0]) + np.diag(J[1], -1) + np.diag(J[1], 1) + np.diag(J[2], -2) + np.diag(J[2], 2)

    T = 0.3
    end = rk4_k3(pt, nu, 2, T, 300)
    ref = rk4_lax(sym(flaschka3(pt, nu)), 1, T, 300)
    assert np.max(np.abs(sym(flaschka3(end, nu)) - ref)) <= 1e-9


def test_hamiltonian_field_of_h1_translates_q(rng):
    n = 5
    pt = rand_point3(rng, n)
    X = hamiltonian_field_k3(pt, rng.uniform(0.5, 1.5, n - 2), 1)
    dq, dp, dq1, dp1 = _split3(X, n)
    assert np.allclose(dq, 1, atol=1e-12) and np.allclose(dp, 0, atol=1e-12)
    assert np.allclose(dq1, 0, atol=1e-12) and np.allclose(dp1, 0, atol=1e-12)


def test_general_k_momentum_map_k4(rng):
    # with Omega_4 = -d theta_4, J_4 is a momentum map for the full 4-band algebra
    n, k = 6, 4
    q, p = rng.normal(scale=0.3, size=n), rng.normal(size=n)
    qs = [rng.normal(size=n - 1), rng.normal(size=n - 2)]
    ps = [rng.normal(size=n - 1), rng.normal(size=n - 2)]
    nu = rng.uniform(0.5, 1.5, n - 3)
    sizes = [n, n, n - 1, n - 2, n - 1, n - 2]
    dim = sum(sizes)

    def unpack(z):
        out, i = [], 0
        for s in sizes:
            out.append(z[i:i + s])
            i += s
        return out[0], out[1], out[2:4], out[4:6]

    E = np.eye(dim)
    W = np.array([[omega_k_numeric(q, p, qs, ps, nu, k, unpack(a), unpack(b)) for b in E] for a in E])
    assert np.allclose(W, -W.T, atol=1e-13)
    x0 = np.concatenate([q, p] + qs + ps)

    def lin(x):
        def f(z):
            qq, pp, qqs, pps = unpack(z)
            G = np.eye(n, dtype=complex) + np.diag(qqs[0], 1) + np.diag(qqs[1], 2)
            R = np.diag(pp) + np.diag(pps[0], -1) + np.diag(pps[1], -2) + np.diag(nu * np.exp(qq[3:] - qq[:-3]), -3)
            M = G @ R @ np.linalg.inv(G)
            return sum(np.sum(np.diagonal(M, -j) * x[j]) for j in range(k))
        return f

    x = [rng.normal(size=n - i) for i in range(k)]
    y = [rng.normal(size=n - i) for i in range(k)]
    Xf = np.linalg.solve(W.T, complex_step_gradient(lin(x), x0))
    Xg = np.linalg.solve(W.T, complex_step_gradient(lin(y), x0))
    J = flaschka_k(q, p, qs, ps, nu, k)
    assert abs(Xf @ W @ Xg - poisson_bracket_linear(UpperBanded(x, k), UpperBanded(y, k), J)) <= 1e-10


def test_toda_hamiltonians_conserved_along_spectral_flow(rng):
    from toda.spectral_solver import JacobiBanded, toda_solve

    n = 5
    nu = rng.uniform(0.5, 1.5, n - 1)
    pt = PhasePoint(rng.normal(scale=0.3, size=n), rng.normal(scale=0.5, size=n))
    w = NuWeight(nu, 2)
    J = flaschka_map(pt, w)
    Jt = toda_solve(JacobiBanded(J.rho0, J.rho_km1), {1: 0.8, 2: -0.3})
    # pull back through the chart: q_{i+1} - q_i = log(rho_1 / nu), q_0 fixed
    q = np.concatenate([[0.0], np.cumsum(np.log(Jt.offdiag / nu))])
    back = PhasePoint(q, Jt.diag)
    for m in range(1, 5):
        assert abs(toda_hamiltonian(back, w, m) - toda_hamiltonian(pt, w, m)) <= 1e-8
