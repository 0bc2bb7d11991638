import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cddsim.magnus import (
    bound_report,
    cdd_recursion,
    decompose,
    fidelity_estimate,
    fidelity_ratio_bound,
    finite_width_condition,
    first_order_effective,
    n_max,
    phi_cdd,
    phi_pdd,
)
from cddsim.operators import expm_hermitian, hermiticity_error, pauli, reduced_state, spectral_norm
from cddsim.propagation import evolve
from cddsim.sequence import build_cdd
from cddsim.spin_bath import SpinBathParams, build_he, random_product_state
from oracles import pauli_word, random_hermitian

Z, X, Y, I2 = pauli("Z"), pauli("X"), pauli("Y"), np.eye(2)


def random_he(seed, K=2, norm=1.0):
    return random_hermitian(np.random.default_rng(seed), 2 ** (K + 1), norm)


def test_decompose_zeeman():
    he = 2 * pauli_word("ZI") + pauli_word("IZ")
    d = decompose(he, 1)
    assert np.allclose(d.Bz, 2 * I2) and np.allclose(d.B0, Z)
    assert np.allclose(d.Bx, 0) and np.allclose(d.By, 0)


def test_decompose_heisenberg_pair():
    d = decompose(pauli_word("XX") + pauli_word("YY") + pauli_word("ZZ"), 1)
    assert np.allclose(d.Bx, X) and np.allclose(d.By, Y) and np.allclose(d.Bz, Z)
    assert np.allclose(d.B0, 0)


def test_decompose_fig2_model_norms():
    # K = 5 bath spins; couplings only enter Bx, By linearly in j
    base = decompose(build_he(SpinBathParams(2.0, 1.0, 1.0, 0.7, 5)), 5)
    doubled = decompose(build_he(SpinBathParams(2.0, 1.0, 2.0, 0.7, 5)), 5)
    assert spectral_norm(doubled.Bx) == pytest.approx(2 * spectral_norm(base.Bx), rel=1e-12)
    assert base.beta > 0 and base.J > 0
    # pure-bath Zeeman part: beta -> 5 omega_B as j -> 0
    weak = decompose(build_he(SpinBathParams(2.0, 1.0, 0.0, 0.7, 5)), 5)
    assert weak.beta == pytest.approx(5.0, abs=1e-12)
    assert weak.J == pytest.approx(2.0, abs=1e-12)


def test_decompose_dimension_check():
    with pytest.raises(ValueError):
        decompose(np.eye(8), K=3)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.integers(1, 3))
def test_reconstruction(seed, K):
    he = random_he(seed, K, 5.0)
    d = decompose(he, K)
    assert np.max(np.abs(d.reconstruct() - he)) < 1e-12
    for b in (d.B0, d.Bx, d.By, d.Bz):
        assert hermiticity_error(b) < 1e-12


def test_first_order_examples():
    b, c = random_hermitian(np.random.default_rng(1), 2), random_hermitian(np.random.default_rng(2), 2)
    for s in (X, Y, Z):
        assert np.allclose(first_order_effective(np.kron(s, b), "IXYZ"), 0, atol=1e-15)
    h = np.kron(X, b) + np.kron(Z, c)
    assert np.allclose(first_order_effective(h, ["I", "X"]), np.kron(X, b))
    assert np.allclose(first_order_effective(h, ["I"]), h)
    with pytest.raises(ValueError):
        first_order_effective(h, [])


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_pauli_twirl_leaves_pure_bath_part(seed):
    he = random_he(seed, 2, 3.0)
    d = decompose(he, 2)
    twirled = first_order_effective(he, "IXYZ")
    assert np.max(np.abs(twirled - np.kron(I2, d.B0))) < 1e-12


def test_recursion_level1_commutator_example():
    d = decompose(np.kron(X, X) + np.kron(I2, Z), 1)
    lv = cdd_recursion(d, 1, tau0=0.01)[1]
    assert np.allclose(lv.Bx, -0.02 * Y)
    assert lv.tau == pytest.approx(0.04)


@pytest.mark.parametrize("seed", range(3))
def test_recursion_zeroes_bz_and_is_hermitian(seed):
    d = decompose(random_he(seed, 2, 2.0), 2)
    chain = cdd_recursion(d, 4, tau0=0.01)
    assert [c.level for c in chain] == [0, 1, 2, 3, 4]
    for c in chain[1:]:
        assert np.array_equal(c.Bz, np.zeros_like(c.Bz))
        assert np.array_equal(c.B0, d.B0)
        for b in (c.Bx, c.By):
            assert hermiticity_error(b) < 1e-10
    assert [c.tau for c in chain] == pytest.approx([0.01 * 4**m for m in range(5)])


def test_recursion_commuting_bath_vanishes():
    b0 = np.diag([1.0, 2.0, -0.5, 0.3]).astype(complex)
    bx = np.diag([1.0, 0, 0, 0]).astype(complex)
    bz = np.diag([0, 0.4, 0, 1.0]).astype(complex)
    he = np.kron(I2, b0) + np.kron(X, bx) + np.kron(Z, bz) + np.kron(Y, np.diag([0.2, 0, 0, 0.1]))
    lv = cdd_recursion(decompose(he, 2), 1, tau0=0.1)[1]
    assert np.allclose(lv.Bx, 0) and np.allclose(lv.By, 0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), tau0=st.floats(1e-4, 0.1))
def test_recursion_norm_bound(seed, tau0):
    d = decompose(random_he(seed, 2, 2.0), 2)
    chain = cdd_recursion(d, 4, tau0)
    for prev, cur in zip(chain[1:], chain[2:]):
        assert spectral_norm(cur.Bx) <= 2 * prev.tau * d.beta * spectral_norm(prev.Bx) * (1 + 1e-9) + 1e-300
        assert spectral_norm(cur.By) <= prev.tau * d.beta * spectral_norm(prev.By) * (1 + 1e-9) + 1e-300


def test_phi_examples():
    assert phi_cdd(0.1, 0.05, 1, 4, 1) == pytest.approx(0.0025, rel=1e-14)
    assert phi_pdd(0.1, 0.05, 1, 4) == pytest.approx(0.0025, rel=1e-14)
    # beta T / sqrt(N) = 1: constant J T in n
    assert {phi_cdd(2.0, 0.3, 1, 4, n) for n in range(1, 6)} == {0.3}
    assert phi_cdd(0.5, 0.0, 1, 16, 2) == 0
    assert phi_pdd(0.1, 0.05, 1, 8) == pytest.approx(phi_pdd(0.1, 0.05, 1, 4) / 2, rel=1e-14)
    assert phi_pdd(0.0, 0.05, 1, 4) == 0


@settings(max_examples=50)
@given(beta=st.floats(0, 100), J=st.floats(0, 100), T=st.floats(1e-3, 100))
def test_phi_cdd_equals_pdd_at_n1(beta, J, T):
    assert phi_cdd(beta, J, T, 4, 1) == pytest.approx(phi_pdd(beta, J, T, 4), rel=1e-15, abs=1e-300)


def test_n_max_examples():
    assert n_max(1.0, 0.00625, 0.1) == pytest.approx(2, abs=1e-12)
    assert n_max(2.0, 0.05, 0.1) == pytest.approx(0, abs=1e-12)
    assert n_max(1.0, 0.025, 0.1) == pytest.approx(1, abs=1e-12)
    assert n_max(1.0, 1.0, 0.1) < 0
    with pytest.raises(ValueError):
        n_max(0.0, 1.0)


def test_ratio_bound_examples():
    vals = [fidelity_ratio_bound(1.0, x, 0.1) for x in (1e-2, 1e-3, 1e-4, 1e-5)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # beta tau0 = c: exponent vanishes
    assert fidelity_ratio_bound(1.0, 0.1, 0.1) == pytest.approx(1 / (4 * 0.1**2), rel=1e-12)
    # direct evaluation at beta tau0 = 1e-2, c = 0.1
    x = 1e-2
    expected = (0.1 * x) ** (-math.log(x / 0.1, 4)) / (4 * x * x)
    assert vals[0] == pytest.approx(expected, rel=1e-12)


def test_finite_width_examples():
    assert finite_width_condition(1, 1, 0.1, 0.5, 0.001) == pytest.approx(0.06)
    assert finite_width_condition(1.3, 2.0, 0.2, 0.5, 0.0) == pytest.approx(1.3 * 0.2 * 0.5)
    c, d, beta, delta = 1.5, 0.7, 2.0, 1e-4
    grid = np.geomspace(1e-4, 1, 20001)
    lhs = [finite_width_condition(c, d, t, beta, delta) for t in grid]
    assert grid[int(np.argmin(lhs))] == pytest.approx(math.sqrt(d * delta / (c * beta)), rel=1e-3)
    with pytest.raises(ValueError):
        finite_width_condition(1, 1, 0, 1, 1)


def test_fidelity_estimate_examples():
    d = decompose(np.kron(I2, Z) + 0j * np.eye(4), 1)
    assert fidelity_estimate(cdd_recursion(d, 2, 0.01)) == 1.0
    # tau_n h = 0.1 -> 0.99
    d = decompose(np.kron(X, 0.1 * I2) + np.kron(I2, Z), 1)
    assert fidelity_estimate(cdd_recursion(d, 0, 1.0), 0) == pytest.approx(0.99)


def test_fidelity_estimate_tracks_exact_infidelity():
    he = build_he(SpinBathParams(2.0, 1.0, 0.2, 0.7, 2))
    d = decompose(he, 2)
    for tau0 in (0.05, 0.02):  # j tau0 <= 0.01
        est = 1 - fidelity_estimate(cdd_recursion(d, 1, tau0), 1)
        u = evolve(build_cdd(1, tau0), he)
        infid = []
        for seed in range(20):
            psi0 = random_product_state(2, seed)
            rho = reduced_state(u @ psi0)
            w, v = np.linalg.eigh(reduced_state(psi0))
            phi = v[:, -1]
            infid.append(1 - np.real(phi.conj() @ rho @ phi))
        exact = np.mean(infid)
        assert est / 10 <= exact <= est * 10


def test_outside_assumptions_flag():
    weak = decompose(build_he(SpinBathParams(2.0, 1.0, 0.1, 0.7, 3)), 3)
    assert weak.outside_assumptions == (not weak.J < weak.beta)
    rep = bound_report(0.1, 0.5, 1, 16, 2)
    assert rep["outside_assumptions"] is True
    assert bound_report(0.5, 0.1, 1, 16, 2)["outside_assumptions"] is False


def magnus_residual(he, tau0):
    d = decompose(he)
    lv = cdd_recursion(d, 1, tau0)[1]
    u = evolve(build_cdd(1, tau0), he)
    v = expm_hermitian(lv.effective_hamiltonian(), lv.tau)
    phase = np.trace(v.conj().T @ u)
    return spectral_norm(u - v * phase / abs(phase))


@pytest.mark.parametrize("seed", range(3))
def test_second_order_magnus_residual_is_third_order(seed):
    he = random_he(seed, 2, 1.0)
    beta = decompose(he).beta
    taus = np.geomspace(1e-3, 1e-2, 5) / beta
    errs = [magnus_residual(he, t) for t in taus]
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    assert slope >= 2.5
