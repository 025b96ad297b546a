import json

import numpy as np
import pytest

import vcqe
from vcqe import (
    OccupationSpec,
    StateVector,
    TwoBodyCoefficients,
    apply_hamiltonian,
    apply_two_body,
    build_hamiltonian,
    compute_2rdm,
    cse_norm,
    enumerate_sector,
    exp_apply,
    expectation,
    initial_state,
    pair_basis,
    parse_fcidump,
    spin_expectations,
    variance,
)
from vcqe.statevector import coupling_table, pair_transition_matrix, taylor_exp_action, two_body_matrix

from conftest import BH_DIR, H4_FCIDUMP
from oracles import (
    dense_expm_antisymmetric,
    dense_hamiltonian_fock,
    pair_operator,
    project,
    sector_projector,
    slater_condon_matrix,
)


def random_state(basis, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=len(basis))
    return StateVector(basis, c / np.linalg.norm(c))


def random_anti_hermitian(pb, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    P = len(pb)
    raw = rng.normal(size=(P, P)) * pb.allowed
    A = scale * 0.5 * (raw - raw.T)
    return TwoBodyCoefficients(pb, A)


# ---------------------------------------------------------------- Hamiltonian

def test_h2_matrix_matches_slater_condon(h2_integrals, h2_basis, h2_hamiltonian):
    """Repeated application to unit vectors vs the independent SC oracle."""
    dim = len(h2_basis)
    dense = np.zeros((dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        dense[:, j] = apply_hamiltonian(h2_hamiltonian, StateVector(h2_basis, e))
    oracle = slater_condon_matrix(h2_integrals, h2_basis.determinants, 4)
    assert np.abs(dense - oracle).max() < 1e-12


def test_h4_matrix_matches_slater_condon(h4_integrals, h4_basis, h4_hamiltonian):
    oracle = slater_condon_matrix(h4_integrals, h4_basis.determinants, 8)
    assert np.abs(h4_hamiltonian.matrix.toarray() - oracle).max() < 1e-12


def test_h2_matrix_matches_fock_space_operator(h2_integrals, h2_basis, h2_hamiltonian):
    """Third route: full 16x16 second-quantized operator, projected."""
    full = dense_hamiltonian_fock(h2_integrals, 4)
    P = sector_projector(4, h2_basis.determinants)
    assert np.abs(h2_hamiltonian.matrix.toarray() - project(full, P)).max() < 1e-11


def test_eigenvector_residual(h4_hamiltonian, h4_spectrum):
    v = h4_spectrum.eigenvectors[0]
    hv = apply_hamiltonian(h4_hamiltonian, v)
    res = hv - h4_spectrum.eigenvalues[0] * v.coefficients
    assert np.linalg.norm(res) < 1e-12


def test_one_electron_diagonal_action():
    # diagonal h only: a single determinant scales by sum of occupied h_pp + core
    n = 3
    h = np.diag([-1.0, -0.5, 0.25])
    v = np.zeros((n, n, n, n))
    ints = vcqe.MolecularIntegrals(n_spatial=n, n_electrons=2, core_energy=0.3,
                                   h=h, v=v)
    basis = enumerate_sector(n, 1, 1)
    H = build_hamiltonian(ints, basis)
    psi = initial_state(basis, OccupationSpec((0,), (1,)))
    out = apply_hamiltonian(H, psi)
    expected = (-1.0 + -0.5 + 0.3) * psi.coefficients
    assert np.abs(out - expected).max() < 1e-14


def test_hamiltonian_symmetry(h4_hamiltonian, h4_basis):
    phi = random_state(h4_basis, 1)
    psi = random_state(h4_basis, 2)
    lhs = phi.coefficients @ apply_hamiltonian(h4_hamiltonian, psi)
    rhs = apply_hamiltonian(h4_hamiltonian, phi) @ psi.coefficients
    assert abs(lhs - rhs) < 1e-12


def test_basis_mismatch_rejected(h4_hamiltonian):
    other = enumerate_sector(4, 3, 1)
    psi = random_state(other, 0)
    with pytest.raises(ValueError, match="sector"):
        apply_hamiltonian(h4_hamiltonian, psi)


# ---------------------------------------------------------------- expectation

def test_expectation_eigenvector(h4_hamiltonian, h4_spectrum):
    for k in (0, 3, 7):
        assert expectation(h4_spectrum.eigenvectors[k], h4_hamiltonian) == \
            pytest.approx(h4_spectrum.eigenvalues[k], abs=1e-12)


def test_expectation_degenerate_superposition():
    ints = parse_fcidump((BH_DIR / "bh_sto6g_r1.2.fcidump").read_text())
    basis = enumerate_sector(5, 2, 2)
    H = build_hamiltonian(ints, basis)
    spec = vcqe.diagonalize(H)
    e1, e2 = spec.eigenvalues[1], spec.eigenvalues[2]
    assert abs(e1 - e2) < 1e-10
    mix = StateVector(basis, (spec.eigenvectors[1].coefficients
                              + spec.eigenvectors[2].coefficients) / np.sqrt(2))
    assert expectation(mix, H) == pytest.approx(e1, abs=1e-10)


def test_hf_energy_matches_generator_scf(h4_hamiltonian, h4_basis):
    sidecar = json.loads((H4_FCIDUMP.parent / (H4_FCIDUMP.name + ".json")).read_text())
    hf = initial_state(h4_basis, OccupationSpec((0, 1), (0, 1)))
    assert expectation(hf, h4_hamiltonian) == pytest.approx(
        sidecar["scf_energy"], abs=1e-8)


def test_unnormalized_state_rejected(h4_hamiltonian, h4_basis):
    bad = StateVector(h4_basis, np.full(len(h4_basis), 0.5))
    with pytest.raises(ValueError, match="normalized"):
        expectation(bad, h4_hamiltonian)


# ------------------------------------------------------------------- variance

def test_variance_zero_at_eigenvector(h4_hamiltonian, h4_spectrum):
    assert variance(h4_spectrum.eigenvectors[2], h4_hamiltonian) < 1e-12


def test_variance_two_level(h2_hamiltonian, h2_basis):
    spec = vcqe.diagonalize(h2_hamiltonian)
    e0, e1 = spec.eigenvalues[:2]
    mix = StateVector(h2_basis, (spec.eigenvectors[0].coefficients
                                 + spec.eigenvectors[1].coefficients) / np.sqrt(2))
    assert variance(mix, h2_hamiltonian) == pytest.approx((e1 - e0) ** 2 / 4,
                                                          abs=1e-12)


def test_variance_decomposition(h4_hamiltonian, h4_basis):
    for seed in range(5):
        psi = random_state(h4_basis, seed)
        hpsi = apply_hamiltonian(h4_hamiltonian, psi)
        h2 = psi.coefficients @ apply_hamiltonian(
            h4_hamiltonian, StateVector(h4_basis, hpsi / np.linalg.norm(hpsi)))
        h2 *= np.linalg.norm(hpsi)
        e = expectation(psi, h4_hamiltonian)
        assert variance(psi, h4_hamiltonian) == pytest.approx(h2 - e * e, abs=1e-10)


# -------------------------------------------------------------- two-body ops

def test_number_operator_combination(h4_basis):
    pb = pair_basis(4)
    det_spec = OccupationSpec((0, 1), (0, 1))
    psi = initial_state(h4_basis, det_spec)
    A = np.zeros((len(pb), len(pb)))
    i = pb.index(0, 1)          # alpha-alpha occupied pair
    A[i, i] = 0.7
    out = apply_two_body(TwoBodyCoefficients(pb, A), psi)
    assert np.abs(out - 0.7 * psi.coefficients).max() < 1e-14


def test_single_coefficient_hop():
    basis = enumerate_sector(2, 1, 1)
    pb = pair_basis(2)
    psi = initial_state(basis, OccupationSpec((0,), (0,)))  # alpha0 beta0
    A = np.zeros((len(pb), len(pb)))
    # move alpha 0 -> 1 keeping beta 0: create (1, beta0), annihilate (0, beta0)
    A[pb.index(1, 2), pb.index(0, 2)] = 1.0
    out = apply_two_body(TwoBodyCoefficients(pb, A), psi)
    target = initial_state(basis, OccupationSpec((1,), (0,)))
    assert np.abs(out - target.coefficients).max() < 1e-14


def test_apply_two_body_matches_dense_gamma_oracle(h4_basis):
    """Random sparse coefficients against the JW pair-operator matrices."""
    pb = pair_basis(4)
    rng = np.random.default_rng(42)
    P = len(pb)
    A = np.zeros((P, P))
    entries = 0
    while entries < 12:
        i, j = rng.integers(0, P, size=2)
        if pb.allowed[i, j]:
            A[i, j] = rng.normal()
            entries += 1
    F = TwoBodyCoefficients(pb, A)

    Psel = sector_projector(8, h4_basis.determinants)
    dense = np.zeros((len(h4_basis), len(h4_basis)))
    for i, (p, q) in enumerate(pb.pairs):
        for j, (s, t) in enumerate(pb.pairs):
            if A[i, j] != 0.0:
                dense += A[i, j] * project(pair_operator(8, p, q, s, t), Psel)

    psi = random_state(h4_basis, 5)
    assert np.abs(apply_two_body(F, psi) - dense @ psi.coefficients).max() < 1e-12
    assert np.abs(two_body_matrix(F, h4_basis) - dense).max() < 1e-12


def test_sz_breaking_coefficients_rejected():
    pb = pair_basis(2)
    A = np.zeros((len(pb), len(pb)))
    aa = pb.index(0, 1)   # alpha-alpha
    bb = pb.index(2, 3)   # beta-beta
    A[aa, bb] = 0.2
    with pytest.raises(ValueError, match="S_z"):
        TwoBodyCoefficients(pb, A)


# ------------------------------------------------------------------ exp_apply

def test_exp_apply_zero_scale(h4_basis):
    pb = pair_basis(4)
    A = random_anti_hermitian(pb, 1)
    psi = random_state(h4_basis, 3)
    out = exp_apply(A, 0.0, psi)
    assert np.abs(out.coefficients - psi.coefficients).max() < 1e-15


def test_exp_apply_inverse(h4_basis):
    pb = pair_basis(4)
    A = random_anti_hermitian(pb, 2, scale=0.6)
    psi = random_state(h4_basis, 4)
    back = exp_apply(A, -1.0, exp_apply(A, 1.0, psi))
    assert np.abs(back.coefficients - psi.coefficients).max() < 1e-12


def test_exp_apply_matches_dense_eigendecomposition(h2_basis):
    pb = pair_basis(2)
    for seed in range(6):
        A = random_anti_hermitian(pb, seed, scale=0.8)
        psi = random_state(h2_basis, seed + 50)
        got = exp_apply(A, 1.0, psi)
        dense = dense_expm_antisymmetric(two_body_matrix(A, h2_basis))
        want = dense @ psi.coefficients
        want /= np.linalg.norm(want)
        assert np.abs(got.coefficients - want).max() < 1e-10


def test_exp_apply_norm_drift(h4_basis):
    pb = pair_basis(4)
    for seed in range(4):
        A = random_anti_hermitian(pb, seed)
        scale = 1.0 / max(A.norm, 1.0)
        psi = random_state(h4_basis, seed + 9)
        raw = taylor_exp_action(two_body_matrix(A, h4_basis), psi.coefficients,
                                scale=scale)
        assert abs(np.linalg.norm(raw) - 1.0) < 1e-12


def test_exp_apply_divergence_error(h4_basis):
    pb = pair_basis(4)
    A = random_anti_hermitian(pb, 0, scale=500.0)
    psi = random_state(h4_basis, 1)
    with pytest.raises(vcqe.ExponentialSeriesError, match="scale"):
        exp_apply(A, 1.0, psi)


# --------------------------------------------------------------------- 2-RDM

def test_2rdm_single_determinant(h4_basis):
    psi = initial_state(h4_basis, OccupationSpec((0, 1), (0, 1)))
    D = compute_2rdm(psi)
    occupied = (0, 1, 4, 5)
    for p in occupied:
        for q in occupied:
            if p < q:
                assert D.element(p, q, p, q) == pytest.approx(1.0, abs=1e-14)
                assert D.element(q, p, p, q) == pytest.approx(-1.0, abs=1e-14)
    assert D.element(0, 2, 0, 2) == 0.0
    assert D.element(0, 1, 0, 2) == 0.0


def test_2rdm_trace(h4_basis):
    psi = random_state(h4_basis, 8)
    assert compute_2rdm(psi).trace() == pytest.approx(12.0, abs=1e-12)


def test_2rdm_hermiticity_antisymmetry(h4_basis):
    D = compute_2rdm(random_state(h4_basis, 12))
    T = D.tensor()
    assert np.abs(T - T.transpose(2, 3, 0, 1)).max() < 1e-12
    assert np.abs(T + T.transpose(1, 0, 2, 3)).max() < 1e-12
    assert np.abs(T + T.transpose(0, 1, 3, 2)).max() < 1e-12


def test_2rdm_energy_reconstruction(h4_integrals, h4_basis, h4_hamiltonian):
    """Contract the 2-RDM with the integrals and compare with <H>."""
    n = h4_integrals.n_spatial
    n_so = 2 * n
    psi = random_state(h4_basis, 21)
    T = compute_2rdm(psi).tensor()

    N = 4
    gamma = np.einsum("prqr->pq", T) / (N - 1)
    h_so = np.zeros((n_so, n_so))
    h_so[:n, :n] = h4_integrals.h
    h_so[n:, n:] = h4_integrals.h

    v_phys = np.zeros((n_so, n_so, n_so, n_so))
    for p in range(n_so):
        for q in range(n_so):
            for r in range(n_so):
                for s in range(n_so):
                    if (p < n) == (r < n) and (q < n) == (s < n):
                        v_phys[p, q, r, s] = h4_integrals.v[p % n, r % n,
                                                            q % n, s % n]
    energy = (h4_integrals.core_energy + np.sum(h_so * gamma)
              + 0.5 * np.einsum("pqrs,pqrs->", v_phys, T))
    assert energy == pytest.approx(expectation(psi, h4_hamiltonian), abs=1e-10)


def test_2rdm_contraction_vs_apply_two_body(h4_basis):
    pb = pair_basis(4)
    psi = random_state(h4_basis, 31)
    F = random_anti_hermitian(pb, 32)
    F = TwoBodyCoefficients(pb, np.abs(F.matrix))  # any S_z-conserving F
    direct = psi.coefficients @ apply_two_body(F, psi)
    via_rdm = np.sum(compute_2rdm(psi).pair_matrix * F.matrix)
    assert direct == pytest.approx(via_rdm, abs=1e-10)


# ----------------------------------------------------------------------- spin

def test_spin_closed_shell(h4_basis):
    psi = initial_state(h4_basis, OccupationSpec((0, 1), (0, 1)))
    sz, s2 = spin_expectations(psi)
    assert (sz, s2) == (0.0, pytest.approx(0.0, abs=1e-12))


def test_spin_high_spin_triplet():
    basis = enumerate_sector(4, 3, 1)
    psi = initial_state(basis, OccupationSpec((0, 1, 2), (0,)))
    sz, s2 = spin_expectations(psi)
    assert sz == 1.0
    assert s2 == pytest.approx(2.0, abs=1e-12)
    assert round(np.sqrt(4 * s2 + 1)) == 3


def test_spin_combo_phases(h4_basis):
    plus = initial_state(h4_basis, OccupationSpec((0, 2), (0, 1), "singlet"))
    minus = initial_state(h4_basis, OccupationSpec((0, 2), (0, 1), "triplet"))
    assert spin_expectations(plus)[1] == pytest.approx(0.0, abs=1e-12)
    assert spin_expectations(minus)[1] == pytest.approx(2.0, abs=1e-12)


# ------------------------------------------------------------------- cse_norm

def test_cse_norm_eigenvector(h4_hamiltonian, h4_spectrum):
    assert cse_norm(h4_spectrum.eigenvectors[1], h4_hamiltonian) < 1e-14


def test_cse_norm_matches_dense_gamma_oracle(h2_integrals, h2_basis,
                                             h2_hamiltonian):
    psi = random_state(h2_basis, 77)
    hpsi = apply_hamiltonian(h2_hamiltonian, psi)
    e = psi.coefficients @ hpsi
    r = hpsi - e * psi.coefficients

    pb = pair_basis(2)
    Psel = sector_projector(4, h2_basis.determinants)
    K = np.zeros((len(pb), len(pb)))
    for i, (p, q) in enumerate(pb.pairs):
        for j, (s, t) in enumerate(pb.pairs):
            gamma = project(pair_operator(4, p, q, s, t), Psel)
            K[i, j] = psi.coefficients @ gamma @ r
    A = 0.5 * (K - K.T)
    expected = 0.5 * np.sum(A * A)
    assert cse_norm(psi, h2_hamiltonian) == pytest.approx(expected, abs=1e-12)


def test_pair_transition_matches_dense_gamma(h2_basis, h2_hamiltonian):
    psi = random_state(h2_basis, 3)
    w = random_state(h2_basis, 4).coefficients * 0.37
    pb = pair_basis(2)
    Psel = sector_projector(4, h2_basis.determinants)
    K = pair_transition_matrix(psi, w)
    for i, (p, q) in enumerate(pb.pairs):
        for j, (s, t) in enumerate(pb.pairs):
            gamma = project(pair_operator(4, p, q, s, t), Psel)
            assert K[i, j] == pytest.approx(psi.coefficients @ gamma @ w,
                                            abs=1e-12)
