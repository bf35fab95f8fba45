import numpy as np
import pytest

from lindchain.errors import InvalidParameterError
from lindchain.model import (Boundary, LatticeModel, build_chain_model,
                             conjugate_jump_phases, dissipator_matrices,
                             effective_hamiltonian, single_mode_model,
                             validate_correlation_matrix)


def hatano_nelson(J, Gamma, L):
    H = np.zeros((L, L), dtype=complex)
    for j in range(L - 1):
        H[j, j + 1] = J + Gamma
        H[j + 1, j] = J - Gamma
    return H


class TestBuildChainModel:
    def test_compensated_heff_diagonal_uniform(self, reference_chain):
        heff = effective_hamiltonian(reference_chain)
        assert np.allclose(np.diagonal(heff.matrix), -0.4, atol=1e-14)

    def test_zero_dissipation_unitary_generator(self):
        m = build_chain_model(1.0, 0.0, 0.0, 4)
        d = dissipator_matrices(m)
        assert np.all(d.gain == 0) and np.all(d.loss == 0)
        heff = effective_hamiltonian(m)
        assert np.allclose(heff.matrix, 1j * m.hamiltonian.T)
        # anti-Hermitian generator
        assert np.abs(heff.matrix + heff.matrix.conj().T).max() < 1e-15

    def test_uncompensated_gain_matrix_entries(self):
        # hand evaluation of sum_mu conj(D_mu i) D_mu j over the 3 bond rows
        m = build_chain_model(1.0, 0.2, 0.2, 4, edge_compensation=False)
        Mg = dissipator_matrices(m).gain
        assert np.allclose(np.diagonal(Mg), [0.1, 0.2, 0.2, 0.1])
        assert np.allclose(np.diagonal(Mg, 1), [0.1j, 0.1j, 0.1j])
        assert np.allclose(np.diagonal(Mg, -1), [-0.1j, -0.1j, -0.1j])

    def test_pbc_uniform_diagonal(self):
        m = build_chain_model(1.0, 0.3, 0.1, 4, boundary=Boundary.PBC)
        d = dissipator_matrices(m)
        assert np.allclose(np.diagonal(d.gain), 0.3)
        assert np.allclose(np.diagonal(d.loss), 0.1)

    def test_gamma_field(self):
        m = build_chain_model(1.0, 0.3, 0.1, 4)
        assert dissipator_matrices(m).gamma == pytest.approx(0.2)

    @pytest.mark.parametrize("bad", [
        dict(J=1.0, gamma_g=0.2, gamma_l=0.2, L=1),
        dict(J=1.0, gamma_g=-0.1, gamma_l=0.2, L=4),
        dict(J=1.0, gamma_g=0.2, gamma_l=-0.2, L=4),
        dict(J=-1.0, gamma_g=0.2, gamma_l=0.2, L=4),
    ])
    def test_invalid_parameters(self, bad):
        with pytest.raises(InvalidParameterError):
            build_chain_model(**bad)


class TestDissipatorMatrices:
    def test_single_jump_row(self):
        a = np.sqrt(0.1)
        m = LatticeModel(hamiltonian=np.zeros((2, 2)),
                         gain_coeffs=np.array([[a, 1j * a]]),
                         loss_coeffs=np.zeros((1, 2)))
        Mg = dissipator_matrices(m).gain
        assert np.allclose(Mg, [[0.1, 0.1j], [-0.1j, 0.1]])

    def test_zero_rows(self):
        m = LatticeModel(hamiltonian=np.zeros((3, 3)),
                         gain_coeffs=np.zeros((2, 3)),
                         loss_coeffs=np.zeros((2, 3)))
        d = dissipator_matrices(m)
        assert np.all(d.gain == 0) and np.all(d.loss == 0)

    def test_row_permutation_invariance(self, rng):
        rows = rng.normal(size=(5, 6)) + 1j * rng.normal(size=(5, 6))
        perm = rng.permutation(5)
        m1 = LatticeModel(hamiltonian=np.zeros((6, 6)), gain_coeffs=rows,
                          loss_coeffs=rows[::-1])
        m2 = LatticeModel(hamiltonian=np.zeros((6, 6)), gain_coeffs=rows[perm],
                          loss_coeffs=rows[::-1][perm])
        d1, d2 = dissipator_matrices(m1), dissipator_matrices(m2)
        assert np.allclose(d1.gain, d2.gain, atol=1e-14)
        assert np.allclose(d1.loss, d2.loss, atol=1e-14)

    def test_psd(self, rng):
        rows = rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))
        m = LatticeModel(hamiltonian=np.zeros((8, 8)), gain_coeffs=rows,
                         loss_coeffs=rows)
        d = dissipator_matrices(m)
        for M in (d.gain, d.loss):
            assert np.abs(M - M.conj().T).max() < 1e-14
            assert np.linalg.eigvalsh(M).min() >= -1e-12


class TestEffectiveHamiltonian:
    def test_matches_hatano_nelson_form(self, reference_chain):
        heff = effective_hamiltonian(reference_chain)
        L = reference_chain.size
        expected = -1j * hatano_nelson(1.0, 0.2, L) - 0.4 * np.eye(L)
        assert np.abs(heff.matrix - expected).max() < 1e-12

    def test_l2_hopping_magnitudes(self):
        m = build_chain_model(1.0, 0.2, 0.2, 2)
        heff = effective_hamiltonian(m)
        mags = sorted([abs(heff.matrix[0, 1]), abs(heff.matrix[1, 0])])
        assert mags == pytest.approx([0.8, 1.2])

    def test_definition_identity(self, rng):
        rows_g = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
        rows_l = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
        H = rng.normal(size=(5, 5))
        H = H + H.T
        m = LatticeModel(hamiltonian=H, gain_coeffs=rows_g,
                         loss_coeffs=rows_l)
        heff = effective_hamiltonian(m)
        d = dissipator_matrices(m)
        expected = 1j * m.hamiltonian.T - (d.loss.T + d.gain)
        assert np.abs(heff.matrix - expected).max() < 1e-14

    def test_dissipativity(self, rng):
        # all eigenvalues in the closed left half plane, any jump set
        for _ in range(5):
            n = int(rng.integers(2, 9))
            rows_g = rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))
            rows_l = rng.normal(size=(3, n)) + 1j * rng.normal(size=(3, n))
            H = rng.normal(size=(n, n))
            m = LatticeModel(hamiltonian=H + H.T, gain_coeffs=rows_g,
                             loss_coeffs=rows_l)
            w = np.linalg.eigvals(effective_hamiltonian(m).matrix)
            assert w.real.max() <= 1e-12

    def test_obc_pbc_differ_only_in_corners(self):
        mo = build_chain_model(1.0, 0.2, 0.2, 8, boundary=Boundary.OBC)
        mp = build_chain_model(1.0, 0.2, 0.2, 8, boundary=Boundary.PBC)
        diff = effective_hamiltonian(mo).matrix - effective_hamiltonian(mp).matrix
        diff[0, -1] = diff[-1, 0] = 0.0
        diff[0, 0] = diff[-1, -1] = 0.0       # corner diagonal terms too
        assert np.abs(diff).max() < 1e-14

    def test_linearity_in_hamiltonian_and_dissipators(self, rng):
        n = 5
        H1, H2 = (rng.normal(size=(n, n)) for _ in range(2))
        H1, H2 = H1 + H1.T, H2 + H2.T
        rows = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        zero = np.zeros((1, n))

        def heff(H, g, l):
            return effective_hamiltonian(LatticeModel(
                hamiltonian=H, gain_coeffs=g, loss_coeffs=l)).matrix

        lhs = heff(H1 + H2, zero, zero)
        assert np.abs(lhs - heff(H1, zero, zero) - heff(H2, zero, zero)).max() < 1e-13
        # additivity in M_g: stacking jump rows adds dissipators
        both = np.vstack([rows, rows])
        assert np.abs(heff(H1, both, zero) + heff(H1, zero, zero)
                      - 2 * heff(H1, rows, zero)).max() < 1e-13

    def test_rejects_non_hermitian_hamiltonian(self):
        H = np.array([[0.0, 1.0], [0.5, 0.0]])
        with pytest.raises(InvalidParameterError):
            LatticeModel(hamiltonian=H, gain_coeffs=np.zeros((1, 2)),
                         loss_coeffs=np.zeros((1, 2)))


class TestValidateCorrelationMatrix:
    def test_half_filling_physical(self):
        rep = validate_correlation_matrix(np.eye(6) / 2)
        assert rep.physical
        assert rep.hermiticity_defect == 0.0

    def test_eigenvalue_above_one_unphysical(self):
        rep = validate_correlation_matrix(np.diag([1.5, 0.0]))
        assert not rep.physical
        assert rep.max_eigenvalue == pytest.approx(1.5)

    def test_shifted_half_filling_physical(self):
        C = np.eye(8) / 2 + 0.5 * np.diag([1.0] + [0.0] * 7)
        assert validate_correlation_matrix(C).physical

    def test_non_square_rejected(self):
        with pytest.raises(InvalidParameterError):
            validate_correlation_matrix(np.zeros((2, 3)))


class TestConjugateJumpPhases:
    def test_reverses_hopping_asymmetry(self):
        m = build_chain_model(1.0, 0.2, 0.2, 6)
        flipped = conjugate_jump_phases(m)
        h0 = effective_hamiltonian(m).matrix
        h1 = effective_hamiltonian(flipped).matrix
        assert abs(h0[0, 1]) > abs(h0[1, 0])
        assert abs(h1[0, 1]) < abs(h1[1, 0])

    def test_equals_spatial_reflection(self):
        m = build_chain_model(1.0, 0.3, 0.1, 7)
        flipped = conjugate_jump_phases(m)
        h0 = effective_hamiltonian(m).matrix
        h1 = effective_hamiltonian(flipped).matrix
        assert np.abs(h0[::-1, ::-1] - h1).max() < 1e-14


def test_single_mode_model():
    m = single_mode_model(0.3, 0.1)
    heff = effective_hamiltonian(m)
    assert heff.matrix[0, 0] == pytest.approx(-0.4)
    with pytest.raises(InvalidParameterError):
        single_mode_model(-0.1, 0.1)
