import numpy as np
import pytest

from conftest import match_multisets
from lindchain.dynamics import (CorrelationKind, CorrelationState, propagate,
                                steady_state)
from lindchain.errors import InvalidParameterError, SizeCapError
from lindchain.model import (LatticeModel, build_chain_model,
                             effective_hamiltonian, single_mode_model)
from lindchain.mpemba import DistanceCurve, detect_crossings
from lindchain.oracle import (build_fock_operators, build_liouvillian,
                              correlation_from_rho, evolve_density_matrix,
                              evolve_trajectory, liouvillian_spectrum,
                              product_state_rho, rho_hs_distance,
                              steady_state_rho)


class TestFockOperators:
    @pytest.mark.parametrize("L", [1, 2, 3, 4])
    def test_anticommutation(self, L):
        fock = build_fock_operators(L)
        cs = fock.annihilators
        eye = np.eye(2 ** L)
        worst = 0.0
        for i in range(L):
            for j in range(L):
                acd = cs[i] @ cs[j].conj().T + cs[j].conj().T @ cs[i]
                target = eye if i == j else 0.0 * eye
                worst = max(worst, np.abs(acd - target).max())
                acc = cs[i] @ cs[j] + cs[j] @ cs[i]
                worst = max(worst, np.abs(acc).max())
        assert worst < 1e-13

    def test_size_cap(self):
        with pytest.raises(SizeCapError):
            build_fock_operators(8)


class TestBuildLiouvillian:
    def test_single_site_pure_loss_spectrum(self):
        # hand diagonalization with the factor-2 dissipator: populations
        # relax at 2*gamma_l, coherences at gamma_l
        gl = 0.37
        m = single_mode_model(0.0, gl)
        liou = build_liouvillian(m)
        eps, gap = liouvillian_spectrum(liou)
        expected = np.array([0.0, -gl, -gl, -2 * gl])
        assert match_multisets(eps, expected) < 1e-12
        assert gap == pytest.approx(gl, abs=1e-12)
        assert eps[0] == pytest.approx(0.0, abs=1e-13)
        assert eps.real[1:].max() < 0

    def test_trivial_generator_is_zero(self):
        m = LatticeModel(hamiltonian=np.zeros((2, 2)),
                         gain_coeffs=np.zeros((1, 2)),
                         loss_coeffs=np.zeros((1, 2)))
        liou = build_liouvillian(m)
        assert np.abs(liou.matrix).max() == 0.0
        eps, gap = liouvillian_spectrum(liou)
        assert np.abs(eps).max() == 0.0 and gap == 0.0

    def test_trace_functional_annihilated(self):
        m = build_chain_model(1.0, 0.2, 0.2, 3)
        liou = build_liouvillian(m)
        dim = 2 ** 3
        tr = np.eye(dim, dtype=complex).reshape(-1)
        assert np.abs(tr @ liou.matrix).max() < 1e-10

    def test_spectrum_in_left_half_plane_with_zero_mode(self):
        m = build_chain_model(1.0, 0.2, 0.2, 3)
        eps, gap = liouvillian_spectrum(build_liouvillian(m))
        assert eps.real.max() <= 1e-10
        assert np.abs(eps).min() < 1e-10
        assert gap > 0

    def test_size_cap(self):
        m = build_chain_model(1.0, 0.2, 0.2, 8)
        with pytest.raises(SizeCapError):
            build_liouvillian(m)


class TestEvolveDensityMatrix:
    def test_t_zero(self):
        m = single_mode_model(0.1, 0.1)
        liou = build_liouvillian(m)
        rho0 = np.diag([0.3, 0.7]).astype(complex)
        assert np.abs(evolve_density_matrix(rho0, liou, 0.0) - rho0).max() == 0

    def test_steady_state_fixed(self):
        m = build_chain_model(1.0, 0.3, 0.1, 2)
        liou = build_liouvillian(m)
        rho_ss = steady_state_rho(liou)
        out = evolve_density_matrix(rho_ss, liou, 2.5)
        assert np.abs(out - rho_ss).max() < 1e-11

    def test_single_site_occupation_decay(self):
        m = single_mode_model(0.1, 0.1)
        liou = build_liouvillian(m)
        rho0 = np.diag([0.0, 1.0]).astype(complex)
        for t in (0.5, 1.0, 3.0):
            rho = evolve_density_matrix(rho0, liou, t)
            occ = rho[1, 1].real
            assert occ == pytest.approx(0.5 + 0.5 * np.exp(-0.4 * t),
                                        abs=1e-12)

    def test_preserves_trace_hermiticity_positivity(self):
        m = build_chain_model(1.0, 0.25, 0.12, 3)
        liou = build_liouvillian(m)
        rho0 = product_state_rho([1.0, 0.0, 1.0])
        for t in (0.7, 2.9):
            rho = evolve_density_matrix(rho0, liou, t)
            assert abs(np.trace(rho).real - 1.0) < 1e-10
            assert np.abs(rho - rho.conj().T).max() < 1e-12
            assert np.linalg.eigvalsh(rho).min() > -1e-9

    def test_rejects_unnormalized(self):
        m = single_mode_model(0.1, 0.1)
        liou = build_liouvillian(m)
        with pytest.raises(InvalidParameterError):
            evolve_density_matrix(2 * np.eye(2), liou, 1.0)


class TestCorrelationFromRho:
    def test_vacuum(self):
        fock = build_fock_operators(3)
        rho = product_state_rho([0, 0, 0])
        assert np.abs(correlation_from_rho(rho, fock).matrix).max() == 0.0

    def test_filled(self):
        fock = build_fock_operators(3)
        rho = product_state_rho([1, 1, 1])
        C = correlation_from_rho(rho, fock).matrix
        assert np.abs(C - np.eye(3)).max() < 1e-13

    def test_single_occupied_site(self):
        fock = build_fock_operators(3)
        rho = product_state_rho([1, 0, 0])
        C = correlation_from_rho(rho, fock).matrix
        assert np.abs(C - np.diag([1.0, 0, 0])).max() < 1e-13


class TestRhoHsDistance:
    def test_zero_for_identical(self):
        rho = product_state_rho([1, 0])
        assert rho_hs_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        a = product_state_rho([1, 0])
        b = product_state_rho([0, 1])
        assert rho_hs_distance(a, b) == pytest.approx(np.sqrt(2))


class TestOracleEngineConsistency:
    @pytest.mark.parametrize("L", [2, 3])
    def test_correlation_equivalence(self, L):
        m = build_chain_model(1.0, 0.2, 0.2, L)
        fock = build_fock_operators(L)
        liou = build_liouvillian(m, fock)
        heff = effective_hamiltonian(m)
        css = steady_state(m).matrix
        occ = [1.0 if i % 2 == 0 else 0.0 for i in range(L)]
        rho0 = product_state_rho(occ)
        times = np.linspace(0.25, 5.0, 12)
        rhos = evolve_trajectory(rho0, liou, times)
        delta0 = CorrelationState(matrix=np.diag(occ) - css,
                                  kind=CorrelationKind.DEVIATION)
        for t, rho in zip(times, rhos):
            c_o = correlation_from_rho(rho, fock).matrix
            c_e = css + propagate(delta0, heff, float(t)).matrix
            assert np.abs(c_o - c_e).max() < 1e-6

    def test_steady_state_consistency(self):
        m = build_chain_model(1.0, 0.3, 0.1, 3)
        fock = build_fock_operators(3)
        liou = build_liouvillian(m, fock)
        c_oracle = correlation_from_rho(steady_state_rho(liou), fock).matrix
        c_engine = steady_state(m).matrix
        assert np.abs(c_oracle - c_engine).max() < 1e-8

    def test_balanced_rates_half_filling(self):
        m = build_chain_model(1.0, 0.2, 0.2, 3)
        fock = build_fock_operators(3)
        liou = build_liouvillian(m, fock)
        C = correlation_from_rho(steady_state_rho(liou), fock).matrix
        assert np.abs(C - np.eye(3) / 2).max() < 1e-8

    def test_crossing_verdicts_agree_between_metrics(self):
        # miniature edge-state pair; both distance metrics must order the
        # curves the same way and agree on the crossing count
        L = 3
        m = build_chain_model(1.0, 0.2, 0.2, L)
        fock = build_fock_operators(L)
        liou = build_liouvillian(m, fock)
        rho_ss = steady_state_rho(liou)
        occ_a = [0.9, 0.9, 0.5]
        occ_b = [0.5, 0.5, 0.9]
        times = np.concatenate([[0.0], np.geomspace(0.05, 2.5, 60)])

        def curves(occ):
            rho0 = product_state_rho(occ)
            rhos = [rho0] + evolve_trajectory(rho0, liou, times[1:])
            dr = [rho_hs_distance(r, rho_ss) for r in rhos]
            dc = [np.linalg.norm(correlation_from_rho(r, fock).matrix
                                 - np.eye(L) / 2) for r in rhos]
            return np.array(dr), np.array(dc)

        dr_a, dc_a = curves(occ_a)
        dr_b, dc_b = curves(occ_b)
        assert dr_a[0] > dr_b[0] and dc_a[0] > dc_b[0]
        rep_rho = detect_crossings(DistanceCurve(times, dr_a, label="a"),
                                   DistanceCurve(times, dr_b, label="b"))
        rep_c = detect_crossings(DistanceCurve(times, dc_a, label="a"),
                                 DistanceCurve(times, dc_b, label="b"))
        assert rep_rho.verdict == rep_c.verdict
        assert rep_rho.initial_ordering == rep_c.initial_ordering == "a"
        assert len(rep_rho.crossing_times) == 1
        assert abs(rep_rho.crossing_times[0] - rep_c.crossing_times[0]) < 0.35
