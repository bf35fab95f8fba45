import numpy as np
import pytest

from lindchain.dynamics import (CorrelationState, PropagatorMethod,
                                hs_distance, propagate)
from lindchain.errors import (CirculantError, InvalidParameterError,
                              PhysicalityError)
from lindchain.model import Boundary, build_chain_model, effective_hamiltonian
from lindchain.states import (InitialStateSpec, Side, StateKind,
                              build_deviation, circulant_symbol,
                              diagonal_edge_state, fourier_components,
                              offdiagonal_state, uniform_diagonal_state)


class TestDiagonalEdgeState:
    def test_left_distance(self):
        d = diagonal_edge_state("left", 4, 0.5, 40)
        assert hs_distance(d) == pytest.approx(1.0)
        assert np.allclose(np.diagonal(d.matrix)[:4], 0.5)
        assert np.abs(d.matrix[4:, 4:]).max() == 0.0

    def test_right_single_site(self):
        d = diagonal_edge_state("right", 1, 0.5, 40)
        nz = np.nonzero(d.matrix)
        assert nz[0].tolist() == [39] and nz[1].tolist() == [39]

    def test_reflection_relation(self):
        left = diagonal_edge_state(Side.LEFT, 5, 0.3, 12).matrix
        right = diagonal_edge_state(Side.RIGHT, 5, 0.3, 12).matrix
        assert np.abs(left[::-1, ::-1] - right).max() == 0.0

    def test_closed_form_distance(self):
        for w, a in [(1, 0.5), (3, -0.25), (7, 0.1)]:
            d = diagonal_edge_state("left", w, a, 16)
            assert hs_distance(d) == pytest.approx(abs(a) * np.sqrt(w),
                                                   abs=1e-12)

    def test_amplitude_bound(self):
        with pytest.raises(PhysicalityError):
            diagonal_edge_state("left", 2, 0.6, 8)

    def test_width_bound(self):
        with pytest.raises(InvalidParameterError):
            diagonal_edge_state("left", 9, 0.1, 8)


class TestOffdiagonalState:
    def test_nearest_neighbour_distance(self):
        band = [(1, 0.2), (-1, 0.2)]
        d = offdiagonal_state(band, 40)
        assert hs_distance(d) == pytest.approx(0.2 * np.sqrt(78), abs=1e-12)

    def test_empty_band_is_zero(self):
        d = offdiagonal_state([], 6)
        assert hs_distance(d) == 0.0

    def test_spec_example_parameters_are_physical(self):
        # min eigenvalue 0.5 - 2*0.3*cos(pi/5) = 0.0146 > 0
        d = offdiagonal_state([(1, 0.3), (-1, 0.3)], 4)
        ev = np.linalg.eigvalsh(np.eye(4) / 2 + d.matrix)
        assert ev.min() == pytest.approx(0.5 - 0.6 * np.cos(np.pi / 5),
                                         abs=1e-12)
        assert ev.min() > 0

    @pytest.mark.parametrize("a1,L", [(0.45, 4), (0.3, 8)])
    def test_unphysical_band_rejected(self, a1, L):
        # 2*a1*cos(pi/(L+1)) > 0.5 pushes an eigenvalue below zero
        with pytest.raises(PhysicalityError):
            offdiagonal_state([(1, a1), (-1, a1)], L)

    def test_hermiticity_enforced(self):
        with pytest.raises(InvalidParameterError):
            offdiagonal_state([(1, 0.2)], 6)
        with pytest.raises(InvalidParameterError):
            offdiagonal_state([(1, 0.2j), (-1, 0.2j)], 6)
        with pytest.raises(InvalidParameterError):
            offdiagonal_state([(0, 0.1j)], 6)

    def test_complex_band_hermitian(self):
        d = offdiagonal_state([(2, 0.1 + 0.05j), (-2, 0.1 - 0.05j)], 8)
        assert np.abs(d.matrix - d.matrix.conj().T).max() == 0.0

    def test_periodic_wraps(self):
        d = offdiagonal_state([(1, 0.2), (-1, 0.2)], 6, periodic=True)
        assert d.matrix[5, 0] == pytest.approx(0.2)
        assert d.matrix[0, 5] == pytest.approx(0.2)


class TestFourierComponents:
    def test_uniform_diagonal(self):
        d = uniform_diagonal_state(0.25, 8)
        ck = fourier_components(d)
        assert np.allclose(ck, 0.25)

    def test_nearest_neighbour_band(self):
        L = 12
        d = offdiagonal_state([(1, 0.2), (-1, 0.2)], L, periodic=True)
        ck = fourier_components(d)
        k = 2 * np.pi * np.arange(L) / L
        assert np.abs(ck - 2 * 0.2 * np.cos(k)).max() < 1e-12

    def test_zero_matrix(self):
        d = uniform_diagonal_state(0.0, 5)
        assert np.abs(fourier_components(d)).max() == 0.0

    def test_parseval(self, rng):
        L = 16
        row = rng.normal(size=L)
        m = np.zeros((L, L))
        for l in range(L):
            m[l] = np.roll(row, l)
        m = (m + m.T) / 2
        first = m[0]
        circ = np.array([np.roll(first, l) for l in range(L)])
        d = CorrelationState(matrix=circ * 0.1, kind="deviation")
        ck = fourier_components(d)
        assert np.sum(np.abs(ck) ** 2) == pytest.approx(
            np.linalg.norm(d.matrix) ** 2, rel=1e-12)

    def test_non_circulant_rejected(self):
        d = diagonal_edge_state("left", 2, 0.3, 6)
        with pytest.raises(CirculantError):
            fourier_components(d)


class TestCirculantEvolutionLaw:
    def test_momentum_components_decay_law(self):
        # propagated circulant deviation stays circulant; each momentum
        # component picks up exp(-4 G t) exp(4 G t sin k)
        L, Gamma, t = 16, 0.2, 1.7
        m = build_chain_model(1.0, 0.2, 0.2, L, boundary=Boundary.PBC)
        heff = effective_hamiltonian(m)
        d0 = offdiagonal_state([(0, 0.05), (1, 0.2), (-1, 0.2)], L,
                               periodic=True)
        out = propagate(d0, heff, t, method=PropagatorMethod.SPECTRAL)
        ck0 = fourier_components(d0)
        ckt = fourier_components(out)      # raises if not circulant
        lam_k = circulant_symbol(heff.matrix, tol=1e-10)
        expected = ck0 * np.exp(2 * lam_k.real * t)
        assert np.abs(ckt - expected).max() < 1e-8
        k = 2 * np.pi * np.arange(L) / L
        analytic = ck0 * np.exp(-4 * Gamma * t) * np.exp(
            4 * Gamma * t * np.sin(k))
        assert np.abs(ckt - analytic).max() < 1e-8


class TestBuildDeviation:
    def test_dispatch(self):
        spec = InitialStateSpec(kind=StateKind.DIAGONAL_EDGE, label="x",
                                side=Side.LEFT, width=2, amplitude=0.4)
        d = build_deviation(spec, 10)
        assert hs_distance(d) == pytest.approx(0.4 * np.sqrt(2))
        spec = InitialStateSpec(kind=StateKind.UNIFORM, label="u",
                                amplitude=0.25)
        assert hs_distance(build_deviation(spec, 4)) == pytest.approx(0.5)
        spec = InitialStateSpec(kind=StateKind.OFFDIAGONAL_BAND, label="b",
                                band=((1, 0.2), (-1, 0.2)))
        d = build_deviation(spec, 6, periodic=True)
        assert d.matrix[0, 5] == pytest.approx(0.2)

    def test_missing_fields_rejected(self):
        spec = InitialStateSpec(kind=StateKind.DIAGONAL_EDGE, label="x",
                                amplitude=0.4)
        with pytest.raises(InvalidParameterError):
            build_deviation(spec, 10)
