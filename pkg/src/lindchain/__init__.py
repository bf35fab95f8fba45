"""Quadratic Lindblad dynamics of dissipative fermion chains.

Evolves single-particle correlation matrices under linear gain/loss
Lindblad dynamics, solves the Lyapunov steady state, measures
Hilbert-Schmidt distances, and detects relaxation-curve crossings, with a
brute-force full-Fock-space Lindblad oracle for validation at small sizes.
"""

from .dynamics import (CorrelationKind, CorrelationState, PropagatorMethod,
                       hs_distance, integrate_ode, propagate, steady_state)
from .errors import (CirculantError, ConfigError, DefectiveEigensystemError,
                     GaugeUnavailableError, InvalidParameterError,
                     LindchainError, NoUniqueSteadyStateError, NumericsError,
                     PhysicalityError, SizeCapError)
from .mpemba import (CrossingReport, CrossingVerdict, DecayFit, DistanceCurve,
                     FitKind, detect_crossings, distance_curve,
                     fit_exponential_rate, fit_power_law,
                     make_distance_evaluator, rescaled_curve,
                     resolve_steady_state)
from .model import (Boundary, ChainParameters, DissipatorPair,
                    EffectiveHamiltonian, LatticeModel, PhysicalityReport,
                    build_chain_model, conjugate_jump_phases,
                    dissipator_matrices, effective_hamiltonian,
                    single_mode_model, validate_correlation_matrix)
from .spectral import (EigenSystem, LocalizationReport, analytic_spectrum_obc,
                       analytic_spectrum_pbc, biorthogonal_eigensystem,
                       gauge_eigensystem, gauge_transform,
                       localization_profile)
from .states import (InitialStateSpec, Side, StateKind, build_deviation,
                     diagonal_edge_state, fourier_components,
                     offdiagonal_state, uniform_diagonal_state)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
