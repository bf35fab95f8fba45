"""Steady states, deviation propagation and the Hilbert-Schmidt distance.

Three cross-validating propagation routes are provided for the deviation
delta_C(t) = exp(H_eff t) delta_C(0) exp(H_eff^dag t):

* ``SPECTRAL``: the biorthogonal eigenbasis of H_eff.  Exact but limited by
  the eigenvector conditioning, which grows exponentially with system size
  for skin-effect chains.
* ``GAUGE``: the same eigenbasis formula built through the diagonal gauge
  transform, where the eigenvector matrix is a unitary scaled by a known
  diagonal.  Numerically exact for the open chain at any size.
* ``ODE``: fixed-step RK4 integration of the equation of motion.  Works for
  any generator; the universal fallback.
"""

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import (GaugeUnavailableError, InvalidParameterError,
                     NoUniqueSteadyStateError, NumericsError, SizeCapError)
from .model import (Boundary, EffectiveHamiltonian, LatticeModel,
                    dissipator_matrices, effective_hamiltonian)
from .spectral import biorthogonal_eigensystem, gauge_eigensystem

#: Decay threshold: eigenvalues with Re >= -DECAY_TOL count as non-decaying.
DECAY_TOL = 1e-12
#: Required max-norm residual of the Lyapunov steady state.
LYAPUNOV_TOL = 1e-10
#: Stability bound for the RK4 step: h * max|H_eff| <= STEP_NORM_BOUND.
STEP_NORM_BOUND = 0.05
#: Extra step refinement so the fixed-step error sits well below 1e-7.
STEP_REFINE = 8


class CorrelationKind(enum.Enum):
    FULL = "full"
    DEVIATION = "deviation"


class PropagatorMethod(enum.Enum):
    SPECTRAL = "spectral"
    GAUGE = "gauge"
    ODE = "ode"


@dataclass(frozen=True)
class CorrelationState:
    """An L x L Hermitian correlation matrix C or deviation delta_C."""

    matrix: np.ndarray
    kind: CorrelationKind
    time: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, order="C", copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidParameterError("correlation matrix must be square")
        defect = np.abs(m - m.conj().T).max()
        scale = max(1.0, float(np.abs(m).max()))
        if defect > 1e-8 * scale:
            raise InvalidParameterError(
                f"matrix is not Hermitian (defect {defect:.3e})")
        if self.time < 0:
            raise InvalidParameterError("time must be nonnegative")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "kind", CorrelationKind(self.kind))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _hermitize(m):
    return 0.5 * (m + m.conj().T)


def hs_distance(state: CorrelationState) -> float:
    """Hilbert-Schmidt (Frobenius) distance ||delta_C||_F to the steady state."""
    if state.kind is not CorrelationKind.DEVIATION:
        raise InvalidParameterError(
            "hs_distance expects a deviation state (kind=DEVIATION)")
    return float(np.linalg.norm(state.matrix))


def solve_lyapunov_kron(heff_matrix, rhs, max_size=48):
    """Solve H_eff X + X H_eff^dag = rhs through the vectorized L^2 system.

    Dense and O(L^6); intended as an independent check at small L, not as
    the production route.
    """
    A = np.asarray(heff_matrix, dtype=complex)
    n = A.shape[0]
    if n > max_size:
        raise SizeCapError(f"kron solve capped at L={max_size}, got {n}")
    eye = np.eye(n)
    # row-major vec: vec(A X + X A^dag) = (kron(A, I) + kron(I, conj(A))) vec(X)
    big = np.kron(A, eye) + np.kron(eye, A.conj())
    x = np.linalg.solve(big, np.asarray(rhs, dtype=complex).reshape(-1))
    return _hermitize(x.reshape(n, n))


def lyapunov_residual(heff_matrix, X, Mg) -> float:
    """Max-norm residual of H_eff X + X H_eff^dag + 2 M_g."""
    r = heff_matrix @ X + X @ heff_matrix.conj().T + 2.0 * Mg
    return float(np.abs(r).max())


def steady_state(model: LatticeModel, heff: EffectiveHamiltonian | None = None
                 ) -> CorrelationState:
    """Steady-state correlation matrix from H_eff C + C H_eff^dag + 2 M_g = 0.

    Solved primarily through the eigenbasis formula

        C_ss = -2 sum_ij  <L_i|M_g|L_j> / (lambda_i + conj(lambda_j))  |R_i><R_j|

    with a backward-stable Schur (Bartels-Stewart) solve as fallback when
    eigenvector conditioning pushes the residual above ``LYAPUNOV_TOL``.
    Raises :class:`NoUniqueSteadyStateError` when some eigenvalue of H_eff
    has Re >= -1e-12 (e.g. the periodic chain, which carries an undamped
    mode).
    """
    if heff is None:
        heff = effective_hamiltonian(model)
    Mg = dissipator_matrices(model).gain
    es = biorthogonal_eigensystem(heff)
    w = es.eigenvalues
    if w.real.max() >= -DECAY_TOL:
        raise NoUniqueSteadyStateError(
            f"max Re(lambda) = {w.real.max():.3e}; generator has a "
            "non-decaying mode, steady state is not unique")

    Lv = es.left_vectors
    R = es.right_vectors
    denom = w[:, None] + w.conj()[None, :]
    G = Lv.conj().T @ Mg @ Lv
    X = _hermitize(R @ (-2.0 * G / denom) @ R.conj().T)
    if lyapunov_residual(heff.matrix, X, Mg) > LYAPUNOV_TOL:
        X = _hermitize(scipy.linalg.solve_continuous_lyapunov(
            heff.matrix, -2.0 * Mg))
        res = lyapunov_residual(heff.matrix, X, Mg)
        if res > LYAPUNOV_TOL:
            raise NumericsError(
                f"Lyapunov residual {res:.3e} above {LYAPUNOV_TOL:.1e} "
                "after Schur fallback")
    return CorrelationState(matrix=X, kind=CorrelationKind.FULL, time=0.0)


def default_method(heff: EffectiveHamiltonian) -> PropagatorMethod:
    """Preferred propagation route for a given generator.

    Gauge for the open chain (conditioned by the known diagonal only),
    spectral otherwise, ODE if even that is defective.
    """
    try:
        gauge_eigensystem(heff)
        return PropagatorMethod.GAUGE
    except GaugeUnavailableError:
        pass
    try:
        biorthogonal_eigensystem(heff)
        return PropagatorMethod.SPECTRAL
    except Exception:
        return PropagatorMethod.ODE


def _eigensystem_for(heff, method):
    if method is PropagatorMethod.GAUGE:
        return gauge_eigensystem(heff)
    return biorthogonal_eigensystem(heff)


def _ode_steps(t, heff_matrix, refine=STEP_REFINE):
    """Step count honoring h * max|H_eff| <= STEP_NORM_BOUND / refine."""
    if t == 0.0:
        return 0, 0.0
    scale = max(float(np.abs(heff_matrix).max()), 1e-300)
    h_max = STEP_NORM_BOUND / scale / refine
    n = max(1, int(np.ceil(t / h_max)))
    if n > 100_000_000:
        raise NumericsError("ODE step underflow: pathological generator norm")
    return n, t / n


def propagate(state: CorrelationState, heff: EffectiveHamiltonian, t: float,
              method: PropagatorMethod | None = None) -> CorrelationState:
    """Propagate a deviation: delta_C(t) = e^{H_eff t} delta_C(0) e^{H_eff^dag t}.

    The result is re-Hermitized; its ``time`` field advances by ``t``.
    """
    if t < 0:
        raise InvalidParameterError("propagation time must be nonnegative")
    if state.kind is not CorrelationKind.DEVIATION:
        raise InvalidParameterError(
            "propagate evolves deviation states; subtract the steady state "
            "first")
    if method is None:
        method = default_method(heff)
    method = PropagatorMethod(method)
    if t == 0.0:
        return state

    if method is PropagatorMethod.ODE:
        n, h = _ode_steps(t, heff.matrix)
        out = kernels.rk4_lindblad(heff.matrix, None, state.matrix, h, n)
    else:
        es = _eigensystem_for(heff, method)
        B0 = es.left_vectors.conj().T @ state.matrix @ es.left_vectors
        out = kernels.sandwich_apply(es.right_vectors, B0, es.eigenvalues, t)
    return CorrelationState(matrix=_hermitize(out),
                            kind=CorrelationKind.DEVIATION,
                            time=state.time + t)


def propagation_norms(state: CorrelationState, heff: EffectiveHamiltonian,
                      times, method: PropagatorMethod | None = None
                      ) -> np.ndarray:
    """||delta_C(t)||_F over a whole time grid in one pass.

    Same semantics as calling :func:`propagate` + :func:`hs_distance` per
    grid point, but the eigenbasis coefficient matrix is formed once and
    the ODE route integrates cumulatively instead of restarting from 0.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or (np.diff(times) <= 0).any() or times[0] < 0:
        raise InvalidParameterError("times must be strictly increasing, >= 0")
    if state.kind is not CorrelationKind.DEVIATION:
        raise InvalidParameterError("propagation_norms expects a deviation")
    if method is None:
        method = default_method(heff)
    method = PropagatorMethod(method)

    if method is not PropagatorMethod.ODE:
        es = _eigensystem_for(heff, method)
        B0 = es.left_vectors.conj().T @ state.matrix @ es.left_vectors
        return kernels.sandwich_norms(es.right_vectors, B0,
                                      es.eigenvalues, times)

    out = np.empty(times.shape[0])
    X = np.array(state.matrix)
    t_prev = 0.0
    for i, t in enumerate(times):
        dt = t - t_prev
        if dt > 0:
            n, h = _ode_steps(dt, heff.matrix)
            X = kernels.rk4_lindblad(heff.matrix, None, X, h, n)
            t_prev = t
        out[i] = np.linalg.norm(X)
    return out


def integrate_ode(c0: CorrelationState, model: LatticeModel, t_grid
                  ) -> list[CorrelationState]:
    """Integrate dC/dt = H_eff C + C H_eff^dag + 2 M_g on a grid from 0.

    Classical fixed-step RK4 with the step bound h * max|H_eff| <= 0.05
    (further refined by ``STEP_REFINE`` for accuracy); the state is
    re-Hermitized every step.  ``t_grid`` must start at 0 and increase
    strictly.  Deviation states are integrated without the source term.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.shape[0] < 1 or t_grid[0] != 0.0:
        raise InvalidParameterError("t_grid must start at 0")
    if (np.diff(t_grid) <= 0).any():
        raise InvalidParameterError("t_grid must increase strictly")
    heff = effective_hamiltonian(model)
    Q = None
    if c0.kind is CorrelationKind.FULL:
        Q = 2.0 * dissipator_matrices(model).gain

    out = [CorrelationState(matrix=c0.matrix, kind=c0.kind, time=0.0)]
    X = np.array(c0.matrix)
    for t_prev, t in zip(t_grid[:-1], t_grid[1:]):
        n, h = _ode_steps(t - t_prev, heff.matrix)
        X = kernels.rk4_lindblad(heff.matrix, Q, X, h, n)
        out.append(CorrelationState(matrix=_hermitize(X), kind=c0.kind,
                                    time=float(t)))
    return out
