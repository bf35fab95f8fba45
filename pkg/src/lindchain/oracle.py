"""Brute-force many-body validation in the full 2^L Fock space.

Builds the complete Lindblad superoperator of a model and evolves density
matrices exactly.  Ground truth for the quadratic engine at small L; the
dissipator uses the factor-2 convention

    drho/dt = -i[H, rho] + sum_mu (2 L_mu rho L_mu^dag - {L_mu^dag L_mu, rho})

matching the correlation-matrix flow (a population then decays at rate
2*gamma, not gamma).  Density matrices are vectorized row-major, i.e.
|v1><v2|  ->  |v1> (x) |v2>, so  vec(A rho B) = (A (x) B^T) vec(rho).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import CorrelationKind, CorrelationState
from .errors import InvalidParameterError, SizeCapError
from .model import LatticeModel

#: Dense superoperators are 4^L x 4^L; beyond 7 sites that is > 250 MB.
MAX_ORACLE_SITES = 7


@dataclass(frozen=True)
class FockOperators:
    """Annihilation operators on the full 2^L Fock space."""

    size: int
    annihilators: tuple

    def __post_init__(self):
        for c in self.annihilators:
            c.setflags(write=False)


@dataclass(frozen=True)
class LiouvillianMatrix:
    """Dense superoperator acting on row-major vectorized density matrices."""

    matrix: np.ndarray
    size: int

    def __post_init__(self):
        self.matrix.setflags(write=False)


def build_fock_operators(L) -> FockOperators:
    """Jordan-Wigner annihilators c_i with {c_i, c_j^dag} = delta_ij."""
    if not 1 <= L <= MAX_ORACLE_SITES:
        raise SizeCapError(
            f"Fock construction capped at {MAX_ORACLE_SITES} sites, got {L}")
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    zphase = np.diag([1.0, -1.0]).astype(complex)
    eye2 = np.eye(2, dtype=complex)
    ops = []
    for i in range(L):
        factors = [zphase] * i + [lower] + [eye2] * (L - 1 - i)
        full = factors[0]
        for f in factors[1:]:
            full = np.kron(full, f)
        ops.append(full)
    return FockOperators(size=L, annihilators=tuple(ops))


def _manybody_hamiltonian(model, fock):
    cs = fock.annihilators
    L = model.size
    H = np.zeros_like(cs[0])
    Hq = model.hamiltonian
    for i in range(L):
        for j in range(L):
            if Hq[i, j] != 0:
                H += Hq[i, j] * (cs[i].conj().T @ cs[j])
    return H


def _jump_operators(model, fock):
    cs = fock.annihilators
    jumps = []
    for row in model.loss_coeffs:
        op = np.zeros_like(cs[0])
        for i, d in enumerate(row):
            if d != 0:
                op += d * cs[i]
        jumps.append(op)
    for row in model.gain_coeffs:
        op = np.zeros_like(cs[0])
        for i, d in enumerate(row):
            if d != 0:
                op += d * cs[i].conj().T
        jumps.append(op)
    return jumps


def build_liouvillian(model: LatticeModel,
                      fock: FockOperators | None = None) -> LiouvillianMatrix:
    """Assemble the dense Lindblad superoperator of a model."""
    L = model.size
    if L > MAX_ORACLE_SITES:
        raise SizeCapError(
            f"Liouvillian capped at {MAX_ORACLE_SITES} sites, got {L}")
    if fock is None:
        fock = build_fock_operators(L)
    H = _manybody_hamiltonian(model, fock)
    dim = 2 ** L
    eye = np.eye(dim, dtype=complex)
    sup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for Lm in _jump_operators(model, fock):
        LdL = Lm.conj().T @ Lm
        sup += (2.0 * np.kron(Lm, Lm.conj())
                - np.kron(LdL, eye) - np.kron(eye, LdL.T))
    return LiouvillianMatrix(matrix=sup, size=L)


def _check_rho(rho, dim):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise InvalidParameterError(f"density matrix must be {dim}x{dim}")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise InvalidParameterError("density matrix must be Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-10:
        raise InvalidParameterError(f"density matrix trace {tr} != 1")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -1e-10:
        raise InvalidParameterError("density matrix must be PSD")
    return rho


def evolve_density_matrix(rho0, liouvillian: LiouvillianMatrix, t):
    """rho(t) = unvec(expm(L t) vec(rho0)), re-Hermitized."""
    dim = 2 ** liouvillian.size
    rho0 = _check_rho(rho0, dim)
    if t == 0:
        return rho0.copy()
    prop = scipy.linalg.expm(liouvillian.matrix * t)
    rho = (prop @ rho0.reshape(-1)).reshape(dim, dim)
    return 0.5 * (rho + rho.conj().T)


def evolve_trajectory(rho0, liouvillian: LiouvillianMatrix, times):
    """rho(t) on an increasing grid, reusing the propagator on uniform grids."""
    times = np.asarray(times, dtype=float)
    if (np.diff(times) <= 0).any() or times[0] < 0:
        raise InvalidParameterError("times must increase strictly from >= 0")
    dim = 2 ** liouvillian.size
    rho0 = _check_rho(rho0, dim)

    steps = np.diff(np.concatenate([[0.0], times]))
    uniform = steps.shape[0] > 1 and np.allclose(steps[1:], steps[1],
                                                 rtol=1e-12, atol=0.0)
    out = []
    if uniform and steps[1] > 0:
        prop = scipy.linalg.expm(liouvillian.matrix * steps[1])
        v = rho0.reshape(-1).copy()
        if steps[0] > 0:
            v = scipy.linalg.expm(liouvillian.matrix * steps[0]) @ v
        for i, _ in enumerate(times):
            if i > 0:
                v = prop @ v
            rho = v.reshape(dim, dim)
            out.append(0.5 * (rho + rho.conj().T))
    else:
        for t in times:
            out.append(evolve_density_matrix(rho0, liouvillian, t))
    return out


def correlation_from_rho(rho, fock: FockOperators) -> CorrelationState:
    """Single-particle correlation matrix C_ij = Tr[c_i^dag c_j rho]."""
    cs = fock.annihilators
    L = fock.size
    rho = np.asarray(rho, dtype=complex)
    C = np.empty((L, L), dtype=complex)
    for j in range(L):
        m = cs[j] @ rho
        for i in range(L):
            # Tr(c_i^dag m) contracted elementwise, no second matmul
            C[i, j] = np.sum(cs[i].conj() * m)
    C = 0.5 * (C + C.conj().T)
    return CorrelationState(matrix=C, kind=CorrelationKind.FULL)


def liouvillian_spectrum(liouvillian: LiouvillianMatrix):
    """All superoperator eigenvalues plus the relaxation gap |Re eps_2|.

    Eigenvalues come back sorted by descending real part (ties by ascending
    imaginary part), so eps_1 = 0 heads the list for any trace-preserving
    generator.
    """
    w = np.linalg.eigvals(liouvillian.matrix)
    order = np.lexsort((w.imag, -w.real))
    w = w[order]
    gap = float(abs(w[1].real)) if w.shape[0] > 1 else 0.0
    return w, gap


def steady_state_rho(liouvillian: LiouvillianMatrix):
    """Trace-normalized null right-eigenvector of the superoperator."""
    w, V = np.linalg.eig(liouvillian.matrix)
    dim = 2 ** liouvillian.size
    i0 = int(np.argmin(np.abs(w)))
    rho = V[:, i0].reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def rho_hs_distance(rho, rho_ref) -> float:
    """Frobenius distance ||rho - rho_ref||_F between density matrices."""
    a = np.asarray(rho, dtype=complex)
    b = np.asarray(rho_ref, dtype=complex)
    if a.shape != b.shape:
        raise InvalidParameterError("density matrices must share a shape")
    return float(np.linalg.norm(a - b))


def product_state_rho(occupations):
    """Tensor product of single-site mixed states with given fillings.

    Each occupation n in [0, 1] becomes (1-n)|0><0| + n|1><1|; the result
    is diagonal in the Fock basis and its correlation matrix is
    diag(occupations), free of any operator-string sign subtleties.
    """
    rho = np.array([[1.0]], dtype=complex)
    for n in occupations:
        if not 0.0 <= n <= 1.0:
            raise InvalidParameterError("occupations must lie in [0, 1]")
        rho = np.kron(rho, np.diag([1.0 - n, n]).astype(complex))
    return rho
