"""Open fermion chain models with linear gain and loss.

A model is fully specified by a quadratic Hamiltonian matrix H, a stack of
gain coefficient rows D_g (one row per jump operator, entries multiplying
creation operators) and a stack of loss rows D_l (entries multiplying
annihilation operators).  From these the dissipator matrices

    (M_g)_ij = sum_mu conj(D_g[mu, i]) * D_g[mu, j]
    (M_l)_ij = sum_mu conj(D_l[mu, i]) * D_l[mu, j]

and the non-Hermitian single-particle generator

    H_eff = i H^T - (M_l^T + M_g)

are built, which drive the correlation matrix C_ij = <c_i^dag c_j>.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

HERMITICITY_TOL = 1e-12
#: Dense-algebra cap; everything here is O(L^3) with dense matrices.
MAX_SITES = 512


class Boundary(enum.Enum):
    OBC = "obc"
    PBC = "pbc"


def _frozen_complex(a, name, shape=None):
    out = np.array(a, dtype=complex, order="C", copy=True)
    if shape is not None and out.shape != shape:
        raise InvalidParameterError(
            f"{name} has shape {out.shape}, expected {shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChainParameters:
    """Parameters of the dissipative hopping chain."""

    J: float
    gamma_g: float
    gamma_l: float

    @property
    def Gamma(self) -> float:
        """Mean dissipation rate (gamma_l + gamma_g) / 2."""
        return 0.5 * (self.gamma_l + self.gamma_g)


@dataclass(frozen=True)
class LatticeModel:
    """Complete physical specification of an open quadratic chain.

    All arrays are copied and frozen on construction; instances are safe to
    share across threads.
    """

    hamiltonian: np.ndarray
    gain_coeffs: np.ndarray
    loss_coeffs: np.ndarray
    boundary: Boundary = Boundary.OBC
    edge_compensation: bool = False
    chain: ChainParameters | None = None

    def __post_init__(self):
        H = _frozen_complex(self.hamiltonian, "hamiltonian")
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise InvalidParameterError("hamiltonian must be square")
        L = H.shape[0]
        if L < 1:
            raise InvalidParameterError("system size must be positive")
        if L > MAX_SITES:
            raise InvalidParameterError(
                f"L={L} exceeds the dense-algebra cap {MAX_SITES}")
        defect = np.abs(H - H.conj().T).max() if L else 0.0
        if defect > HERMITICITY_TOL:
            raise InvalidParameterError(
                f"hamiltonian not Hermitian: max |H - H^dag| = {defect:.3e}")
        Dg = np.atleast_2d(_frozen_complex(self.gain_coeffs, "gain_coeffs"))
        Dl = np.atleast_2d(_frozen_complex(self.loss_coeffs, "loss_coeffs"))
        for name, D in (("gain_coeffs", Dg), ("loss_coeffs", Dl)):
            if D.shape[1] != L:
                raise InvalidParameterError(
                    f"{name} must have {L} columns, got {D.shape[1]}")
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "gain_coeffs", Dg)
        object.__setattr__(self, "loss_coeffs", Dl)

    @property
    def size(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class DissipatorPair:
    """Positive semidefinite dissipator matrices M_g, M_l."""

    gain: np.ndarray
    loss: np.ndarray
    #: (gamma_l + gamma_g)/2 for chain models, None for generic jump sets.
    gamma: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gain", _frozen_complex(self.gain, "gain"))
        object.__setattr__(self, "loss", _frozen_complex(self.loss, "loss"))


@dataclass(eq=False)
class EffectiveHamiltonian:
    """The non-Hermitian generator i H^T - (M_l^T + M_g).

    Carries lazily computed eigensystem caches (populated by the spectral
    module); the matrix itself is immutable.
    """

    matrix: np.ndarray
    boundary: Boundary
    source: LatticeModel
    _spectral_cache: object = field(default=None, repr=False)
    _gauge_cache: object = field(default=None, repr=False)

    def __post_init__(self):
        self.matrix = _frozen_complex(self.matrix, "matrix")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PhysicalityReport:
    """Result of checking 0 <= C <= 1 for a correlation matrix."""

    hermiticity_defect: float
    min_eigenvalue: float
    max_eigenvalue: float
    physical: bool


def build_chain_model(J, gamma_g, gamma_l, L, boundary=Boundary.OBC,
                      edge_compensation=True) -> LatticeModel:
    """Build the dissipative hopping chain.

    The Hamiltonian has hopping -J on nearest-neighbour bonds.  Each bond j
    carries one gain operator sqrt(gamma_g/2) (c_j^dag + i c_{j+1}^dag) and
    one loss operator sqrt(gamma_l/2) (c_j - i c_{j+1}); under PBC the bond
    j = L wraps around to site 1.  With ``edge_compensation`` (OBC only),
    single-site gain and loss operators are appended at both ends so the
    on-site decay is uniformly 2*Gamma, which makes the open-chain spectrum
    exactly the shifted asymmetric-hopping (Hatano-Nelson) one.
    """
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise InvalidParameterError(f"L must be an integer >= 2, got {L!r}")
    if J < 0 or gamma_g < 0 or gamma_l < 0:
        raise InvalidParameterError(
            "J, gamma_g and gamma_l must be nonnegative")
    boundary = Boundary(boundary)
    L = int(L)

    H = np.zeros((L, L), dtype=complex)
    for j in range(L - 1):
        H[j, j + 1] = H[j + 1, j] = -J
    if boundary is Boundary.PBC:
        H[L - 1, 0] += -J
        H[0, L - 1] += -J

    n_bonds = L if boundary is Boundary.PBC else L - 1
    ag = np.sqrt(gamma_g / 2.0)
    al = np.sqrt(gamma_l / 2.0)
    rows_g, rows_l = [], []
    for j in range(n_bonds):
        rg = np.zeros(L, dtype=complex)
        rl = np.zeros(L, dtype=complex)
        rg[j] = ag
        rg[(j + 1) % L] = 1j * ag
        rl[j] = al
        rl[(j + 1) % L] = -1j * al
        rows_g.append(rg)
        rows_l.append(rl)
    if edge_compensation and boundary is Boundary.OBC:
        for site in (0, L - 1):
            rg = np.zeros(L, dtype=complex)
            rl = np.zeros(L, dtype=complex)
            rg[site] = ag
            rl[site] = al
            rows_g.append(rg)
            rows_l.append(rl)

    return LatticeModel(
        hamiltonian=H,
        gain_coeffs=np.array(rows_g),
        loss_coeffs=np.array(rows_l),
        boundary=boundary,
        edge_compensation=bool(edge_compensation),
        chain=ChainParameters(float(J), float(gamma_g), float(gamma_l)),
    )


def single_mode_model(gamma_g, gamma_l) -> LatticeModel:
    """One site with gain rate gamma_g and loss rate gamma_l (no hopping)."""
    if gamma_g < 0 or gamma_l < 0:
        raise InvalidParameterError("rates must be nonnegative")
    return LatticeModel(
        hamiltonian=np.zeros((1, 1), dtype=complex),
        gain_coeffs=np.array([[np.sqrt(gamma_g)]], dtype=complex),
        loss_coeffs=np.array([[np.sqrt(gamma_l)]], dtype=complex),
        boundary=Boundary.OBC,
        chain=None,
    )


def dissipator_matrices(model: LatticeModel) -> DissipatorPair:
    """Dissipator matrices M_g = D_g^dag D_g and M_l = D_l^dag D_l."""
    Mg = model.gain_coeffs.conj().T @ model.gain_coeffs
    Ml = model.loss_coeffs.conj().T @ model.loss_coeffs
    gamma = model.chain.Gamma if model.chain is not None else None
    return DissipatorPair(gain=Mg, loss=Ml, gamma=gamma)


def effective_hamiltonian(model: LatticeModel) -> EffectiveHamiltonian:
    """The generator H_eff = i H^T - (M_l^T + M_g) of the correlation flow."""
    d = dissipator_matrices(model)
    mat = 1j * model.hamiltonian.T - (d.loss.T + d.gain)
    return EffectiveHamiltonian(matrix=mat, boundary=model.boundary,
                                source=model)


def validate_correlation_matrix(C, herm_tol=1e-10,
                                spectrum_tol=1e-10) -> PhysicalityReport:
    """Check a candidate correlation matrix for physicality.

    A fermionic correlation matrix must be Hermitian with spectrum inside
    [0, 1].  Returns the measured defects; ``physical`` is True when the
    Hermiticity defect is below ``herm_tol`` and every eigenvalue lies in
    [-spectrum_tol, 1 + spectrum_tol].
    """
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidParameterError("correlation matrix must be square")
    defect = float(np.abs(C - C.conj().T).max())
    ev = np.linalg.eigvalsh((C + C.conj().T) / 2.0)
    lo, hi = float(ev.min()), float(ev.max())
    ok = defect <= herm_tol and lo >= -spectrum_tol and hi <= 1.0 + spectrum_tol
    return PhysicalityReport(hermiticity_defect=defect, min_eigenvalue=lo,
                             max_eigenvalue=hi, physical=ok)


def conjugate_jump_phases(model: LatticeModel) -> LatticeModel:
    """Model with complex-conjugated jump coefficients.

    For the hopping chain this swaps the asymmetry of the effective
    hopping amplitudes and therefore reverses the skin direction; it is the
    mirror image of the original chain.
    """
    return LatticeModel(
        hamiltonian=model.hamiltonian,
        gain_coeffs=model.gain_coeffs.conj(),
        loss_coeffs=model.loss_coeffs.conj(),
        boundary=model.boundary,
        edge_compensation=model.edge_compensation,
        chain=model.chain,
    )
