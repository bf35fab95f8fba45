"""Eigensystems of the non-Hermitian generator and skin-effect diagnostics.

The open-boundary chain generator is similar to a Hermitian matrix through a
diagonal (imaginary-gauge) transform, which is how the ``gauge_eigensystem``
route obtains an exactly biorthonormal eigensystem even when the raw
eigenvector matrix is exponentially ill-conditioned.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DefectiveEigensystemError, GaugeUnavailableError
from .model import Boundary, ChainParameters, EffectiveHamiltonian

#: Raise when the measured biorthogonality defect exceeds this.
DEFECT_LIMIT = 1e-6


@dataclass(frozen=True)
class EigenSystem:
    """Biorthogonal eigendecomposition of a (generally non-normal) matrix.

    ``right_vectors`` and ``left_vectors`` hold the eigenvectors as columns,
    scaled so that <L_i|R_j> = delta_ij.  ``biorthogonality_defect`` and
    ``completeness_defect`` are measured, never assumed: skin-effect
    matrices have eigenvector condition numbers growing exponentially with
    system size, and the defects tell the caller when the decomposition has
    degraded.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    condition_estimate: float
    biorthogonality_defect: float
    completeness_defect: float

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class LocalizationReport:
    """Spatial localization of the right eigenvectors.

    ``mean_positions`` is the intensity-weighted site index (1-based) of
    each eigenvector, ``envelope_slopes`` the least-squares slope of
    log |psi(x)| over the bulk sites.  ``theoretical_slope`` is
    ln sqrt|(J - Gamma)/(J + Gamma)| when chain parameters are supplied.
    """

    mean_positions: np.ndarray
    envelope_slopes: np.ndarray
    theoretical_slope: float | None = None


def _sort_order(w):
    # descending real part, ties broken by ascending imaginary part
    return np.lexsort((w.imag, -w.real))


def biorthogonal_eigensystem(heff) -> EigenSystem:
    """Eigenvalues with paired left/right eigenvectors of H_eff.

    Left vectors are obtained from the inverse of the right-eigenvector
    matrix, which enforces <L_i|R_j> = delta_ij up to the solve error; the
    residual defect is measured and stored.  Raises
    :class:`DefectiveEigensystemError` when the defect exceeds
    ``DEFECT_LIMIT`` (callers should then switch to the gauge or ODE path).
    """
    cache = isinstance(heff, EffectiveHamiltonian)
    if cache and heff._spectral_cache is not None:
        return heff._spectral_cache
    mat = heff.matrix if cache else np.asarray(heff, dtype=complex)

    w, R = np.linalg.eig(mat)
    order = _sort_order(w)
    w = w[order]
    R = R[:, order]
    try:
        Rinv = np.linalg.inv(R)
    except np.linalg.LinAlgError as exc:
        raise DefectiveEigensystemError(
            "eigenvector matrix is singular (defective generator); use the "
            "gauge or ODE propagation path") from exc
    lefts = Rinv.conj().T          # columns L_i, <L_i|R_j> = (Rinv R)_ij

    n = w.shape[0]
    eye = np.eye(n)
    bd = float(np.abs(Rinv @ R - eye).max())
    cd = float(np.abs(R @ Rinv - eye).max())
    cond = float(np.linalg.cond(R))
    # biorthogonality alone cannot expose a defective matrix (inversion is
    # self-consistent), so also demand that the similarity reconstructs A
    scale = max(float(np.abs(mat).max()), 1e-300)
    recon = float(np.abs((R * w) @ Rinv - mat).max()) / scale
    defect = max(bd, cd, recon)
    if defect > DEFECT_LIMIT:
        raise DefectiveEigensystemError(
            f"eigensystem defect {defect:.3e} exceeds {DEFECT_LIMIT:.1e}; "
            "use the gauge or ODE propagation path")
    es = EigenSystem(eigenvalues=w, right_vectors=R, left_vectors=lefts,
                     condition_estimate=cond, biorthogonality_defect=bd,
                     completeness_defect=cd)
    if cache:
        heff._spectral_cache = es
    return es


def analytic_spectrum_obc(J, gamma_g, gamma_l, L) -> np.ndarray:
    """Closed-form open-boundary eigenvalues of the chain generator.

    lambda_m = -2 Gamma - 2i Jt cos(pi m / (L+1)),  m = 1..L,

    with Jt = sqrt((J - Gamma)(J + Gamma)); the square root is taken in the
    complex plane so the overdamped regime Gamma > J is covered too.
    """
    Gamma = 0.5 * (gamma_g + gamma_l)
    Jt = np.sqrt(complex((J - Gamma) * (J + Gamma)))
    m = np.arange(1, L + 1)
    return -2.0 * Gamma - 2j * Jt * np.cos(np.pi * m / (L + 1))


def analytic_spectrum_pbc(J, gamma_g, gamma_l, L) -> np.ndarray:
    """Closed-form periodic-boundary eigenvalues.

    lambda_k = -2 Gamma - 2i J cos k - 2 Gamma sin k at k = 2 pi m / L.
    The set is symmetric under k -> -k relabelling, so it should be
    compared with numerical spectra as a multiset.
    """
    Gamma = 0.5 * (gamma_g + gamma_l)
    k = 2.0 * np.pi * np.arange(L) / L
    return -2.0 * Gamma - 2j * J * np.cos(k) - 2.0 * Gamma * np.sin(k)


def localization_profile(eigensystem: EigenSystem,
                         chain: ChainParameters | None = None
                         ) -> LocalizationReport:
    """Mean positions and envelope slopes of the right eigenvectors.

    The envelope slope of eigenvector psi is the least-squares slope of
    ln |psi(x)| against x over the bulk sites x = 2..L-1; entries below
    1e-14 of the vector's maximum are excluded from the fit (exact nodes
    of standing waves would otherwise dominate it).
    """
    R = eigensystem.right_vectors
    L = R.shape[0]
    x = np.arange(1, L + 1, dtype=float)
    mean_pos = np.empty(L)
    slopes = np.empty(L)
    for i in range(L):
        p = np.abs(R[:, i]) ** 2
        mean_pos[i] = float((x * p).sum() / p.sum())
        if L > 2:
            xs = x[1:L - 1]
            amp = np.abs(R[1:L - 1, i])
        else:
            xs = x
            amp = np.abs(R[:, i])
        keep = amp > amp.max() * 1e-14
        if keep.sum() >= 2:
            A = np.vstack([xs[keep], np.ones(keep.sum())]).T
            slopes[i] = np.linalg.lstsq(A, np.log(amp[keep]), rcond=None)[0][0]
        else:
            slopes[i] = np.nan
    theory = None
    if chain is not None:
        J, Gamma = chain.J, chain.Gamma
        if J + Gamma > 0:
            theory = 0.5 * np.log(abs(J - Gamma) / (J + Gamma))
    return LocalizationReport(mean_positions=mean_pos,
                              envelope_slopes=slopes,
                              theoretical_slope=theory)


def gauge_transform(J, Gamma, L) -> np.ndarray:
    """Diagonal entries of the similarity S that symmetrizes the chain.

    S_jj = r^j with r = sqrt|(J - Gamma)/(J + Gamma)| maps the
    asymmetric-hopping matrix to one with uniform hopping
    Jt = sqrt|(J - Gamma)(J + Gamma)|.  Its condition number r^-(L-1) is
    the exact amplification budget of gauge-stabilized propagation.
    Raises :class:`GaugeUnavailableError` at |J| = Gamma (one-way hopping).
    """
    if abs(abs(J) - abs(Gamma)) == 0 or J + Gamma == 0:
        raise GaugeUnavailableError(
            "gauge is singular at |J| = Gamma (one-way hopping)")
    r = np.sqrt(abs((J - Gamma) / (J + Gamma)))
    return r ** np.arange(1, L + 1, dtype=float)


def _gauge_scale_from_matrix(mat):
    """Per-site gauge r from the generator's hopping asymmetry."""
    u = mat[0, 1]
    l = mat[1, 0]
    if u == 0 or l == 0 or abs(u) == abs(l):
        raise GaugeUnavailableError(
            "hopping structure admits no symmetrizing diagonal gauge")
    return np.sqrt(abs(l) / abs(u))


def gauge_eigensystem(heff: EffectiveHamiltonian) -> EigenSystem:
    """Exactly biorthonormal eigensystem via the diagonal gauge.

    Requires an open-boundary chain generator with a uniform on-site decay:
    then S^-1 H_eff S splits into a scalar decay plus a Hermitian (or
    anti-Hermitian) tridiagonal core, which is diagonalized with a stable
    unitary transform.  Right vectors are S V, left vectors S^-1 V, so
    <L_i|R_j> = delta_ij holds to machine precision by construction.
    """
    if heff._gauge_cache is not None:
        return heff._gauge_cache
    if heff.boundary is not Boundary.OBC:
        raise GaugeUnavailableError("gauge path requires open boundaries")
    mat = heff.matrix
    L = mat.shape[0]
    if L < 2:
        raise GaugeUnavailableError("gauge path needs at least 2 sites")

    diag = np.diagonal(mat)
    if np.abs(diag - diag[0]).max() > 1e-12:
        raise GaugeUnavailableError(
            "on-site decay is not uniform (build the chain with "
            "edge_compensation=True)")
    dec = diag[0]         # -2 Gamma, real and nonpositive for chain models
    if abs(dec.imag) > 1e-12:
        raise GaugeUnavailableError("on-site term is not a pure decay")

    hop = mat - np.diag(diag)
    if np.abs(np.triu(hop, 2)).max() > 1e-14 or np.abs(np.tril(hop, -2)).max() > 1e-14:
        raise GaugeUnavailableError("generator is not tridiagonal")
    r = _gauge_scale_from_matrix(mat)
    s = r ** np.arange(1, L + 1, dtype=float)
    core = hop * np.outer(1.0 / s, s)      # S^-1 hop S

    herm_defect = np.abs(core - core.conj().T).max()
    anti_defect = np.abs(core + core.conj().T).max()
    scale = max(np.abs(core).max(), 1.0)
    if anti_defect <= 1e-12 * scale:
        # core = -i Ht with Ht Hermitian: unitary rotation of the chain
        mu, V = np.linalg.eigh(1j * core)
        w = dec - 1j * mu
    elif herm_defect <= 1e-12 * scale:
        kappa, V = np.linalg.eigh(core)
        w = dec + kappa
    else:
        raise GaugeUnavailableError(
            "gauged hopping core is neither Hermitian nor anti-Hermitian")

    order = _sort_order(w)
    w = w[order]
    V = V[:, order]
    R = s[:, None] * V
    lefts = (1.0 / s)[:, None] * V
    bd = float(np.abs(lefts.conj().T @ R - np.eye(L)).max())
    cd = float(np.abs(R @ lefts.conj().T - np.eye(L)).max())
    cond = float(s.max() / s.min())
    es = EigenSystem(eigenvalues=w, right_vectors=R, left_vectors=lefts,
                     condition_estimate=cond, biorthogonality_defect=bd,
                     completeness_defect=cd)
    heff._gauge_cache = es
    return es
