"""Initial deviation matrices and momentum-space helpers.

All builders return deviations from the half-filled steady state C_ss = I/2
of the balanced chain; physicality of C_ss + delta_C is checked against that
baseline.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import CorrelationKind, CorrelationState
from .errors import CirculantError, InvalidParameterError, PhysicalityError
from .model import validate_correlation_matrix


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class StateKind(enum.Enum):
    DIAGONAL_EDGE = "diagonal_edge"
    OFFDIAGONAL_BAND = "offdiagonal_band"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class InitialStateSpec:
    """Declarative description of an initial deviation matrix."""

    kind: StateKind
    label: str
    side: Side | None = None
    width: int | None = None
    amplitude: float = 0.0
    #: sequence of (offset, amplitude) pairs for banded states
    band: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        if self.side is not None:
            object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "band",
                           tuple((int(o), complex(a)) for o, a in self.band))


def _check_physical(delta, context):
    c0 = np.eye(delta.shape[0]) / 2.0 + delta
    report = validate_correlation_matrix(c0)
    if not report.physical:
        raise PhysicalityError(
            f"{context}: C(0) = I/2 + delta_C has spectrum "
            f"[{report.min_eigenvalue:.4f}, {report.max_eigenvalue:.4f}], "
            "outside [0, 1]")


def diagonal_edge_state(side, width, amplitude, L) -> CorrelationState:
    """Diagonal deviation of amplitude a on the ``width`` sites nearest an edge.

    The Hilbert-Schmidt distance of the result is |a| sqrt(width).
    """
    side = Side(side)
    if not 1 <= width <= L:
        raise InvalidParameterError(f"width must be in 1..{L}, got {width}")
    if abs(amplitude) > 0.5:
        raise PhysicalityError(
            f"|amplitude| = {abs(amplitude)} > 0.5 pushes C(0) = I/2 + "
            "delta_C outside [0, 1]")
    d = np.zeros(L)
    if side is Side.LEFT:
        d[:width] = amplitude
    else:
        d[L - width:] = amplitude
    return CorrelationState(matrix=np.diag(d).astype(complex),
                            kind=CorrelationKind.DEVIATION)


def uniform_diagonal_state(amplitude, L) -> CorrelationState:
    """Translation-invariant diagonal deviation a * I."""
    if abs(amplitude) > 0.5:
        raise PhysicalityError(f"|amplitude| = {abs(amplitude)} > 0.5")
    return CorrelationState(matrix=amplitude * np.eye(L, dtype=complex),
                            kind=CorrelationKind.DEVIATION)


def offdiagonal_state(band, L, periodic=False) -> CorrelationState:
    """Banded Hermitian deviation from (offset, amplitude) pairs.

    Offsets must come in +/- pairs with complex-conjugate amplitudes (the
    offset-0 amplitude must be real); with ``periodic`` the bands wrap
    around, producing a circulant matrix.  For the plain nearest-neighbour
    band of amplitude a the distance is |a| sqrt(2 (L-1)).
    """
    entries = {}
    for off, amp in band:
        off = int(off)
        amp = complex(amp)
        if off in entries:
            raise InvalidParameterError(f"duplicate band offset {off}")
        if not -L < off < L:
            raise InvalidParameterError(f"offset {off} out of range for L={L}")
        entries[off] = amp
    for off, amp in entries.items():
        if off == 0:
            if abs(amp.imag) > 0:
                raise InvalidParameterError("offset-0 amplitude must be real")
            continue
        partner = entries.get(-off)
        if partner is None or abs(partner - amp.conjugate()) > 1e-14:
            raise InvalidParameterError(
                f"band must contain offset {-off} with the conjugate "
                f"amplitude of offset {off} (Hermiticity)")

    delta = np.zeros((L, L), dtype=complex)
    for off, amp in entries.items():
        if periodic:
            for l in range(L):
                delta[l, (l + off) % L] += amp
        else:
            delta += amp * np.eye(L, k=off, dtype=complex)
    _check_physical(delta, "offdiagonal_state")
    return CorrelationState(matrix=delta, kind=CorrelationKind.DEVIATION)


def build_deviation(spec: InitialStateSpec, L, periodic=False
                    ) -> CorrelationState:
    """Materialize an :class:`InitialStateSpec` as a deviation matrix."""
    if spec.kind is StateKind.DIAGONAL_EDGE:
        if spec.side is None or spec.width is None:
            raise InvalidParameterError(
                f"state '{spec.label}': diagonal_edge needs side and width")
        return diagonal_edge_state(spec.side, spec.width, spec.amplitude, L)
    if spec.kind is StateKind.UNIFORM:
        return uniform_diagonal_state(spec.amplitude, L)
    return offdiagonal_state(spec.band, L, periodic=periodic)


def circulant_row(matrix, tol=1e-10):
    """First row of a circulant matrix, validating translation invariance."""
    m = np.asarray(matrix, dtype=complex)
    L = m.shape[0]
    row0 = m[0]
    for l in range(1, L):
        if np.abs(np.roll(m[l], -l) - row0).max() > tol:
            raise CirculantError(
                "matrix is not circulant (translation invariant) to "
                f"{tol:.1e}")
    return row0


def circulant_symbol(matrix, tol=1e-10):
    """Eigenvalues of a circulant matrix on the plane-wave basis e^{ikx}.

    Returns f(k_m) = sum_d row0[d] exp(+i k_m d) at k_m = 2 pi m / L.
    """
    row0 = circulant_row(matrix, tol=tol)
    L = row0.shape[0]
    return L * np.fft.ifft(row0)


def fourier_components(state: CorrelationState) -> np.ndarray:
    """Momentum components c_k of a translation-invariant deviation.

    Normalized so that Parseval holds exactly:
    sum_k |c_k|^2 = ||delta_C||_F^2.  A diagonal deviation a*I gives
    c_k = a for every k; the nearest-neighbour band of amplitude a gives
    c_k = 2 a cos k.
    """
    if state.kind is not CorrelationKind.DEVIATION:
        raise InvalidParameterError("fourier_components expects a deviation")
    return circulant_symbol(state.matrix)
