"""Relaxation-curve experiments: distances, crossings, decay fits.

A relaxation anomaly is declared when the Hilbert-Schmidt distance curves
of two initial states cross: the initially farther state overtakes the
closer one.  Banded (inter-site correlated) initial states can produce two
crossings under open boundaries; periodic chains show at most one.
"""

import enum
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .dynamics import (CorrelationKind, CorrelationState, PropagatorMethod,
                       hs_distance, propagation_norms, steady_state)
from .errors import (CirculantError, InvalidParameterError,
                     NoUniqueSteadyStateError, PhysicalityError)
from .model import (Boundary, LatticeModel, effective_hamiltonian,
                    validate_correlation_matrix)
from .states import InitialStateSpec, build_deviation, circulant_symbol


@dataclass(frozen=True)
class DistanceCurve:
    """Distance-to-steady-state samples for one initial state."""

    times: np.ndarray
    distances: np.ndarray
    label: str = ""
    fingerprint: str = ""

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        d = np.array(self.distances, dtype=float)
        if t.ndim != 1 or t.shape != d.shape:
            raise InvalidParameterError("times/distances must match 1-d")
        if t.shape[0] and (t[0] < 0 or (np.diff(t) <= 0).any()):
            raise InvalidParameterError(
                "times must be strictly increasing and nonnegative")
        if (d < 0).any():
            raise InvalidParameterError("distances must be nonnegative")
        t.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "distances", d)


class CrossingVerdict(enum.Enum):
    NONE = "none"
    SINGLE = "single-crossing"
    DOUBLE = "double-crossing"
    MULTIPLE = "multiple-crossing"


@dataclass(frozen=True)
class CrossingReport:
    """Crossing times of two distance curves and the resulting verdict."""

    crossing_times: tuple
    initial_ordering: str        # label of the curve that starts farther
    verdict: CrossingVerdict


class FitKind(enum.Enum):
    POWER_LAW = "power_law"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class DecayFit:
    """Least-squares decay descriptor over a time window.

    For ``POWER_LAW`` the value is the log-log slope (a t^-p decay fits to
    -p); for ``EXPONENTIAL`` it is the positive rate gamma of exp(-gamma t).
    ``residual`` is the RMS misfit of log D.
    """

    window: tuple
    kind: FitKind
    value: float
    residual: float
    n_points: int


def model_fingerprint(model: LatticeModel) -> str:
    """Stable hash of the physical model parameters."""
    if model.chain is not None:
        payload = {
            "kind": "chain",
            "J": model.chain.J,
            "gamma_g": model.chain.gamma_g,
            "gamma_l": model.chain.gamma_l,
            "L": model.size,
            "boundary": model.boundary.value,
            "edge_compensation": model.edge_compensation,
        }
        raw = json.dumps(payload, sort_keys=True).encode()
    else:
        h = hashlib.sha256()
        for arr in (model.hamiltonian, model.gain_coeffs, model.loss_coeffs):
            h.update(np.ascontiguousarray(arr).tobytes())
        raw = h.hexdigest().encode()
    return hashlib.sha256(raw).hexdigest()[:16]


def resolve_steady_state(model: LatticeModel, heff=None) -> CorrelationState:
    """Steady state for curve experiments.

    For the periodic chain the Lyapunov problem is singular (one mode does
    not decay), so no unique steady state exists; in the balanced case
    gamma_l = gamma_g the half-filled state I/2 is nevertheless stationary
    and is imposed analytically here.  Unbalanced periodic chains raise.
    """
    try:
        return steady_state(model, heff=heff)
    except NoUniqueSteadyStateError:
        ch = model.chain
        if (model.boundary is Boundary.PBC and ch is not None
                and abs(ch.gamma_l - ch.gamma_g) <= 1e-14):
            half = 0.5 * np.eye(model.size, dtype=complex)
            return CorrelationState(matrix=half, kind=CorrelationKind.FULL)
        raise


def _as_deviation(model, initial, periodic):
    if isinstance(initial, CorrelationState):
        if initial.kind is not CorrelationKind.DEVIATION:
            raise InvalidParameterError("initial state must be a deviation")
        return initial, None
    return build_deviation(initial, model.size, periodic=periodic), initial


class _CurveContext:
    """Propagation context shared by curve sampling and refinement."""

    def __init__(self, model, initial, steady=None, method=None,
                 fast_path="auto"):
        if fast_path not in ("auto", "off", "require"):
            raise InvalidParameterError("fast_path must be auto/off/require")
        self.heff = effective_hamiltonian(model)
        periodic = model.boundary is Boundary.PBC
        self.delta0, self.spec = _as_deviation(model, initial, periodic)
        if steady is None:
            steady = resolve_steady_state(model, heff=self.heff)
        rep = validate_correlation_matrix(steady.matrix + self.delta0.matrix)
        if not rep.physical:
            raise PhysicalityError(
                "C(0) = C_ss + delta_C(0) is unphysical: spectrum "
                f"[{rep.min_eigenvalue:.4f}, {rep.max_eigenvalue:.4f}]")
        self.method = PropagatorMethod(method) if method is not None else None

        self.circulant = None
        if fast_path != "off" and periodic:
            try:
                ck = circulant_symbol(self.delta0.matrix)
                lam_k = circulant_symbol(self.heff.matrix, tol=1e-12)
                self.circulant = (ck, lam_k.real)
            except CirculantError:
                if fast_path == "require":
                    raise
        elif fast_path == "require":
            raise CirculantError("fast path requires a periodic chain")

    def norms(self, times):
        times = np.asarray(times, dtype=float)
        out = np.empty(times.shape[0])
        zero = times == 0.0
        out[zero] = hs_distance(self.delta0)
        pos = ~zero
        if pos.any():
            if self.circulant is not None:
                ck, re_lam = self.circulant
                mode = ck[None, :] * np.exp(np.outer(times[pos], 2.0 * re_lam))
                out[pos] = np.linalg.norm(mode, axis=1)
            else:
                out[pos] = propagation_norms(self.delta0, self.heff,
                                             times[pos], method=self.method)
        return out

    def at(self, t):
        return float(self.norms(np.array([t], dtype=float))[0])


def make_distance_evaluator(model: LatticeModel, initial, steady=None,
                            method=None, fast_path="auto"):
    """Callable t -> D(t) backed by fresh propagation, for refinement.

    ``fast_path`` selects the momentum-space route for circulant states on
    periodic chains: "auto" uses it when applicable, "off" never, "require"
    raises if unavailable.
    """
    ctx = _CurveContext(model, initial, steady=steady, method=method,
                        fast_path=fast_path)
    return ctx.at


def distance_curve(model: LatticeModel, initial, t_grid, steady=None,
                   method=None, fast_path="auto", label=None) -> DistanceCurve:
    """Hilbert-Schmidt distance D(t) of one initial state over a grid.

    ``initial`` is an :class:`InitialStateSpec` or a deviation
    :class:`CorrelationState`.  The curve is deterministic for a given
    model, state and grid.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    ctx = _CurveContext(model, initial, steady=steady, method=method,
                        fast_path=fast_path)
    if label is None:
        label = ctx.spec.label if ctx.spec is not None else ""
    distances = ctx.norms(t_grid)
    return DistanceCurve(times=t_grid, distances=distances, label=label,
                         fingerprint=model_fingerprint(model))


def rescaled_curve(curve: DistanceCurve, Gamma: float) -> DistanceCurve:
    """Multiply the curve by exp(4 Gamma t), removing the uniform decay.

    Where the distance does not decay at the uniform rate (periodic chains
    keep an undamped mode) the product grows without bound and saturates
    to inf at large t; that is reported as-is.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        d = curve.distances * np.exp(4.0 * Gamma * curve.times)
    d = np.where(curve.distances == 0.0, 0.0, d)   # avoid 0 * inf
    return DistanceCurve(times=curve.times, distances=d,
                         label=curve.label + "_rescaled",
                         fingerprint=curve.fingerprint)


#: Sign differences below REL_BAND * max(D1, D2) do not count as crossings.
REL_BAND = 1e-9
#: Samples where both curves sit below NOISE_FLOOR * max initial distance
#: are machine noise and are excluded from crossing detection.
NOISE_FLOOR = 1e-13


def detect_crossings(curve1: DistanceCurve, curve2: DistanceCurve,
                     evaluators=None, refine_rel=1e-4) -> CrossingReport:
    """Find the times where two distance curves cross.

    Sign changes of D1 - D2 are counted only where the difference exceeds
    the relative band ``REL_BAND`` and the curves are above the numerical
    noise floor.  Each bracketed crossing is refined to ``refine_rel``
    relative accuracy by bisection with fresh propagator evaluations when
    ``evaluators = (f1, f2)`` is supplied, and by log-linear interpolation
    otherwise (exact for locally exponential curves).
    """
    if not np.array_equal(curve1.times, curve2.times):
        raise InvalidParameterError("curves must share the same time grid")
    t = curve1.times
    d1 = curve1.distances
    d2 = curve2.distances
    scale0 = max(d1[0], d2[0]) if t.shape[0] else 0.0

    diff = d1 - d2
    big = np.maximum(d1, d2)
    significant = (np.abs(diff) > REL_BAND * big) & (big > NOISE_FLOOR * scale0)
    idx = np.nonzero(significant)[0]

    crossings = []
    for a, b in zip(idx[:-1], idx[1:]):
        if np.sign(diff[a]) == np.sign(diff[b]):
            continue
        if evaluators is not None:
            lo, hi = float(t[a]), float(t[b])
            flo = diff[a]
            while (hi - lo) > refine_rel * max(hi, refine_rel):
                mid = 0.5 * (lo + hi)
                fm = evaluators[0](mid) - evaluators[1](mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if np.sign(fm) == np.sign(flo):
                    lo, flo = mid, fm
                else:
                    hi = mid
            crossings.append(0.5 * (lo + hi))
        else:
            # log-linear refinement: exact for exponential segments
            with np.errstate(divide="ignore"):
                la = np.log(d1[a]) - np.log(d2[a])
                lb = np.log(d1[b]) - np.log(d2[b])
            if np.isfinite(la) and np.isfinite(lb) and la != lb:
                frac = la / (la - lb)
            else:
                frac = diff[a] / (diff[a] - diff[b])
            crossings.append(float(t[a] + frac * (t[b] - t[a])))

    if d1[0] > d2[0]:
        farther = curve1.label or "curve1"
    elif d2[0] > d1[0]:
        farther = curve2.label or "curve2"
    else:
        farther = "equal"
    n = len(crossings)
    verdict = (CrossingVerdict.NONE if n == 0 else
               CrossingVerdict.SINGLE if n == 1 else
               CrossingVerdict.DOUBLE if n == 2 else
               CrossingVerdict.MULTIPLE)
    return CrossingReport(crossing_times=tuple(crossings),
                          initial_ordering=farther, verdict=verdict)


def _window_mask(curve, window):
    ta, tb = window
    if not ta < tb:
        raise InvalidParameterError("window must satisfy t_a < t_b")
    m = (curve.times >= ta) & (curve.times <= tb) & (curve.distances > 0)
    if m.sum() < 8:
        raise InvalidParameterError(
            f"window [{ta}, {tb}] contains {int(m.sum())} usable points, "
            "need at least 8")
    return m


def auto_power_window(curve: DistanceCurve, slope_span=0.1):
    """Largest log-t span where the local log-log slope varies < slope_span."""
    m = (curve.times > 0) & (curve.distances > 0)
    t = curve.times[m]
    d = curve.distances[m]
    if t.shape[0] < 8:
        raise InvalidParameterError("curve has too few positive samples")
    logt = np.log(t)
    slopes = np.gradient(np.log(d), logt)
    best = None
    n = slopes.shape[0]
    for i in range(n):
        lo = hi = slopes[i]
        for j in range(i + 1, n):
            lo = min(lo, slopes[j])
            hi = max(hi, slopes[j])
            if hi - lo >= slope_span:
                break
            if j - i + 1 >= 8:
                span = logt[j] - logt[i]
                if best is None or span > best[0]:
                    best = (span, t[i], t[j])
    if best is None:
        raise InvalidParameterError("no stable power-law window found")
    return (float(best[1]), float(best[2]))


def auto_exponential_window(curve: DistanceCurve):
    """The final decade of the time grid."""
    t_max = float(curve.times[-1])
    return (t_max / 10.0, t_max)


def fit_power_law(curve: DistanceCurve, window="auto") -> DecayFit:
    """Least-squares exponent of D ~ t^p over the window (p is the value)."""
    if window == "auto":
        window = auto_power_window(curve)
    m = _window_mask(curve, window) & (curve.times > 0)
    if m.sum() < 8:
        raise InvalidParameterError("fewer than 8 positive samples in window")
    x = np.log(curve.times[m])
    y = np.log(curve.distances[m])
    A = np.vstack([x, np.ones(x.shape[0])]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return DecayFit(window=(float(window[0]), float(window[1])),
                    kind=FitKind.POWER_LAW, value=float(coef[0]),
                    residual=resid, n_points=int(m.sum()))


def fit_exponential_rate(curve: DistanceCurve, window="auto") -> DecayFit:
    """Least-squares rate gamma of D ~ exp(-gamma t) over the window."""
    if window == "auto":
        window = auto_exponential_window(curve)
    m = _window_mask(curve, window)
    x = curve.times[m]
    y = np.log(curve.distances[m])
    A = np.vstack([x, np.ones(x.shape[0])]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    return DecayFit(window=(float(window[0]), float(window[1])),
                    kind=FitKind.EXPONENTIAL, value=float(-coef[0]),
                    residual=resid, n_points=int(m.sum()))
