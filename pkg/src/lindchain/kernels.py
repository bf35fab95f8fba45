"""Backend selection for the propagation kernels.

The compiled Cython extension ``lindchain._kernels`` is preferred when it
was built; otherwise the pure numpy twin ``lindchain._kernels_py`` is used.
Set the environment variable ``LINDCHAIN_PURE_PYTHON=1`` to force the pure
backend (useful for benchmarking and debugging).

Both backends implement the same three operations and agree to floating
point roundoff; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

import numpy as np

from . import _kernels_py as _py

try:
    from . import _kernels as _compiled
except ImportError:          # extension not built; pure numpy fallback
    _compiled = None

_FORCE_PURE = os.environ.get("LINDCHAIN_PURE_PYTHON", "") not in ("", "0")
_impl = _py if (_compiled is None or _FORCE_PURE) else _compiled


def backend_name() -> str:
    """Name of the active kernel backend."""
    return "compiled" if _impl is _compiled else "pure-python"


def compiled_available() -> bool:
    return _compiled is not None


def _c128(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def rk4_lindblad(A, Q, X0, h, n_steps):
    """Fixed-step RK4 for dX/dt = A X + X A^dag + Q over n_steps of size h."""
    A = _c128(A)
    X0 = _c128(X0)
    Q = None if Q is None else _c128(Q)
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    return _impl.rk4_lindblad(A, Q, X0, float(h), int(n_steps))


def sandwich_apply(W, B0, lam, t):
    """W (exp((lam_i + conj(lam_j)) t) * B0) W^dag, re-Hermitized."""
    return _impl.sandwich_apply(_c128(W), _c128(B0),
                                np.ascontiguousarray(lam, dtype=np.complex128),
                                float(t))


def sandwich_norms(W, B0, lam, times):
    """Frobenius norm of the propagated matrix at each time in ``times``."""
    times = np.ascontiguousarray(times, dtype=float)
    return _impl.sandwich_norms(_c128(W), _c128(B0),
                                np.ascontiguousarray(lam, dtype=np.complex128),
                                times)
