"""Pure numpy implementations of the hot propagation kernels.

Semantically identical to the compiled extension ``_kernels``; kept in sync
so either backend can serve as a reference for the other.
"""

import numpy as np


def rk4_lindblad(A, Q, X0, h, n_steps):
    """Classical fixed-step RK4 for dX/dt = A X + X A^dag + Q.

    The state is re-Hermitized after every step; drift of the Hermitian
    part is a pure numerical artifact of the scheme.
    """
    A = np.asarray(A, dtype=complex)
    X = np.array(X0, dtype=complex)
    Ad = A.conj().T
    if Q is None:
        Q = 0.0

    def f(Y):
        return A @ Y + Y @ Ad + Q

    for _ in range(n_steps):
        k1 = f(X)
        k2 = f(X + (0.5 * h) * k1)
        k3 = f(X + (0.5 * h) * k2)
        k4 = f(X + h * k3)
        X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        X = 0.5 * (X + X.conj().T)
    return X


def sandwich_apply(W, B0, lam, t):
    """One step of eigenbasis propagation: W (E(t) * B0) W^dag, Hermitized.

    E(t)_ij = exp((lam_i + conj(lam_j)) t) elementwise.
    """
    E = np.exp((lam[:, None] + lam.conj()[None, :]) * t)
    out = W @ (E * B0) @ W.conj().T
    return 0.5 * (out + out.conj().T)


def sandwich_norms(W, B0, lam, times):
    """Frobenius norms of the eigenbasis propagation over a time grid."""
    out = np.empty(len(times), dtype=float)
    for i, t in enumerate(times):
        out[i] = np.linalg.norm(sandwich_apply(W, B0, lam, t))
    return out
