import numpy as np
import pytest

from lindchain.model import Boundary, build_chain_model


@pytest.fixture(scope="session")
def reference_chain():
    """Reference chain: J=1, gamma_g=gamma_l=0.2, L=40, OBC, compensated."""
    return build_chain_model(1.0, 0.2, 0.2, 40, boundary=Boundary.OBC,
                             edge_compensation=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def match_multisets(a, b):
    """Greedy nearest-neighbour matching of two complex multisets.

    Returns the largest matched distance.  Robust to arbitrary ordering
    conventions (degenerate real parts scramble lexicographic sorts).
    """
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    assert len(a) == len(b)
    worst = 0.0
    for x in a:
        i = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(i)))
    return worst


def random_hermitian(rng, n, scale=1.0):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (X + X.conj().T)


def random_physical_full(rng, n):
    """Random correlation matrix with spectrum strictly inside (0, 1)."""
    h = random_hermitian(rng, n)
    w, V = np.linalg.eigh(h)
    occ = rng.uniform(0.05, 0.95, size=n)
    return (V * occ) @ V.conj().T
