import numpy as np
import pytest

from delocgames import qcore


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_separable(rng, n_terms=4):
    """Convex mixture of Haar-random product pure states (Dirichlet weights)."""
    weights = rng.dirichlet(np.ones(n_terms))
    mat = np.zeros((4, 4), dtype=complex)
    for w in weights:
        a = qcore.random_pure_state(rng, (2,)).amplitudes
        b = qcore.random_pure_state(rng, (2,)).amplitudes
        v = np.kron(a, b)
        mat += w * np.outer(v, v.conj())
    return qcore.DensityMatrix((2, 2), mat)
