import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ccode.graphcore import OrientedGraph

settings.register_profile("ci", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

# the two orientations of the 4-cycle used as worked examples
A1 = np.array([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]])
A2 = np.array([[0, 0, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]])

M1 = 0.5 * np.array([[1, 0, -1, 0], [0, 1, 0, -1], [-1, 0, 1, 0], [0, -1, 0, 1]], dtype=float)
H1 = 0.5 * np.array(
    [[1, 1j, -1, -1j], [-1j, 1, 1j, -1], [-1, -1j, 1, 1j], [1j, -1, -1j, 1]], dtype=complex
)
_s = 1j / np.sqrt(2)
H2 = np.array([[1, -_s, 0, -_s], [_s, 1, _s, 0], [0, -_s, 1, _s], [_s, 0, -_s, 1]], dtype=complex)


@pytest.fixture
def g1():
    return OrientedGraph.from_matrix(A1)


@pytest.fixture
def g2():
    return OrientedGraph.from_matrix(A2)


def random_hermitian(rng, n, scale=1.0):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (x + x.conj().T) / 2


def equal_up_to_perm_conj(g, h, atol=1e-9):
    """Whether ``g`` equals ``P h P^T`` or its conjugate for some permutation ``P``."""
    from itertools import permutations

    n = g.shape[0]
    for perm in permutations(range(n)):
        hp = h[np.ix_(perm, perm)]
        if np.allclose(g, hp, atol=atol) or np.allclose(g, hp.conj(), atol=atol):
            return True
    return False


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
