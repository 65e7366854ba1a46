import numpy as np
import pytest

from crlab.structures import invariant_family
from crlab.variation import breaking_hamiltonian


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture(scope="session")
def family2():
    """Invariant family with maximal stretch 2 (torus |nu| = 0.6)."""
    return invariant_family(2.0)


@pytest.fixture(scope="session")
def audit_u():
    return breaking_hamiltonian(2.0)
