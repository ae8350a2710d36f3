import numpy as np
import pytest

from corrflow import dynamics, models, oracle
from corrflow.pauli import tensor_from_density


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture
def oracle_trajectory():
    """Independent trajectory: unitary conjugation in the Schrodinger picture."""

    def run(coupling, rho0, times):
        h = oracle.hamiltonian_matrix(coupling)
        energies, vectors = np.linalg.eigh(h)
        rows = []
        for t in times:
            u = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
            rows.append(tensor_from_density(u @ rho0 @ u.conj().T).ravel())
        return np.array(rows)

    return run


@pytest.fixture
def random_coupling_2q():
    def make(rng, family):
        b = rng.normal(size=3)
        if family == "xxx":
            j = rng.normal()
            return models.coupling_xyz(j, j, j, field=b)
        if family == "xyz":
            return models.coupling_xyz(*rng.normal(size=3), field=b)
        if family == "dm":
            return models.coupling_dm(rng.normal(size=3), field=b)
        if family == "ksea":
            return models.coupling_ksea(rng.normal(size=3), field=b)
        j = rng.normal(size=(4, 4))
        j[0, 0] = 0.0
        return models.coupling_general(j)

    return make


@pytest.fixture
def random_coupling_3q(random_coupling_2q):
    def make(rng, family):
        b = rng.normal(size=3)
        if family == "general":
            pairs = {}
            for key in models.PAIRS_3Q:
                j = rng.normal(size=(4, 4))
                j[0, :] = 0.0
                j[:, 0] = 0.0
                pairs[key] = j
            return models.coupling_3q(pairs, field=b)
        pair = random_coupling_2q(rng, family).data.copy()
        pair[0, :] = 0.0
        pair[:, 0] = 0.0
        return models.coupling_3q(pair, field=b)

    return make
