import numpy as np
import pytest
from numpy.testing import assert_allclose

from corrflow import oracle
from corrflow.models import (
    CouplingTensor,
    coupling_3q,
    coupling_dm,
    coupling_general,
    coupling_ksea,
    coupling_xyz,
)
from corrflow.pauli import unflatten_index


def test_xyz_isotropic():
    j = coupling_xyz(1, 1, 1).data
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[2, 2] = expected[3, 3] = 1.0
    assert_allclose(j, expected, atol=0)


def test_xyz_pure_field():
    j = coupling_xyz(0, 0, 0, field=(0, 0, 1)).data
    expected = np.zeros((4, 4))
    expected[3, 0] = expected[0, 3] = 1.0
    assert_allclose(j, expected, atol=0)


def test_xyz_anisotropic_diagonal():
    j = coupling_xyz(np.sqrt(3), np.sqrt(2), np.sqrt(5)).data
    assert_allclose(np.diag(j), [0, np.sqrt(3), np.sqrt(2), np.sqrt(5)], atol=0)
    assert np.count_nonzero(j) == 3


def test_dm_z_component():
    j = coupling_dm((0, 0, 1)).data
    expected = np.zeros((4, 4))
    expected[1, 2] = 1.0
    expected[2, 1] = -1.0
    assert_allclose(j, expected, atol=0)


def test_dm_uniform_block():
    j = coupling_dm((1, 1, 1)).data
    expected = np.array(
        [[0, 0, 0, 0], [0, 0, 1, -1], [0, -1, 0, 1], [0, 1, -1, 0]], dtype=float
    )
    assert_allclose(j, expected, atol=0)
    assert_allclose(j[1:, 1:], -j[1:, 1:].T, atol=0)


def test_dm_zero():
    assert not coupling_dm((0, 0, 0)).data.any()


def test_ksea_z_component():
    j = coupling_ksea((0, 0, 1)).data
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 1.0
    assert_allclose(j, expected, atol=0)


def test_ksea_uniform_block():
    j = coupling_ksea((1, 1, 1)).data
    block = j[1:, 1:]
    assert_allclose(block, np.ones((3, 3)) - np.eye(3), atol=0)


def test_ksea_pure_field():
    j = coupling_ksea((0, 0, 0), field=(1, 0, 0)).data
    expected = np.zeros((4, 4))
    expected[1, 0] = expected[0, 1] = 1.0
    assert_allclose(j, expected, atol=0)


def test_general_zero_and_validation():
    assert not coupling_general(np.zeros((4, 4))).data.any()
    bad = np.zeros((4, 4))
    bad[0, 0] = 1.0
    with pytest.raises(ValueError):
        coupling_general(bad)


def test_builders_add_linearly():
    b = (0.2, -0.1, 0.4)
    total = (
        coupling_xyz(1, 2, 3).data + coupling_dm((0.5, -1, 2)).data + coupling_ksea((1, 1, 0), field=b).data
    )
    combined = coupling_general(total)
    assert combined.data[0, 1] == b[0]
    assert_allclose(np.diag(combined.data), [0, 1, 2, 3], atol=0)


def test_dm_plus_ksea_without_z_component():
    j = coupling_dm((1, 1, 0)).data + coupling_ksea((1, 1, 0)).data
    assert j[1, 2] == 0.0 and j[2, 1] == 0.0


def test_general_decomposition_roundtrip(rng):
    # split a random coupling into diagonal + antisymmetric + symmetric
    # off-diagonal + border parts and rebuild it from the dedicated builders
    j = rng.normal(size=(4, 4))
    j[0, 0] = 0.0
    j[0, 1:] = j[1:, 0] = rng.normal(size=3)  # symmetric border convention
    block = j[1:, 1:]
    diag = np.diag(block)
    anti = (block - block.T) / 2
    sym_off = (block + block.T) / 2 - np.diag(diag)
    d = np.array([anti[1, 2], anti[2, 0], anti[0, 1]])
    k = np.array([sym_off[1, 2], sym_off[0, 2], sym_off[0, 1]])
    rebuilt = (
        coupling_xyz(*diag, field=j[0, 1:]).data + coupling_dm(d).data + coupling_ksea(k).data
    )
    assert_allclose(rebuilt, j, atol=1e-15)


@pytest.mark.parametrize(
    "coupling",
    [
        coupling_xyz(1.3, -0.2, 0.8, field=(0.3, 0.1, -0.5)),
        coupling_dm((1, -2, 0.5), field=(0, 0, 1)),
        coupling_ksea((0.7, 0.7, 0.7), field=(1, 1, 1)),
        coupling_3q(coupling_xyz(1, -1, 0).data * 0 + np.diag([0, 1, -1, 0.5]), field=(0, 0, 2)),
    ],
)
def test_hamiltonian_hermitian(coupling):
    h = oracle.hamiltonian_matrix(coupling)
    assert np.abs(h - h.conj().T).max() < 1e-14


def test_general_matches_dedicated_builders():
    b = (0.4, -0.2, 0.9)
    hamani = np.array(
        [[0, *b], [b[0], 1.1, 0, 0], [b[1], 0, -0.3, 0], [b[2], 0, 0, 0.6]], dtype=float
    )
    assert_allclose(coupling_general(hamani).data, coupling_xyz(1.1, -0.3, 0.6, field=b).data, atol=0)
    d1, d2, d3 = 0.5, -1.0, 2.0
    hamdm = np.array(
        [[0, *b], [b[0], 0, d3, -d2], [b[1], -d3, 0, d1], [b[2], d2, -d1, 0]], dtype=float
    )
    assert_allclose(coupling_general(hamdm).data, coupling_dm((d1, d2, d3), field=b).data, atol=0)
    k1, k2, k3 = 0.3, 0.8, -0.4
    hamks = np.array(
        [[0, *b], [b[0], 0, k3, k2], [b[1], k3, 0, k1], [b[2], k2, k1, 0]], dtype=float
    )
    assert_allclose(coupling_general(hamks).data, coupling_ksea((k1, k2, k3), field=b).data, atol=0)


def test_coupling_3q_single_pair_embedding():
    pair = np.diag([0.0, 2.0, 2.0, 2.0])
    j = coupling_3q({(1, 2): pair}).data
    for i in (1, 2, 3):
        assert j[i, i, 0] == 2.0
    assert np.count_nonzero(j) == 3


def test_coupling_3q_pure_field():
    j = coupling_3q({}, field=(0, 0, 1)).data
    nz = {unflatten_index(int(i), 3) for i in np.flatnonzero(j.reshape(-1))}
    assert nz == {(3, 0, 0), (0, 3, 0), (0, 0, 3)}


def test_coupling_3q_all_pairs_dm_count():
    pair = coupling_dm((1, 1, 1)).data
    j = coupling_3q(pair).data
    assert np.count_nonzero(j) == 18


def test_coupling_3q_validation():
    pair = np.diag([0.0, 1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        coupling_3q({(1, 4): pair})
    with_border = pair.copy()
    with_border[0, 3] = 0.5
    with pytest.raises(ValueError):
        coupling_3q({(1, 2): with_border})


def test_coupling_tensor_rejects_3_body():
    data = np.zeros((4, 4, 4))
    data[1, 2, 3] = 1.0
    with pytest.raises(ValueError):
        CouplingTensor(data)


def test_coupling_tensor_rejects_nonzero_origin():
    data = np.zeros((4, 4))
    data[0, 0] = 0.1
    with pytest.raises(ValueError):
        CouplingTensor(data)
