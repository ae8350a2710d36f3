"""Coupling-tensor builders for the supported two-body interaction families.

A coupling tensor J has the same index structure as the correlation tensor
and defines the Hamiltonian H = -1/2 sum_m J_m Sigma_m.  The external field
enters through the border entries (one nonzero Latin index); interaction
terms carry exactly two nonzero Latin indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import EPSILON, SUPPORTED_SIZES, unflatten_index

PAIRS_3Q = ((1, 2), (1, 3), (2, 3))


def _field(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (3,):
        raise ValueError(f"field vector must have 3 components, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("field components must be finite")
    return b


@dataclass(frozen=True)
class CouplingTensor:
    """Real coupling tensor over extended Pauli indices.

    The all-zero entry is 0 by convention.  For three qubits every nonzero
    entry carries at most two nonzero index positions (two-body restriction).
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        n = arr.ndim
        if n not in SUPPORTED_SIZES or arr.shape != (4,) * n:
            raise ValueError(f"coupling tensor must have shape (4,)*N for N in {SUPPORTED_SIZES}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coupling entries must be finite")
        if arr[(0,) * n] != 0.0:
            raise ValueError("coupling at the all-zero index must be 0")
        if n == 3:
            for i in np.flatnonzero(arr.reshape(-1)):
                idx = unflatten_index(int(i), 3)
                if sum(k != 0 for k in idx) > 2:
                    raise ValueError(f"3-body coupling entry at index {idx} is not supported")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n_qubits(self) -> int:
        return self.data.ndim


def _with_border(block: np.ndarray, field) -> CouplingTensor:
    j = np.zeros((4, 4))
    j[1:, 1:] = block
    b = _field(field)
    j[0, 1:] = b
    j[1:, 0] = b
    return CouplingTensor(j)


def coupling_xyz(j1: float, j2: float, j3: float, field=(0.0, 0.0, 0.0)) -> CouplingTensor:
    """Anisotropic Heisenberg exchange (diagonal block) with external field.

    The isotropic model is the special case j1 == j2 == j3.
    """
    return _with_border(np.diag([j1, j2, j3]), field)


def coupling_dm(d, field=(0.0, 0.0, 0.0)) -> CouplingTensor:
    """Antisymmetric (Dzyaloshinskii-Moriya) exchange J_ij = eps_ijk d_k."""
    d = np.asarray(d, dtype=float)
    if d.shape != (3,):
        raise ValueError("DM vector must have 3 components")
    block = np.einsum("ijk,k->ij", EPSILON[1:, 1:, 1:], d)
    return _with_border(block, field)


def coupling_ksea(k, field=(0.0, 0.0, 0.0)) -> CouplingTensor:
    """Symmetric off-diagonal (KSEA) exchange J_ij = eps_ijk**2 k_k."""
    k = np.asarray(k, dtype=float)
    if k.shape != (3,):
        raise ValueError("KSEA vector must have 3 components")
    block = np.einsum("ijk,k->ij", EPSILON[1:, 1:, 1:] ** 2, k)
    return _with_border(block, field)


def coupling_general(matrix) -> CouplingTensor:
    """Arbitrary 4x4 coupling matrix, stored verbatim (entry (0,0) must be 0)."""
    j = np.asarray(matrix, dtype=float)
    if j.shape != (4, 4):
        raise ValueError(f"general coupling must be a 4x4 matrix, got shape {j.shape}")
    return CouplingTensor(j)


def coupling_3q(pair_couplings, field=(0.0, 0.0, 0.0)) -> CouplingTensor:
    """Embed two-body pair couplings into a 3-qubit coupling tensor.

    ``pair_couplings`` is either a single 4x4 matrix (or 2-qubit
    CouplingTensor) applied to all three pairs, or a mapping from pairs in
    {(1,2), (1,3), (2,3)} (1-based qubit labels) to 4x4 matrices.  Pair
    matrices must have a zero border: the field is common to all qubits and
    enters only through ``field``, as single-nonzero-index entries.
    """
    if isinstance(pair_couplings, CouplingTensor):
        pair_couplings = pair_couplings.data
    if isinstance(pair_couplings, np.ndarray) or (
        not hasattr(pair_couplings, "items") and pair_couplings is not None
    ):
        pair_couplings = {p: pair_couplings for p in PAIRS_3Q}

    j3 = np.zeros((4, 4, 4))
    for pair, mat in pair_couplings.items():
        key = tuple(int(q) for q in pair)
        if key not in PAIRS_3Q:
            raise ValueError(f"malformed pair key {pair!r}; expected one of {PAIRS_3Q}")
        if isinstance(mat, CouplingTensor):
            mat = mat.data
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (4, 4):
            raise ValueError(f"pair coupling for {key} must be 4x4, got shape {mat.shape}")
        if mat[0, 0] != 0.0:
            raise ValueError(f"pair coupling for {key} has nonzero (0,0) entry")
        if np.any(mat[0, 1:] != 0.0) or np.any(mat[1:, 0] != 0.0):
            raise ValueError(
                f"pair coupling for {key} carries border (field) entries; "
                "pass the common field through the field argument"
            )
        a, b = key[0] - 1, key[1] - 1
        for zeta in range(1, 4):
            for eta in range(1, 4):
                idx = [0, 0, 0]
                idx[a], idx[b] = zeta, eta
                j3[tuple(idx)] += mat[zeta, eta]

    b = _field(field)
    for i in range(1, 4):
        j3[i, 0, 0] += b[i - 1]
        j3[0, i, 0] += b[i - 1]
        j3[0, 0, i] += b[i - 1]
    return CouplingTensor(j3)
