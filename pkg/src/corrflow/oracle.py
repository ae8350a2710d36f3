"""Schrodinger-picture reference implementation.

Everything here works on dense complex matrices and is deliberately built
with different numerical machinery than the correlation-tensor propagator
(Hermitian eigendecomposition of H and unitary conjugation instead of real
rotation blocks), so agreement between the two routes is evidence rather
than tautology.  Used by tests and the verification suite only.
"""

from __future__ import annotations

import numpy as np

from .models import CouplingTensor
from .pauli import pauli_word_basis


def hamiltonian_matrix(coupling: CouplingTensor) -> np.ndarray:
    """H = -1/2 sum_m J_m Sigma_m as a dense Hermitian matrix."""
    basis = pauli_word_basis(coupling.n_qubits)
    return -0.5 * np.einsum("m,mij->ij", coupling.data.reshape(-1), basis)


def evolve_density(rho0: np.ndarray, hamiltonian: np.ndarray, t: float) -> np.ndarray:
    """U rho0 U^dagger with U = exp(-iHt), via eigendecomposition of H."""
    rho0 = np.asarray(rho0, dtype=complex)
    h = np.asarray(hamiltonian, dtype=complex)
    if rho0.shape != h.shape:
        raise ValueError(f"dimension mismatch: rho {rho0.shape} vs H {h.shape}")
    energies, vectors = np.linalg.eigh(h)
    u = (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T
    return u @ rho0 @ u.conj().T


def commutator_expand(hamiltonian: np.ndarray, indices) -> np.ndarray:
    """Coefficients of i[H, Sigma_m] in the Pauli-word basis.

    For Hermitian H the coefficients are real; this equals row m of the
    correlation-tensor generator matrix.
    """
    h = np.asarray(hamiltonian, dtype=complex)
    n = {4: 2, 8: 3}[h.shape[0]]
    basis = pauli_word_basis(n)
    word = basis[np.ravel_multi_index(tuple(indices), (4,) * n)]
    comm = 1j * (h @ word - word @ h)
    return np.real(np.einsum("nij,ji->n", basis, comm)) / 2**n


def generator_from_commutators(coupling: CouplingTensor) -> np.ndarray:
    """Assemble the full generator matrix row by row from commutators."""
    n = coupling.n_qubits
    h = hamiltonian_matrix(coupling)
    basis = pauli_word_basis(n)
    comms = 1j * (np.einsum("ij,mjk->mik", h, basis) - np.einsum("mij,jk->mik", basis, h))
    return np.real(np.einsum("nij,mji->mn", basis, comms)) / 2**n
