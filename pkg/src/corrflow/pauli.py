"""Extended Pauli algebra for 2- and 3-qubit systems.

Operators are indexed over the extended set {identity, x, y, z} = {0, 1, 2, 3}.
Multi-qubit words are Kronecker products; a word is addressed either by a
tuple of single-qubit indices or by the row-major flat index (4*mu + nu for
two qubits).  The structure constants ``theta`` (totally symmetric) and
``epsilon`` (totally antisymmetric) encode products and commutators over the
extended index set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SUPPORTED_SIZES = (2, 3)

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def theta(alpha: int, beta: int, gamma: int) -> int:
    """Symmetric structure constant: 1 iff one index is 0 and the other two
    are equal (the all-zero triple counts, as forced by identity*identity)."""
    return int(
        (alpha == 0 and beta == gamma)
        or (beta == 0 and alpha == gamma)
        or (gamma == 0 and alpha == beta)
    )


def epsilon(alpha: int, beta: int, gamma: int) -> int:
    """Levi-Civita value on {1,2,3}; 0 whenever any index is 0."""
    if 0 in (alpha, beta, gamma):
        return 0
    if (alpha, beta, gamma) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        return 1
    if (alpha, beta, gamma) in ((3, 2, 1), (2, 1, 3), (1, 3, 2)):
        return -1
    return 0


THETA = np.array(
    [[[theta(a, b, c) for c in range(4)] for b in range(4)] for a in range(4)],
    dtype=float,
)
EPSILON = np.array(
    [[[epsilon(a, b, c) for c in range(4)] for b in range(4)] for a in range(4)],
    dtype=float,
)


def pauli_product(mu: int, zeta: int) -> list[tuple[int, complex]]:
    """Expansion of sigma_mu sigma_zeta in the extended basis.

    Returns the single nonzero term as ``[(alpha, coefficient)]`` where the
    coefficient is ``theta + i*epsilon`` evaluated at (mu, zeta, alpha).
    """
    terms = []
    for alpha in range(4):
        coeff = THETA[mu, zeta, alpha] + 1j * EPSILON[mu, zeta, alpha]
        if coeff != 0:
            terms.append((alpha, complex(coeff)))
    return terms


def flat_index(indices) -> int:
    """Row-major flat index of a multi-index (first qubit most significant)."""
    i = 0
    for k in indices:
        i = 4 * i + int(k)
    return i


def unflatten_index(i: int, n_qubits: int) -> tuple[int, ...]:
    """Inverse of :func:`flat_index`."""
    out = []
    for _ in range(n_qubits):
        out.append(i % 4)
        i //= 4
    return tuple(reversed(out))


def pauli_word_matrix(indices) -> np.ndarray:
    """Kronecker product of single-qubit Pauli matrices for a multi-index."""
    m = np.array([[1.0 + 0j]])
    for k in indices:
        if not 0 <= int(k) <= 3:
            raise ValueError(f"Pauli index out of range: {k}")
        m = np.kron(m, PAULI[int(k)])
    return m


@lru_cache(maxsize=None)
def pauli_word_basis(n_qubits: int) -> np.ndarray:
    """All 4**n Pauli words stacked as a (4**n, 2**n, 2**n) array, flat order."""
    if n_qubits not in SUPPORTED_SIZES:
        raise ValueError(f"unsupported system size {n_qubits}; expected one of {SUPPORTED_SIZES}")
    words = [
        pauli_word_matrix(idx)
        for idx in itertools.product(range(4), repeat=n_qubits)
    ]
    basis = np.array(words)
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class CorrelationTensor:
    """Real expectation-value tensor T over extended Pauli indices.

    Shape is (4,)*n_qubits; the all-zero entry is the unit trace and must be
    1.  Entry bounds and positivity are properties of physical states only:
    the toolkit deliberately propagates unphysical tensors (e.g. partial
    transposes), so they are not enforced here.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        n = arr.ndim
        if n not in SUPPORTED_SIZES or arr.shape != (4,) * n:
            raise ValueError(f"correlation tensor must have shape (4,)*N for N in {SUPPORTED_SIZES}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("correlation tensor entries must be finite")
        if abs(arr[(0,) * n] - 1.0) > 1e-9:
            raise ValueError(f"entry at the all-zero index must be 1, got {arr[(0,) * n]}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def n_qubits(self) -> int:
        return self.data.ndim

    def ravel(self) -> np.ndarray:
        """Flat read-only view in row-major (flat-index) order."""
        return self.data.reshape(-1)

    def __getitem__(self, idx):
        return self.data[idx]


def tensor_from_density(rho: np.ndarray, atol: float = 1e-10) -> CorrelationTensor:
    """Correlation tensor T_m = Tr(Sigma_m rho) of a density matrix.

    ``rho`` must be Hermitian with unit trace (to ``atol``) and of dimension
    2**N with N in {2, 3}.  Imaginary parts of the traces, which are below
    round-off for valid input, are discarded.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    dim = rho.shape[0]
    n = {4: 2, 8: 3}.get(dim)
    if n is None:
        raise ValueError(f"density matrix dimension {dim} is not 2**N for N in {SUPPORTED_SIZES}")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise ValueError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError(f"density matrix trace is {np.trace(rho)}, expected 1")
    basis = pauli_word_basis(n)
    values = np.einsum("mij,ji->m", basis, rho)
    return CorrelationTensor(values.real.reshape((4,) * n))


def density_from_tensor(tensor: CorrelationTensor | np.ndarray) -> np.ndarray:
    """Bloch-representation reconstruction rho = 2**-N sum_m T_m Sigma_m.

    Positivity is not checked: the reconstruction of an arbitrary tensor is a
    Hermitian unit-trace matrix but not necessarily a state.
    """
    arr = tensor.data if isinstance(tensor, CorrelationTensor) else np.asarray(tensor, dtype=float)
    n = arr.ndim
    if n not in SUPPORTED_SIZES or arr.shape != (4,) * n:
        raise ValueError(f"expected a (4,)*N tensor with N in {SUPPORTED_SIZES}, got shape {arr.shape}")
    basis = pauli_word_basis(n)
    return np.einsum("m,mij->ij", arr.reshape(-1), basis) / 2**n
