"""Initial-state constructors and tensor-level transformations.

Random pure states are drawn Haar-uniformly (normalized complex Gaussian
vectors) from an explicit seeded generator, so every state used in outputs
is reproducible from its seed.
"""

from __future__ import annotations

import numpy as np

from .pauli import CorrelationTensor, tensor_from_density
from .stationary import gamel_check

STATE_KINDS = ("pure_random", "mixed_random", "bell_diagonal", "basis_00", "basis_000", "explicit")
DEFAULT_MIXTURE_WEIGHTS = (0.75, 0.25)


def _haar_vector(rng: np.random.Generator, n_qubits: int) -> np.ndarray:
    dim = 2**n_qubits
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def _check_size(n_qubits: int):
    if n_qubits not in (2, 3):
        raise ValueError(f"unsupported system size {n_qubits}")


def random_pure(seed: int, n_qubits: int) -> CorrelationTensor:
    """Tensor of a Haar-random pure state, deterministic per seed."""
    _check_size(n_qubits)
    rng = np.random.default_rng(seed)
    psi = _haar_vector(rng, n_qubits)
    return tensor_from_density(np.outer(psi, psi.conj()))


def _validate_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty sequence")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must be nonnegative and sum to 1, got {list(w)}")
    return w


def random_mixture(seed: int, n_qubits: int, weights) -> CorrelationTensor:
    """Convex combination of independent Haar-random pure states.

    The component states are drawn sequentially from one seeded generator, so
    the mixture is deterministic per (seed, weights).
    """
    _check_size(n_qubits)
    w = _validate_weights(weights)
    rng = np.random.default_rng(seed)
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    for wi in w:
        psi = _haar_vector(rng, n_qubits)
        rho += wi * np.outer(psi, psi.conj())
    return tensor_from_density(rho)


def bell_diagonal(t1: float, t2: float, t3: float) -> CorrelationTensor:
    """Two-qubit tensor with only the Latin diagonal occupied.

    Raises when the reconstruction is not a state (parameters outside the
    Bell tetrahedron), using the trace-inequality test.
    """
    data = np.zeros((4, 4))
    data[0, 0] = 1.0
    data[1, 1], data[2, 2], data[3, 3] = t1, t2, t3
    tensor = CorrelationTensor(data)
    report = gamel_check(tensor)
    if not report.satisfied:
        raise ValueError(
            f"diagonal ({t1}, {t2}, {t3}) does not define a positive operator "
            f"(margins {report.margins})"
        )
    return tensor


def basis_state(n_qubits: int) -> CorrelationTensor:
    """Tensor of the all-|0> computational product state."""
    _check_size(n_qubits)
    single = np.zeros(4)
    single[0] = single[3] = 1.0
    data = single
    for _ in range(n_qubits - 1):
        data = np.multiply.outer(data, single)
    return CorrelationTensor(data)


def partial_transpose_b(tensor: CorrelationTensor) -> CorrelationTensor:
    """Partial transposition on the second qubit: sign flip of all
    second-index-2 entries.  An involution; may leave the physical set."""
    if tensor.n_qubits != 2:
        raise ValueError("partial transpose is implemented for 2 qubits")
    data = tensor.data.copy()
    data[:, 2] *= -1.0
    return CorrelationTensor(data)


def local_cycle(tensor: CorrelationTensor) -> CorrelationTensor:
    """Cyclic relabeling of the first qubit's Latin axes (1 -> 2 -> 3 -> 1).

    Amounts to a local rotation about the (1,1,1) axis, so the correlation
    vector is unchanged while the trajectory generally is not.
    """
    if tensor.n_qubits != 2:
        raise ValueError("local cycle is implemented for 2 qubits")
    data = tensor.data.copy()
    data[[2, 3, 1], :] = tensor.data[[1, 2, 3], :]
    return CorrelationTensor(data)


def purity(tensor: CorrelationTensor) -> float:
    """Tr(rho^2) computed directly from the tensor: 2**-N sum T**2."""
    return float(np.sum(tensor.data**2) / 2**tensor.n_qubits)


def schmidt_from_tab(tab_squared: float) -> tuple[float, float]:
    """Schmidt coefficients (a, b), a >= b, of a pure 2-qubit state with the
    given T_AB**2 = 1 + 8 a^2 b^2."""
    if not 1.0 <= tab_squared <= 3.0 + 1e-12:
        raise ValueError(f"T_AB**2 of a pure two-qubit state lies in [1, 3], got {tab_squared}")
    disc = max(0.25 - (tab_squared - 1.0) / 8.0, 0.0)
    a2 = 0.5 + np.sqrt(disc)
    return float(np.sqrt(a2)), float(np.sqrt(1.0 - a2))


def find_seed_for_purity(
    target: float,
    n_qubits: int,
    weights=DEFAULT_MIXTURE_WEIGHTS,
    tol: float = 5e-5,
    max_seeds: int = 2_000_000,
) -> int:
    """Smallest seed whose random mixture hits the target purity within tol.

    Used to pin down reference states documented only through their purity.
    The scan evaluates purity from pairwise overlaps without building
    tensors, so it is cheap.
    """
    _check_size(n_qubits)
    w = _validate_weights(weights)
    dim = 2**n_qubits
    for seed in range(max_seeds):
        rng = np.random.default_rng(seed)
        psis = [_haar_vector(rng, n_qubits) for _ in w]
        value = float(np.sum(w**2))
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                value += 2.0 * w[i] * w[j] * abs(np.vdot(psis[i], psis[j])) ** 2
        if abs(value - target) < tol:
            return seed
    raise RuntimeError(f"no seed below {max_seeds} reaches purity {target} within {tol}")
