"""Correlation-tensor flow: generator matrices, spectra, and propagation.

The Heisenberg-picture equations of motion are linear, dT/dt = M T, with a
real skew-symmetric generator M built from the coupling tensor and the
theta/epsilon structure constants.  Propagation uses the exact orthogonal
decomposition of M into 2x2 rotation blocks (one per +-i*omega eigenvalue
pair), so there is no time-step error and a single decomposition serves an
entire time grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .models import CouplingTensor
from .pauli import EPSILON, THETA, CorrelationTensor

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GeneratorMatrix:
    """Real skew-symmetric generator of the correlation-tensor flow."""

    matrix: np.ndarray
    n_qubits: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        dim = 4**self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"generator for {self.n_qubits} qubits must be {dim}x{dim}, got {m.shape}")
        scale = max(1.0, np.abs(m).max())
        if np.abs(m + m.T).max() > 1e-12 * scale:
            raise ValueError("generator matrix is not skew-symmetric")
        if np.abs(m[0]).max() > 1e-12 * scale or np.abs(m[:, 0]).max() > 1e-12 * scale:
            raise ValueError("row/column of the all-zero index must vanish")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _generator_matrix_2q(j: np.ndarray) -> np.ndarray:
    m = np.einsum("zh,zma,hnb->mnab", j, THETA, EPSILON) + np.einsum(
        "zh,zma,hnb->mnab", j, EPSILON, THETA
    )
    return m.reshape(16, 16)


def _generator_matrix_3q(j: np.ndarray, three_body_sign: float = -1.0) -> np.ndarray:
    """Raw 3-qubit generator assembly.

    The triple-epsilon term is identically zero for 1- and 2-body couplings;
    its sign (-1 for the commutator-consistent convention) is only observable
    on 3-body entries, which the public builder rejects.  The sign knob is
    exposed for the verification suite's fault-injection probe.
    """
    m = (
        np.einsum("zhw,zma,hnb,wlg->mnlabg", j, EPSILON, THETA, THETA)
        + np.einsum("zhw,zma,hnb,wlg->mnlabg", j, THETA, EPSILON, THETA)
        + np.einsum("zhw,zma,hnb,wlg->mnlabg", j, THETA, THETA, EPSILON)
        + three_body_sign * np.einsum("zhw,zma,hnb,wlg->mnlabg", j, EPSILON, EPSILON, EPSILON)
    )
    return m.reshape(64, 64)


def generator_2q(coupling: CouplingTensor) -> GeneratorMatrix:
    """16x16 generator for a two-qubit coupling tensor."""
    if coupling.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit coupling, got {coupling.n_qubits} qubits")
    return GeneratorMatrix(_generator_matrix_2q(coupling.data), 2)


def generator_3q(coupling: CouplingTensor) -> GeneratorMatrix:
    """64x64 generator for a three-qubit (two-body) coupling tensor."""
    if coupling.n_qubits != 3:
        raise ValueError(f"expected a 3-qubit coupling, got {coupling.n_qubits} qubits")
    return GeneratorMatrix(_generator_matrix_3q(coupling.data), 3)


def generator(coupling: CouplingTensor) -> GeneratorMatrix:
    """Dispatch on system size."""
    return generator_2q(coupling) if coupling.n_qubits == 2 else generator_3q(coupling)


@dataclass(frozen=True)
class FrequencySpectrum:
    """Nonnegative characteristic frequencies with multiplicities.

    ``zero_count`` is half the dimension of the kernel; the eigenvalues of the
    skew-symmetric generator are the conjugate pairs +-i*omega, so
    2*(sum of multiplicities) + 2*zero_count equals the matrix dimension.
    """

    frequencies: tuple[tuple[float, int], ...]
    zero_count: int
    dim: int

    def __post_init__(self):
        total = 2 * sum(m for _, m in self.frequencies) + 2 * self.zero_count
        if total != self.dim:
            raise ValueError(f"multiplicities sum to {total}, expected dimension {self.dim}")

    def expanded(self) -> np.ndarray:
        """All dim/2 nonnegative frequencies, zeros included, sorted."""
        vals = [0.0] * self.zero_count
        for w, m in self.frequencies:
            vals.extend([w] * m)
        return np.sort(np.array(vals))


def _merge_spectrum(raw: np.ndarray, zero_count: int, dim: int, tol: float) -> FrequencySpectrum:
    scale = max(1.0, float(np.abs(raw).max()) if raw.size else 1.0)
    mags = np.abs(raw)
    zero_count += int(np.sum(mags <= tol * scale))
    pos = np.sort(mags[mags > tol * scale])
    groups: list[list[float]] = []
    for w in pos:
        if groups and w - groups[-1][-1] < tol * scale:
            groups[-1].append(w)
        else:
            groups.append([w])
    freqs = tuple((float(np.mean(g)), len(g)) for g in groups)
    return FrequencySpectrum(freqs, zero_count, dim)


def frequencies(gen: GeneratorMatrix, tol: float = DEFAULT_TOL) -> FrequencySpectrum:
    """Numeric spectrum of a generator.

    i*M is Hermitian for skew-symmetric real M, so its (real) eigenvalues are
    the signed frequencies.  Frequencies closer than ``tol * scale`` merge
    into one multiplicity; ``scale`` is the largest magnitude, floored at 1.
    """
    m = gen.matrix if isinstance(gen, GeneratorMatrix) else np.asarray(gen, dtype=float)
    lam = np.linalg.eigvalsh(1j * m)
    scale = max(1.0, float(np.abs(lam).max()))
    n_zero = int(np.sum(np.abs(lam) <= tol * scale))
    positive = lam[lam > tol * scale]
    return _merge_spectrum(positive, n_zero // 2, m.shape[0], tol)


ANALYTIC_FREQUENCY_CASES = (
    "xxx",
    "xyz_zero_field",
    "xyz_z_field",
    "dm_zero_field",
    "dm_field",
    "ksea_uniform",
)


def analytic_frequencies(case: str, params: dict, tol: float = DEFAULT_TOL) -> FrequencySpectrum:
    """Closed-form spectrum for one of the documented model cases.

    Cases and parameters:
      xxx             j, field (any orientation)
      xyz_zero_field  j1, j2, j3
      xyz_z_field     j1, j2, j3, b
      dm_zero_field   d (3-vector)
      dm_field        d, field (3-vectors, any orientation)
      ksea_uniform    k (common strength, zero field)
    """
    if case == "xxx":
        j = float(params["j"])
        b = float(np.linalg.norm(np.asarray(params.get("field", (0, 0, 0)), dtype=float)))
        raw = [b, b, 2 * b, 2 * j, b + 2 * j, b - 2 * j]
        zeros = 2
    elif case == "xyz_zero_field":
        j1, j2, j3 = (float(params[k]) for k in ("j1", "j2", "j3"))
        raw = [j1 + j2, j1 - j2, j2 + j3, j2 - j3, j1 + j3, j1 - j3]
        zeros = 2
    elif case == "xyz_z_field":
        j1, j2, j3 = (float(params[k]) for k in ("j1", "j2", "j3"))
        b = float(params["b"])
        w1 = j1 + j2
        w2 = math.sqrt(4 * b * b + (j1 - j2) ** 2)
        raw = [w1, w2]
        raw += [(w1 + s1 * w2) / 2 + s2 * j3 for s1 in (+1, -1) for s2 in (+1, -1)]
        zeros = 2
    elif case == "dm_zero_field":
        d = float(np.linalg.norm(np.asarray(params["d"], dtype=float)))
        raw = [d, d, d, d, 2 * d]
        zeros = 3
    elif case == "dm_field":
        d = np.asarray(params["d"], dtype=float)
        b = np.asarray(params["field"], dtype=float)
        dd, bb = np.linalg.norm(d), np.linalg.norm(b)
        dm, dp = np.linalg.norm(d - b), np.linalg.norm(d + b)
        raw = [dp, dp, dm, dm]
        raw += [math.sqrt(2) * math.sqrt(max(dd**2 + bb**2 + s * dm * dp, 0.0)) for s in (+1, -1)]
        zeros = 2
    elif case == "ksea_uniform":
        k = float(params["k"])
        raw = [k, k, 2 * k, 3 * k, 3 * k]
        zeros = 3
    else:
        raise ValueError(f"no closed-form spectrum for case {case!r}; known cases: {ANALYTIC_FREQUENCY_CASES}")
    return _merge_spectrum(np.array(raw, dtype=float), zeros, 16, tol)


def is_periodic(
    spectrum: FrequencySpectrum, max_denominator: int = 64, tol: float = 1e-8
) -> tuple[bool, float | None]:
    """Commensurability test by rational reconstruction of frequency ratios.

    Periodic iff every nonzero frequency is a rational multiple (denominator
    bounded by ``max_denominator``, within ``tol`` relative) of the smallest
    one.  Returns the common period 2*pi/omega_fundamental when periodic; a
    spectrum with no nonzero frequencies is constant in time and reported as
    periodic with period None.
    """
    omegas = [w for w, _ in spectrum.frequencies]
    if not omegas and spectrum.zero_count == 0:
        raise ValueError("empty spectrum")
    if not omegas:
        return True, None
    w_min = min(omegas)
    ratios = []
    for w in omegas:
        r = w / w_min
        frac = Fraction(r).limit_denominator(max_denominator)
        if abs(r - float(frac)) > tol * max(1.0, r):
            return False, None
        ratios.append(frac)
    lcm = math.lcm(*(f.denominator for f in ratios))
    counts = [f.numerator * (lcm // f.denominator) for f in ratios]
    g = math.gcd(*counts)
    fundamental = w_min * g / lcm
    return True, 2 * math.pi / fundamental


class Propagator:
    """Reusable orthogonal rotation-block decomposition of a generator.

    The columns of Q are a real orthonormal basis adapted to the flow: first
    the kernel, then one (u, v) pair per frequency, in which exp(Mt) acts as
    a plane rotation by omega*t.  Purity is conserved exactly up to round-off
    because the evolution is orthogonal.
    """

    def __init__(self, gen: GeneratorMatrix, tol: float = DEFAULT_TOL):
        m = gen.matrix
        self.n_qubits = gen.n_qubits
        lam, vecs = np.linalg.eigh(1j * m)
        scale = max(1.0, float(np.abs(lam).max()))
        positive = lam > tol * scale
        near_zero = np.abs(lam) <= tol * scale
        cols = []
        omegas = []
        for w, v in zip(lam[positive], vecs[:, positive].T):
            cols.append(math.sqrt(2) * v.real)
            cols.append(math.sqrt(2) * v.imag)
            omegas.append(w)
        n_zero = int(np.sum(near_zero))
        if n_zero:
            stacked = np.concatenate([vecs[:, near_zero].real.T, vecs[:, near_zero].imag.T])
            _, _, vt = np.linalg.svd(stacked)
            cols = [vt[i] for i in range(n_zero)] + cols
        self.basis = np.array(cols).T
        self.omegas = np.array(omegas)
        self.n_zero = n_zero

    def _check(self, tensor: CorrelationTensor) -> np.ndarray:
        if tensor.n_qubits != self.n_qubits:
            raise ValueError(
                f"tensor is for {tensor.n_qubits} qubits but generator is for {self.n_qubits}"
            )
        return tensor.ravel()

    def propagate_array(self, t0_flat: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Flat tensors at the given times, one row per sample."""
        coeffs = self.basis.T @ t0_flat
        x = coeffs[self.n_zero :: 2]
        y = coeffs[self.n_zero + 1 :: 2]
        angles = np.outer(times, self.omegas)
        cos, sin = np.cos(angles), np.sin(angles)
        out = np.tile(coeffs, (len(times), 1))
        out[:, self.n_zero :: 2] = x * cos - y * sin
        out[:, self.n_zero + 1 :: 2] = x * sin + y * cos
        return out @ self.basis.T

    def propagate(self, tensor: CorrelationTensor, t: float) -> CorrelationTensor:
        flat = self.propagate_array(self._check(tensor), np.array([float(t)]))[0]
        return CorrelationTensor(flat.reshape((4,) * self.n_qubits))

    def trajectory(self, tensor: CorrelationTensor, times) -> list[CorrelationTensor]:
        times = np.asarray(times, dtype=float)
        if times.size == 0:
            return []
        flat = self.propagate_array(self._check(tensor), times)
        shape = (4,) * self.n_qubits
        return [CorrelationTensor(row.reshape(shape)) for row in flat]


def propagate(tensor: CorrelationTensor, gen: GeneratorMatrix, t: float) -> CorrelationTensor:
    """T(t) = exp(Mt) T(0); build a fresh decomposition and evaluate once."""
    return Propagator(gen).propagate(tensor, t)


def trajectory(tensor: CorrelationTensor, gen: GeneratorMatrix, t_grid) -> list[CorrelationTensor]:
    """Propagate at each grid point, reusing a single decomposition."""
    return Propagator(gen).trajectory(tensor, t_grid)


class CorrelationVector2Q(NamedTuple):
    t_a: float
    t_b: float
    t_ab: float


class SectorLengths3Q(NamedTuple):
    a1: float
    a2: float
    a3: float


class RegionCheck(NamedTuple):
    inside: bool
    margin: float


def correlation_vectors_2q(flat_tensors: np.ndarray) -> np.ndarray:
    """(T_A, T_B, T_AB) rows for a stack of flat 2-qubit tensors."""
    t = flat_tensors.reshape(-1, 4, 4)
    t_a = np.sqrt(np.sum(t[:, 1:, 0] ** 2, axis=1))
    t_b = np.sqrt(np.sum(t[:, 0, 1:] ** 2, axis=1))
    t_ab = np.sqrt(np.sum(t[:, 1:, 1:] ** 2, axis=(1, 2)))
    return np.stack([t_a, t_b, t_ab], axis=1)


def correlation_vector_2q(tensor: CorrelationTensor) -> CorrelationVector2Q:
    """Root-sum-square reduced coordinates of a 2-qubit tensor."""
    if tensor.n_qubits != 2:
        raise ValueError("correlation vector is defined for 2-qubit tensors")
    return CorrelationVector2Q(*correlation_vectors_2q(tensor.ravel())[0])


def sector_lengths_arrays_3q(flat_tensors: np.ndarray) -> np.ndarray:
    """(A1, A2, A3) rows for a stack of flat 3-qubit tensors."""
    t = flat_tensors.reshape(-1, 4, 4, 4)
    lat = slice(1, 4)
    a1 = (
        np.sum(t[:, lat, 0, 0] ** 2, axis=1)
        + np.sum(t[:, 0, lat, 0] ** 2, axis=1)
        + np.sum(t[:, 0, 0, lat] ** 2, axis=1)
    )
    a2 = (
        np.sum(t[:, lat, lat, 0] ** 2, axis=(1, 2))
        + np.sum(t[:, lat, 0, lat] ** 2, axis=(1, 2))
        + np.sum(t[:, 0, lat, lat] ** 2, axis=(1, 2))
    )
    a3 = np.sum(t[:, lat, lat, lat] ** 2, axis=(1, 2, 3))
    return np.stack([a1, a2, a3], axis=1)


def sector_lengths_3q(tensor: CorrelationTensor) -> SectorLengths3Q:
    """Squared sector lengths (1-, 2-, 3-body) of a 3-qubit tensor."""
    if tensor.n_qubits != 3:
        raise ValueError("sector lengths are defined for 3-qubit tensors")
    return SectorLengths3Q(*sector_lengths_arrays_3q(tensor.ravel())[0])


def region_check_2q(vector: CorrelationVector2Q, tol: float = DEFAULT_TOL) -> RegionCheck:
    """Membership in the attainable two-qubit correlation region.

    The margin is RHS - T_AB**2 of the bounding inequality; physical states
    satisfy margin >= 0 up to round-off.
    """
    t_a, t_b, t_ab = vector
    margin = 3 + t_a**2 + t_b**2 - 4 * t_a * t_b - 4 * abs(t_a - t_b) - t_ab**2
    return RegionCheck(margin >= -tol, float(margin))


def max_tab_analytic(j1: float, j2: float, b: float) -> float:
    """Peak of T_AB**2 from the all-zero product state for j1 = -j2 = 1.

    The field caps the attainable two-body correlation beyond b = 1.
    """
    if not (j1 == 1.0 and j2 == -1.0):
        raise ValueError("closed form requires j1 = -j2 = 1 (field in units of the coupling)")
    b = abs(float(b))
    if b <= 1.0:
        return 3.0
    return 1.0 + 2.0 * (2.0 * b / (1.0 + b * b)) ** 2


TAB_ANALYTIC_CASES = ("xyz_zero_field", "dm_uniform", "ksea_uniform")


def tab_analytic(case: str, t, **params):
    """Closed-form T_AB**2(t) from the all-zero product state.

    Cases: ``xyz_zero_field`` (j1, j2), ``dm_uniform`` (d), ``ksea_uniform``
    (k).  Accepts scalar or array times.
    """
    t = np.asarray(t, dtype=float)
    if case == "xyz_zero_field":
        j1, j2 = float(params["j1"]), float(params["j2"])
        out = 1.0 + 2.0 * np.sin((j1 - j2) * t) ** 2
    elif case == "dm_uniform":
        d = float(params["d"])
        out = (12.0 - 4.0 * np.cos(2.0 * math.sqrt(3) * d * t) + np.cos(4.0 * math.sqrt(3) * d * t)) / 9.0
    elif case == "ksea_uniform":
        k = float(params["k"])
        out = (13.0 - 4.0 * np.cos(6.0 * k * t)) / 9.0
    else:
        raise ValueError(f"no closed-form T_AB**2 for case {case!r}; known cases: {TAB_ANALYTIC_CASES}")
    return out if out.ndim else float(out)
