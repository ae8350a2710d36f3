"""Request/response models for the service and the JSON config schemas.

The model and state schemas double as the on-disk config format consumed by
the command-line client, so validation lives here in one place.
"""

from __future__ import annotations

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .. import dynamics, models, states
from ..models import CouplingTensor
from ..pauli import CorrelationTensor


def _as_triple(value, name: str) -> tuple[float, float, float]:
    if np.isscalar(value):
        v = float(value)
        return (v, v, v)
    vec = [float(x) for x in value]
    if len(vec) != 3:
        raise ValueError(f"{name} must be a scalar or a 3-vector")
    return tuple(vec)


class ModelConfig(BaseModel):
    """Interaction model: {"qubits", "model", "params", "field", "pairs"}."""

    qubits: Literal[2, 3] = 2
    model: Literal["xyz", "dm", "ksea", "general", "sum"]
    params: dict[str, Any] = Field(default_factory=dict)
    field: tuple[float, float, float] = (0.0, 0.0, 0.0)
    pairs: list[tuple[int, int]] | dict[str, "ModelTerm"] | None = None

    @model_validator(mode="after")
    def _pairs_only_for_3q(self):
        if self.pairs is not None and self.qubits != 3:
            raise ValueError("pairs are only meaningful for qubits=3")
        return self

    def _pair_matrix(self, model: str, params: dict[str, Any]) -> np.ndarray:
        """Border-free 4x4 interaction block for one model term."""
        if model == "xyz":
            j1, j2, j3 = _as_triple(params["J"], "J")
            return models.coupling_xyz(j1, j2, j3).data
        if model == "dm":
            return models.coupling_dm(_as_triple(params["D"], "D")).data
        if model == "ksea":
            return models.coupling_ksea(_as_triple(params["K"], "K")).data
        if model == "general":
            mat = np.asarray(params["matrix"], dtype=float)
            if mat.shape != (4, 4):
                raise ValueError("general model requires a 4x4 matrix")
            return mat
        if model == "sum":
            terms = params.get("terms", [])
            if not terms:
                raise ValueError("sum model requires a nonempty terms list")
            total = np.zeros((4, 4))
            for term in terms:
                term = ModelTerm.model_validate(term)
                total += self._pair_matrix(term.model, term.params)
            return total
        raise ValueError(f"unknown model {model!r}")

    def to_coupling(self) -> CouplingTensor:
        block = self._pair_matrix(self.model, self.params)
        if self.qubits == 2:
            full = block.copy()
            full[0, 1:] = self.field
            full[1:, 0] = self.field
            return models.coupling_general(full)
        interaction = block.copy()
        interaction[0, :] = 0.0
        interaction[:, 0] = 0.0
        if np.abs(block - interaction).max() > 0:
            raise ValueError("3-qubit pair couplings must not carry border entries; use the field key")
        if self.pairs is None:
            pair_map = {p: interaction for p in models.PAIRS_3Q}
        elif isinstance(self.pairs, dict):
            pair_map = {}
            for key, term in self.pairs.items():
                a, b = (int(q) for q in key.split("-"))
                pair_map[(a, b)] = self._pair_matrix(term.model, term.params)
        else:
            pair_map = {tuple(p): interaction for p in self.pairs}
        return models.coupling_3q(pair_map, field=self.field)

    def analytic_case(self) -> tuple[str, dict[str, Any]] | None:
        """Closed-form frequency case matching this config, if any."""
        if self.qubits != 2:
            return None
        b = np.asarray(self.field, dtype=float)
        if self.model == "xyz":
            j1, j2, j3 = _as_triple(self.params["J"], "J")
            if j1 == j2 == j3:
                return "xxx", {"j": j1, "field": tuple(b)}
            if not b.any():
                return "xyz_zero_field", {"j1": j1, "j2": j2, "j3": j3}
            if b[0] == 0.0 and b[1] == 0.0:
                return "xyz_z_field", {"j1": j1, "j2": j2, "j3": j3, "b": b[2]}
            return None
        if self.model == "dm":
            d = _as_triple(self.params["D"], "D")
            if not b.any():
                return "dm_zero_field", {"d": d}
            return "dm_field", {"d": d, "field": tuple(b)}
        if self.model == "ksea":
            k1, k2, k3 = _as_triple(self.params["K"], "K")
            if k1 == k2 == k3 and not b.any():
                return "ksea_uniform", {"k": k1}
            return None
        return None

    def stationary_case(self) -> tuple[str, float | None] | None:
        """Documented stationary-family case matching this config, if any."""
        if self.qubits != 2:
            return None
        b = np.asarray(self.field, dtype=float)
        z_field = b[0] == 0.0 and b[1] == 0.0 and b[2] != 0.0
        if self.model == "xyz":
            j1, j2, _ = _as_triple(self.params["J"], "J")
            if not b.any():
                return "xyz_zero_field", None
            if z_field:
                return "xyz_z_field", (j1 - j2) / b[2]
            return None
        if self.model == "dm":
            d1, d2, d3 = _as_triple(self.params["D"], "D")
            uniform = d1 == d2 == d3 and d1 != 0.0
            if not b.any() and uniform:
                return "dm_zero_field", None
            if z_field and uniform and b[2] == d1:
                return "dm_z_field", None
            return None
        if self.model == "ksea":
            k1, k2, k3 = _as_triple(self.params["K"], "K")
            uniform = k1 == k2 == k3 and k1 != 0.0
            if not b.any() and uniform:
                return "ksea_zero_field", None
            if z_field and uniform and b[2] == k1:
                return "ksea_z_field", None
            return None
        return None


class ModelTerm(BaseModel):
    """One summand of a composite interaction (no field of its own)."""

    model: Literal["xyz", "dm", "ksea", "general"]
    params: dict[str, Any]


class StateConfig(BaseModel):
    """Initial state: {"kind", "seed", "weights", "t", "tensor", "purity_target"}."""

    kind: Literal["pure_random", "mixed_random", "bell_diagonal", "basis_00", "basis_000", "explicit"]
    seed: int = 0
    weights: list[float] | None = None
    t: tuple[float, float, float] | None = None
    tensor: Any = None
    purity_target: float | None = None

    def to_tensor(self, n_qubits: int) -> CorrelationTensor:
        if self.kind == "pure_random":
            return states.random_pure(self.seed, n_qubits)
        if self.kind == "mixed_random":
            weights = self.weights if self.weights is not None else list(states.DEFAULT_MIXTURE_WEIGHTS)
            seed = self.seed
            if self.purity_target is not None:
                seed = states.find_seed_for_purity(self.purity_target, n_qubits, weights)
            return states.random_mixture(seed, n_qubits, weights)
        if self.kind == "bell_diagonal":
            if n_qubits != 2:
                raise ValueError("bell_diagonal states are two-qubit")
            if self.t is None:
                raise ValueError("bell_diagonal requires the diagonal entries t = [t1, t2, t3]")
            return states.bell_diagonal(*self.t)
        if self.kind == "basis_00":
            if n_qubits != 2:
                raise ValueError("basis_00 is a two-qubit state")
            return states.basis_state(2)
        if self.kind == "basis_000":
            if n_qubits != 3:
                raise ValueError("basis_000 is a three-qubit state")
            return states.basis_state(3)
        if self.kind == "explicit":
            if self.tensor is None:
                raise ValueError("explicit state requires the tensor entries")
            arr = np.asarray(self.tensor, dtype=float)
            if arr.shape != (4,) * n_qubits:
                raise ValueError(f"explicit tensor shape {arr.shape} does not match qubits={n_qubits}")
            return CorrelationTensor(arr)
        raise ValueError(f"unknown state kind {self.kind!r}")


class TimeGridConfig(BaseModel):
    t_max: float = Field(gt=0.0)
    samples: int = Field(ge=1)

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.samples)


class SweepSpec(BaseModel):
    """Dotted path into the model config and the values to scan."""

    parameter: str
    grid: list[float] = Field(min_length=1)


class FrequencyLine(BaseModel):
    omega: float
    multiplicity: int


class FrequenciesRequest(BaseModel):
    model: ModelConfig
    tol: float | None = None


class FrequenciesResponse(BaseModel):
    dimension: int
    spectrum: list[FrequencyLine]
    zero_count: int
    periodic: bool
    period: float | None
    analytic_case: str | None = None
    analytic_spectrum: list[FrequencyLine] | None = None
    analytic_zero_count: int | None = None
    max_deviation: float | None = None


class EvolveRequest(BaseModel):
    model: ModelConfig
    state: StateConfig
    time: TimeGridConfig
    bloch: bool = False


class EvolveResponse(BaseModel):
    columns: list[str]
    data: list[list[float]]


class StationaryRequest(BaseModel):
    model: ModelConfig
    positivity_samples: int = Field(default=500, ge=0)
    sample_range: float = 0.3
    seed: int = 0


class FamilyTerm(BaseModel):
    index: list[int]
    coefficient: float


class FamilyParameter(BaseModel):
    parameter: str
    terms: list[FamilyTerm]


class PositivitySummary(BaseModel):
    samples: int
    inside: int


class StationaryResponse(BaseModel):
    kernel_dimension: int
    basis: list[list[float]]
    family: list[FamilyParameter]
    documented_case: str | None = None
    delta: float | None = None
    documented_family: list[FamilyParameter] | None = None
    vertices: list[list[float]] | None = None
    positivity: PositivitySummary | None = None


class SweepRequest(BaseModel):
    model: ModelConfig
    state: StateConfig
    time: TimeGridConfig
    sweep: SweepSpec
    metric: Literal["T_AB2", "A2", "A3"] = "T_AB2"


class SweepRow(BaseModel):
    value: float
    metric_min: float
    metric_max: float


class SweepResponse(BaseModel):
    parameter: str
    metric: str
    rows: list[SweepRow]


class VerifyRequest(BaseModel):
    flip_three_body_sign: bool = False
    tol_override: float | None = None


class VerifyCheck(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    checks: list[VerifyCheck]
