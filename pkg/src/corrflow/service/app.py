"""FastAPI service exposing the toolkit over HTTP.

All endpoints are stateless POSTs; computations are pure functions of the
request body, so responses are deterministic and cache-friendly.  Config
errors surface as 422, numerical failures as 500.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, dynamics, stationary, verify
from ..dynamics import Propagator
from ..states import purity
from . import schemas


def _apply_path(config: dict, path: str, value: float) -> dict:
    """Set a dotted-path entry (dict keys / list indices) in a config dict."""
    parts = path.split(".")
    node = config
    for part in parts[:-1]:
        node = node[int(part)] if isinstance(node, list) else node[part]
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value
    return config


def _family_terms(family: stationary.StationaryFamily) -> list[schemas.FamilyParameter]:
    """Serialize directions as operator-space coefficients per parameter."""
    out = []
    shape = (4,) * family.n_qubits
    for name, direction in zip(family.parameter_names, family.directions):
        coeffs = direction / 2**family.n_qubits
        terms = [
            schemas.FamilyTerm(index=list(np.unravel_index(i, shape)), coefficient=float(coeffs[i]))
            for i in np.flatnonzero(np.abs(coeffs) > 1e-12)
        ]
        out.append(schemas.FamilyParameter(parameter=name, terms=terms))
    return out


def _sweep_point(request: schemas.SweepRequest, value: float) -> tuple[float, float]:
    model_dict = request.model.model_dump(mode="json")
    _apply_path(model_dict, request.sweep.parameter, value)
    model = schemas.ModelConfig.model_validate(model_dict)
    coupling = model.to_coupling()
    tensor = request.state.to_tensor(model.qubits)
    prop = Propagator(dynamics.generator(coupling))
    flat = prop.propagate_array(tensor.ravel(), request.time.grid())
    if request.metric == "T_AB2":
        if model.qubits != 2:
            raise ValueError("metric T_AB2 requires qubits=2")
        series = dynamics.correlation_vectors_2q(flat)[:, 2] ** 2
    else:
        if model.qubits != 3:
            raise ValueError(f"metric {request.metric} requires qubits=3")
        col = {"A2": 1, "A3": 2}[request.metric]
        series = dynamics.sector_lengths_arrays_3q(flat)[:, col]
    return float(series.min()), float(series.max())


def create_app() -> FastAPI:
    app = FastAPI(title="corrflow", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/frequencies", response_model=schemas.FrequenciesResponse)
    def post_frequencies(request: schemas.FrequenciesRequest) -> schemas.FrequenciesResponse:
        try:
            coupling = request.model.to_coupling()
            gen = dynamics.generator(coupling)
            tol = request.tol if request.tol is not None else dynamics.DEFAULT_TOL
            spectrum = dynamics.frequencies(gen, tol)
            periodic, period = dynamics.is_periodic(spectrum)
            response = schemas.FrequenciesResponse(
                dimension=spectrum.dim,
                spectrum=[schemas.FrequencyLine(omega=w, multiplicity=m) for w, m in spectrum.frequencies],
                zero_count=spectrum.zero_count,
                periodic=periodic,
                period=period,
            )
            case = request.model.analytic_case()
            if case is not None:
                name, params = case
                closed = dynamics.analytic_frequencies(name, params, tol)
                response.analytic_case = name
                response.analytic_spectrum = [
                    schemas.FrequencyLine(omega=w, multiplicity=m) for w, m in closed.frequencies
                ]
                response.analytic_zero_count = closed.zero_count
                response.max_deviation = float(np.abs(spectrum.expanded() - closed.expanded()).max())
            return response
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except np.linalg.LinAlgError as exc:
            raise HTTPException(status_code=500, detail=f"numeric failure: {exc}")

    @app.post("/evolve", response_model=schemas.EvolveResponse)
    def post_evolve(request: schemas.EvolveRequest) -> schemas.EvolveResponse:
        try:
            model = request.model
            coupling = model.to_coupling()
            tensor = request.state.to_tensor(model.qubits)
            prop = Propagator(dynamics.generator(coupling))
            times = request.time.grid()
            flat = prop.propagate_array(tensor.ravel(), times)
            purities = (flat**2).sum(axis=1) / 2**model.qubits
            if model.qubits == 2:
                columns = ["t", "T_A", "T_B", "T_AB", "purity"]
                blocks = [times[:, None], dynamics.correlation_vectors_2q(flat), purities[:, None]]
                if request.bloch:
                    grid = flat.reshape(-1, 4, 4)
                    columns += ["ax", "ay", "az", "bx", "by", "bz"]
                    blocks += [grid[:, 1:, 0], grid[:, 0, 1:]]
            else:
                columns = ["t", "A1", "A2", "A3", "purity"]
                blocks = [times[:, None], dynamics.sector_lengths_arrays_3q(flat), purities[:, None]]
                if request.bloch:
                    grid = flat.reshape(-1, 4, 4, 4)
                    columns += [f"q{q}{ax}" for q in (1, 2, 3) for ax in "xyz"]
                    blocks += [grid[:, 1:, 0, 0], grid[:, 0, 1:, 0], grid[:, 0, 0, 1:]]
            data = np.concatenate(blocks, axis=1)
            return schemas.EvolveResponse(columns=columns, data=data.tolist())
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except np.linalg.LinAlgError as exc:
            raise HTTPException(status_code=500, detail=f"numeric failure: {exc}")

    @app.post("/stationary", response_model=schemas.StationaryResponse)
    def post_stationary(request: schemas.StationaryRequest) -> schemas.StationaryResponse:
        try:
            model = request.model
            if model.qubits != 2:
                raise ValueError("stationary analysis is implemented for 2-qubit models")
            coupling = model.to_coupling()
            gen = dynamics.generator(coupling)
            basis = stationary.nullspace(gen)
            family = stationary.family_from_nullspace(basis)
            response = schemas.StationaryResponse(
                kernel_dimension=basis.dim,
                basis=basis.vectors.tolist(),
                family=_family_terms(family),
            )
            case = model.stationary_case()
            documented = None
            if case is not None:
                name, delta = case
                documented = stationary.documented_family(name, delta)
                response.documented_case = name
                response.delta = delta
                response.documented_family = _family_terms(documented)
                if name in stationary.POLYNOMIAL_CASES:
                    response.vertices = [list(v) for v in stationary.tetrahedron_vertices(name, delta)]
            if request.positivity_samples:
                sample_family = documented if documented is not None else family
                rng = np.random.default_rng(request.seed)
                inside = 0
                for _ in range(request.positivity_samples):
                    params = rng.uniform(-request.sample_range, request.sample_range, sample_family.n_parameters)
                    if stationary.gamel_check(sample_family.member(params)).satisfied:
                        inside += 1
                response.positivity = schemas.PositivitySummary(samples=request.positivity_samples, inside=inside)
            return response
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except np.linalg.LinAlgError as exc:
            raise HTTPException(status_code=500, detail=f"numeric failure: {exc}")

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def post_sweep(request: schemas.SweepRequest) -> schemas.SweepResponse:
        try:
            grid = request.sweep.grid
            with ThreadPoolExecutor(max_workers=min(8, len(grid))) as pool:
                extremes = list(pool.map(lambda v: _sweep_point(request, v), grid))
            rows = [
                schemas.SweepRow(value=v, metric_min=lo, metric_max=hi)
                for v, (lo, hi) in zip(grid, extremes)
            ]
            return schemas.SweepResponse(parameter=request.sweep.parameter, metric=request.metric, rows=rows)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except np.linalg.LinAlgError as exc:
            raise HTTPException(status_code=500, detail=f"numeric failure: {exc}")

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def post_verify(request: schemas.VerifyRequest) -> schemas.VerifyResponse:
        sign = +1.0 if request.flip_three_body_sign else -1.0
        checks = verify.run_verification(three_body_sign=sign, tol_override=request.tol_override)
        return schemas.VerifyResponse(
            passed=all(c.passed for c in checks),
            checks=[schemas.VerifyCheck(name=c.name, passed=c.passed, detail=c.detail) for c in checks],
        )

    return app
