import json
import math

import numpy as np
import pytest

from corrflow.cli import main

XYZ_FLIP = {"qubits": 2, "model": "xyz", "params": {"J": [1, -1, 0]}, "field": [0, 0, 0]}


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_frequencies_csv_output(tmp_path, capsys):
    config = write_config(tmp_path, "freq.json", {"model": {"qubits": 2, "model": "xyz", "params": {"J": 1.0}, "field": [0, 0, 1]}})
    out = tmp_path / "freq.csv"
    assert main(["frequencies", "--config", config, "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# corrflow")
    assert "config sha256=" in text
    assert "# zero_count=2" in text
    assert "# periodic=True" in text
    lines = [l for l in text.splitlines() if l.startswith("numeric")]
    assert len(lines) == 3
    stdout = capsys.readouterr().out
    assert "periodic" in stdout


def test_frequencies_output_bit_stable(tmp_path):
    config = write_config(tmp_path, "freq.json", {"model": XYZ_FLIP})
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["frequencies", "--config", config, "--out", str(out1)]) == 0
    assert main(["frequencies", "--config", config, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_evolve_csv_and_svg(tmp_path):
    config = write_config(
        tmp_path,
        "evolve.json",
        {
            "model": XYZ_FLIP,
            "state": {"kind": "basis_00"},
            "time": {"t_max": math.pi, "samples": 801},
        },
    )
    out = tmp_path / "evolve.csv"
    assert main(["evolve", "--config", config, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "t,T_A,T_B,T_AB,purity"
    data = np.array([[float(v) for v in l.split(",")] for l in lines if not l.startswith("#") and not l.startswith("t,")])
    assert abs((data[:, 3] ** 2).max() - 3.0) < 1e-5

    svg = tmp_path / "evolve.svg"
    assert main(["evolve", "--config", config, "--out", str(svg), "--format", "svg"]) == 0
    body = svg.read_text()
    assert body.startswith("<svg") and "polyline" in body and "config sha256=" in body


def test_evolve_bloch_flag_adds_columns(tmp_path):
    config = write_config(
        tmp_path,
        "evolve.json",
        {"model": XYZ_FLIP, "state": {"kind": "basis_00"}, "time": {"t_max": 1.0, "samples": 5}},
    )
    out = tmp_path / "bloch.csv"
    assert main(["evolve", "--config", config, "--out", str(out), "--bloch"]) == 0
    header = next(l for l in out.read_text().splitlines() if not l.startswith("#"))
    assert header == "t,T_A,T_B,T_AB,purity,ax,ay,az,bx,by,bz"


def test_evolve_deterministic_and_seed_override(tmp_path, monkeypatch):
    config = write_config(
        tmp_path,
        "evolve.json",
        {
            "model": XYZ_FLIP,
            "state": {"kind": "mixed_random", "seed": 7},
            "time": {"t_max": 2.0, "samples": 50},
        },
    )
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["evolve", "--config", config, "--out", str(a)]) == 0
    assert main(["evolve", "--config", config, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("CORRFLOW_SEED", "8")
    assert main(["evolve", "--config", config, "--out", str(c)]) == 0
    assert a.read_text().splitlines()[3:] != c.read_text().splitlines()[3:]


def test_stationary_json_output(tmp_path):
    config = write_config(
        tmp_path, "stat.json", {"model": {"qubits": 2, "model": "xyz", "params": {"J": [1.3, -0.7, 0.4]}}}
    )
    out = tmp_path / "stat.json.out"
    assert main(["stationary", "--config", config, "--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["tool"] == "corrflow"
    assert doc["result"]["kernel_dimension"] == 4
    assert doc["result"]["documented_case"] == "xyz_zero_field"


def test_sweep_csv(tmp_path):
    config = write_config(
        tmp_path,
        "sweep.json",
        {
            "model": XYZ_FLIP,
            "state": {"kind": "basis_00"},
            "time": {"t_max": 4 * math.pi, "samples": 2001},
            "sweep": {"parameter": "field.2", "grid": [0.0, 2.0]},
            "metric": "T_AB2",
        },
    )
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", config, "--out", str(out)]) == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "param,min_T_AB2,max_T_AB2"
    rows = [list(map(float, l.split(","))) for l in lines[1:]]
    assert abs(rows[0][2] - 3.0) < 1e-2
    assert abs(rows[1][2] - 2.28) < 1e-2


def test_verify_pass_and_fault_injection(capsys):
    assert main(["verify"]) == 0
    stdout = capsys.readouterr().out
    assert "all checks passed" in stdout
    assert main(["verify", "--flip-eee-sign"]) == 1
    stdout = capsys.readouterr().out
    assert "FAIL three_body_sign_probe" in stdout
    assert "3-qubit" in stdout
    assert main(["verify", "--tol", "0"]) == 1


def test_missing_config_exits_2(capsys):
    assert main(["frequencies", "--config", "/nonexistent.json"]) == 2


def test_invalid_model_exits_2(tmp_path):
    config = write_config(tmp_path, "bad.json", {"model": {"qubits": 2, "model": "xyz", "params": {}}})
    assert main(["frequencies", "--config", config]) == 2


def test_unknown_format_exits_2(tmp_path):
    config = write_config(tmp_path, "freq.json", {"model": XYZ_FLIP, "output": {"path": "x", "format": "pdf"}})
    assert main(["frequencies", "--config", config]) == 2
