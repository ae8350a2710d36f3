"""Command-line client for the corrflow service.

Subcommands build a JSON request from a config file, send it to the service
(an in-process instance by default, or a remote server via --server), and
write the response as CSV, JSON or a simple SVG line plot.  Exit codes:
0 success, 1 verification failure, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import asyncio
import hashlib
import json
import os
import sys

import httpx

from . import __version__

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f", "#bcbd22")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(value), ".17g")


def _config_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_CONFIG_ERROR)


def _apply_seed_override(config: dict):
    seed = os.environ.get("CORRFLOW_SEED")
    if seed is not None and isinstance(config.get("state"), dict):
        try:
            config["state"]["seed"] = int(seed)
        except ValueError:
            raise CliError(f"CORRFLOW_SEED must be an integer, got {seed!r}", EXIT_CONFIG_ERROR)


def _request(server: str | None, path: str, payload: dict) -> dict:
    """POST to a remote server, or to an in-process service instance."""
    if server:
        try:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                response = client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise CliError(f"cannot reach server {server}: {exc}", EXIT_NUMERIC_ERROR)
    else:
        from .service import create_app

        async def _call():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://corrflow.local", timeout=600.0
            ) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(_call())
    if response.status_code in (400, 422):
        raise CliError(f"config error: {response.json().get('detail')}", EXIT_CONFIG_ERROR)
    if response.status_code >= 500:
        detail = response.json().get("detail", response.text) if response.content else response.text
        raise CliError(f"numeric failure: {detail}", EXIT_NUMERIC_ERROR)
    return response.json()


def _header_lines(payload: dict) -> list[str]:
    return [f"corrflow {__version__}", f"config sha256={_config_hash(payload)}"]


def _write_csv(path: str, payload: dict, columns: list[str], rows, extra_comments=()):
    lines = [f"# {line}" for line in (*_header_lines(payload), *extra_comments)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float)) else str(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path: str, payload: dict, result: dict):
    doc = {
        "meta": {"tool": "corrflow", "version": __version__, "config_sha256": _config_hash(payload)},
        "result": result,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _render_svg(payload: dict, x: list[float], series: dict[str, list[float]], x_label: str) -> str:
    width, height = 720.0, 440.0
    left, right, top, bottom = 60.0, 150.0, 25.0, 45.0
    plot_w, plot_h = width - left - right, height - top - bottom
    x_min, x_max = min(x), max(x)
    all_y = [v for ys in series.values() for v in ys]
    y_min, y_max = min(all_y), max(all_y)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0

    def px(v):
        return left + (v - x_min) / (x_max - x_min) * plot_w

    def py(v):
        return top + (y_max - v) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}">',
        f"<!-- {'; '.join(_header_lines(payload))} -->",
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for i in range(5):
        xv = x_min + i * (x_max - x_min) / 4
        yv = y_min + i * (y_max - y_min) / 4
        parts.append(
            f'<line x1="{px(xv):.2f}" y1="{top + plot_h}" x2="{px(xv):.2f}" y2="{top + plot_h + 5}" stroke="black"/>'
            f'<text x="{px(xv):.2f}" y="{top + plot_h + 20}" font-size="11" text-anchor="middle">{xv:.4g}</text>'
        )
        parts.append(
            f'<line x1="{left - 5}" y1="{py(yv):.2f}" x2="{left}" y2="{py(yv):.2f}" stroke="black"/>'
            f'<text x="{left - 8}" y="{py(yv) + 4:.2f}" font-size="11" text-anchor="end">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.2f}" y="{height - 8}" font-size="12" text-anchor="middle">{x_label}</text>'
    )
    for i, (name, ys) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, ys))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        ly = top + 16 * (i + 1)
        parts.append(
            f'<line x1="{left + plot_w + 10}" y1="{ly}" x2="{left + plot_w + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
            f'<text x="{left + plot_w + 35}" y="{ly + 4}" font-size="11">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _resolve_output(config: dict, args) -> tuple[str | None, str]:
    output = config.get("output", {}) or {}
    path = args.out or output.get("path")
    fmt = args.format or output.get("format") or "csv"
    if fmt not in ("csv", "json", "svg"):
        raise CliError(f"unknown output format {fmt!r}", EXIT_CONFIG_ERROR)
    return path, fmt


def cmd_frequencies(args) -> int:
    config = _load_config(args.config)
    payload = {"model": config["model"]}
    if config.get("tol") is not None:
        payload["tol"] = config["tol"]
    result = _request(args.server, "/frequencies", payload)

    print(f"dimension {result['dimension']}, zero-frequency pairs {result['zero_count']}")
    print("omega            multiplicity")
    for line in result["spectrum"]:
        print(f"{line['omega']:<16.10g} {line['multiplicity']}")
    verdict = "periodic" if result["periodic"] else "non-periodic"
    period = f", period {result['period']:.10g}" if result["period"] else ""
    print(f"{verdict}{period}")
    if result.get("analytic_case"):
        print(f"analytic case: {result['analytic_case']}, max deviation {result['max_deviation']:.3e}")

    path, fmt = _resolve_output(config, args)
    if path:
        if fmt == "csv":
            rows = [("numeric", line["omega"], line["multiplicity"]) for line in result["spectrum"]]
            if result.get("analytic_spectrum"):
                rows += [("analytic", line["omega"], line["multiplicity"]) for line in result["analytic_spectrum"]]
            comments = [
                f"zero_count={result['zero_count']}",
                f"periodic={result['periodic']}",
                f"period={_fmt(result['period']) if result['period'] else ''}",
            ]
            if result.get("max_deviation") is not None:
                comments.append(f"max_deviation={_fmt(result['max_deviation'])}")
            _write_csv(path, payload, ["source", "omega", "multiplicity"], rows, comments)
        elif fmt == "json":
            _write_json(path, payload, result)
        else:
            raise CliError("frequencies output supports csv or json", EXIT_CONFIG_ERROR)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_evolve(args) -> int:
    config = _load_config(args.config)
    _apply_seed_override(config)
    payload = {
        "model": config["model"],
        "state": config["state"],
        "time": config["time"],
        "bloch": bool(args.bloch or config.get("bloch", False)),
    }
    result = _request(args.server, "/evolve", payload)
    columns, data = result["columns"], result["data"]
    print(f"evolved {len(data)} samples; columns: {', '.join(columns)}")

    path, fmt = _resolve_output(config, args)
    if path:
        if fmt == "csv":
            _write_csv(path, payload, columns, data)
        elif fmt == "json":
            _write_json(path, payload, result)
        else:
            x = [row[0] for row in data]
            series = {name: [row[i] for row in data] for i, name in enumerate(columns) if i > 0}
            with open(path, "w") as fh:
                fh.write(_render_svg(payload, x, series, "t"))
        print(f"wrote {path}")
    return EXIT_OK


def cmd_stationary(args) -> int:
    config = _load_config(args.config)
    payload = {"model": config["model"]}
    for key in ("positivity_samples", "sample_range", "seed"):
        if config.get(key) is not None:
            payload[key] = config[key]
    result = _request(args.server, "/stationary", payload)

    print(f"kernel dimension {result['kernel_dimension']}")
    print(f"free parameters: {len(result['family'])}")
    if result.get("documented_case"):
        print(f"documented case: {result['documented_case']}")
    if result.get("vertices"):
        print("tetrahedron vertices:")
        for v in result["vertices"]:
            print("  (" + ", ".join(f"{c:.6g}" for c in v) + ")")
    if result.get("positivity"):
        pos = result["positivity"]
        print(f"positivity sampling: {pos['inside']}/{pos['samples']} inside")

    path, fmt = _resolve_output(config, args)
    if path:
        if fmt == "json" or fmt == "svg":
            if fmt == "svg":
                raise CliError("stationary output supports csv or json", EXIT_CONFIG_ERROR)
            _write_json(path, payload, result)
        else:
            columns = [f"c{i}" for i in range(len(result["basis"][0]))]
            comments = [f"kernel_dimension={result['kernel_dimension']}"]
            if result.get("documented_case"):
                comments.append(f"documented_case={result['documented_case']}")
            if result.get("vertices"):
                for i, v in enumerate(result["vertices"]):
                    comments.append(f"vertex{i}=" + ";".join(_fmt(c) for c in v))
            _write_csv(path, payload, columns, result["basis"], comments)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    _apply_seed_override(config)
    payload = {
        "model": config["model"],
        "state": config["state"],
        "time": config["time"],
        "sweep": config["sweep"],
        "metric": config.get("metric", "T_AB2"),
    }
    result = _request(args.server, "/sweep", payload)
    rows = result["rows"]
    print(f"swept {result['parameter']} over {len(rows)} values; metric {result['metric']}")

    path, fmt = _resolve_output(config, args)
    if path:
        metric = result["metric"]
        columns = ["param", f"min_{metric}", f"max_{metric}"]
        table = [(r["value"], r["metric_min"], r["metric_max"]) for r in rows]
        if fmt == "csv":
            _write_csv(path, payload, columns, table)
        elif fmt == "json":
            _write_json(path, payload, result)
        else:
            x = [r["value"] for r in rows]
            series = {
                f"min {metric}": [r["metric_min"] for r in rows],
                f"max {metric}": [r["metric_max"] for r in rows],
            }
            with open(path, "w") as fh:
                fh.write(_render_svg(payload, x, series, result["parameter"]))
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    payload = {"flip_three_body_sign": bool(args.flip_eee_sign)}
    if args.tol is not None:
        payload["tol_override"] = args.tol
    result = _request(args.server, "/verify", payload)
    for check in result["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}: {check['detail']}")
    if result["passed"]:
        print("all checks passed")
        return EXIT_OK
    print("verification FAILED")
    return EXIT_VERIFY_FAILED


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrflow", description=__doc__)
    parser.add_argument("--version", action="version", version=f"corrflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output file path (overrides config)")
        p.add_argument("--format", choices=("csv", "json", "svg"), help="output format")
        p.add_argument("--server", help="base URL of a running service (default: in-process)")

    p = sub.add_parser("frequencies", help="characteristic frequency spectrum")
    common(p)
    p.set_defaults(func=cmd_frequencies)

    p = sub.add_parser("evolve", help="propagate a state and tabulate reduced coordinates")
    common(p)
    p.add_argument("--bloch", action="store_true", help="include per-qubit Bloch columns")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("stationary", help="kernel basis, stationary family, tetrahedron")
    common(p)
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("sweep", help="min/max of a metric over a parameter grid")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the oracle-equivalence and documented-value suite")
    p.add_argument("--server", help="base URL of a running service (default: in-process)")
    p.add_argument("--flip-eee-sign", action="store_true", help="debug: inject the wrong 3-body generator sign")
    p.add_argument("--tol", type=float, help="debug: override every check tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
