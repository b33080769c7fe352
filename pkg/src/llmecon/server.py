"""Stateless HTTP facade over scenario evaluation, sweeps and simulation.

All endpoints are pure functions of their request bodies: evaluation
responses embed a hash of the resolved scenario so clients can correlate
and discard stale responses.  Numbers are serialized at full precision; the
UI does no arithmetic of its own, so this process is the single numerical
source of truth.

Judge-dependent operations (QA generation, scoring) are deliberately not
exposed over HTTP; they stay CLI-only so credentials never reach the server
surface.

Status mapping: 400 malformed/invalid request (with field-level messages),
404 unknown catalog, 413 oversized sweep grid, 422 mathematical domain
errors such as r=1 with s=0.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .econ import EconomicsParams, sweep as econ_sweep
from .errors import ConfigError, DomainError
from .pricing import PipelineKind, per_request_cost
from .scenario import (
    SCHEMA_VERSION,
    amortization_report,
    bundled_catalog_dir,
    bundled_dataset_dir,
    evaluate_scenario,
    parse_catalog,
    parse_dataset,
    scenario_from_dict,
)
from .simulate import simulate as run_simulation

MAX_SWEEP_POINTS = 4096
MAX_TRIALS = 1_000_000

_FIELD_PATH_RE = re.compile(r"^[a-z_]+(\[\d+\])?(\.[a-z_]+(\[\d+\])?)*$")


def _error_body(field: Optional[str], message: str) -> dict:
    error: dict = {"message": message}
    if field:
        error["field"] = field
    return {"errors": [error]}


def _config_error_response(exc: ConfigError) -> JSONResponse:
    # Parser messages look like "<field path>: problem"; surface the path.
    message = str(exc)
    field = None
    head, sep, rest = message.partition(":")
    if sep and _FIELD_PATH_RE.match(head.strip()):
        field = head.strip()
        message = rest.strip()
    return JSONResponse(status_code=400, content=_error_body(field, message))


def _listing(directory: Path, parser) -> list[dict]:
    """Group documents by base name; 'name.variant.json' files become
    variants of one entry, plain 'name.json' files get a 'default' variant."""
    entries: dict[str, dict] = {}
    for path in sorted(directory.glob("*.json")):
        document = json.loads(path.read_text(encoding="utf-8"))
        parser(document)  # validate; raises ConfigError on a bad file
        stem = path.name[: -len(".json")]
        name, _, variant = stem.partition(".")
        entry = entries.setdefault(name, {"name": name, "variants": {}})
        entry["variants"][variant or "default"] = document
    return list(entries.values())


def create_app(
    catalog_dir: Optional[Path] = None,
    dataset_dir: Optional[Path] = None,
    ui_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="llmecon", version=__version__, docs_url="/api/docs")
    catalogs_path = Path(catalog_dir) if catalog_dir else bundled_catalog_dir()
    datasets_path = Path(dataset_dir) if dataset_dir else bundled_dataset_dir()

    @app.exception_handler(ConfigError)
    async def config_error_handler(request: Request, exc: ConfigError):
        return _config_error_response(exc)

    @app.exception_handler(DomainError)
    async def domain_error_handler(request: Request, exc: DomainError):
        return JSONResponse(status_code=422, content=_error_body(None, str(exc)))

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise ConfigError(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise ConfigError("request body must be a JSON object")
        return body

    @app.post("/api/v1/evaluate")
    async def evaluate(request: Request):
        scenario = scenario_from_dict(await _json_body(request))
        report = evaluate_scenario(scenario, require_economics=True)
        return report.as_dict()

    @app.post("/api/v1/cost")
    async def cost_endpoint(request: Request):
        body = await _json_body(request)
        if "scenario" not in body:
            raise ConfigError("scenario: required")
        scenario = scenario_from_dict(body["scenario"])
        grid = body.get("requests", [scenario.workload.num_rl])
        if not isinstance(grid, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in grid
        ):
            raise ConfigError("requests: expected a list of integers")
        if len(grid) > MAX_SWEEP_POINTS:
            return JSONResponse(
                status_code=413,
                content=_error_body("requests", f"grid exceeds the {MAX_SWEEP_POINTS}-point cap"),
            )
        return amortization_report(scenario, grid)

    @app.post("/api/v1/sweep")
    async def sweep_endpoint(request: Request):
        body = await _json_body(request)
        axis = body.get("axis")
        grid = body.get("grid")
        if not isinstance(axis, str):
            raise ConfigError("sweep.axis: required string field")
        if not isinstance(grid, list) or not all(isinstance(x, (int, float)) for x in grid):
            raise ConfigError("sweep.grid: required list of numbers")
        if len(grid) > MAX_SWEEP_POINTS:
            return JSONResponse(
                status_code=413,
                content=_error_body("sweep.grid", f"grid exceeds the {MAX_SWEEP_POINTS}-point cap"),
            )
        base, scenario_payload = _resolve_economics(body)
        rows = econ_sweep(base, axis, [float(x) for x in grid])
        return {
            "tool": "llmecon",
            "tool_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "axis": axis,
            "base": {"g": base.g, "v": base.v, "h": base.h, "r": base.r, "s": base.s},
            "rows": [
                {"value": row.value, "cop_ex": row.result.cop_ex,
                 "denominator": row.result.denominator, "beats_human": row.result.beats_human}
                for row in rows
            ],
            **scenario_payload,
        }

    @app.post("/api/v1/simulate")
    async def simulate_endpoint(request: Request):
        body = await _json_body(request)
        trials = body.get("trials", 100000)
        seed = body.get("seed", 0)
        if not isinstance(trials, int) or isinstance(trials, bool):
            raise ConfigError("simulate.trials: expected an integer")
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError("simulate.seed: expected an integer")
        truncated = trials > MAX_TRIALS
        base, scenario_payload = _resolve_economics(body)
        report = run_simulation(base, trials=min(trials, MAX_TRIALS), seed=seed)
        return {
            "tool": "llmecon",
            "tool_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "economics": {"g": base.g, "v": base.v, "h": base.h, "r": base.r, "s": base.s},
            "report": report.as_dict(),
            "truncated": truncated,
            "max_trials": MAX_TRIALS,
            **scenario_payload,
        }

    def _resolve_economics(body: dict) -> tuple[EconomicsParams, dict]:
        """Economics either inline (with explicit g) or derived from a
        scenario's priced pipeline."""
        if "scenario" in body:
            scenario = scenario_from_dict(body["scenario"])
            pipelines = scenario.pipelines
            if "pipeline" in body:
                try:
                    wanted = PipelineKind(body["pipeline"])
                except ValueError:
                    raise ConfigError(f"pipeline: unknown kind {body['pipeline']!r}") from None
                pipelines = [p for p in scenario.pipelines if p.kind == wanted]
                if not pipelines:
                    raise ConfigError(f"pipeline: scenario has no pipeline of kind {body['pipeline']!r}")
            econ = scenario.economics
            if econ.r is None or econ.s is None:
                missing = "r" if econ.r is None else "s"
                raise ConfigError(f"economics.{missing}: required")
            breakdown = per_request_cost(pipelines[0], scenario.catalog, scenario.dataset, scenario.workload)
            params = EconomicsParams(g=breakdown.total, v=econ.v, h=econ.h, r=econ.r, s=econ.s)
            return params, {"scenario_name": scenario.name, "scenario_hash": scenario.hash}
        if "economics" in body:
            economics = body["economics"]
            if not isinstance(economics, dict):
                raise ConfigError("economics: expected an object")
            for key in ("g", "v", "h", "r", "s"):
                if key not in economics:
                    raise ConfigError(f"economics.{key}: required")
                value = economics[key]
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"economics.{key}: expected a number, got {value!r}")
            if not 0.0 <= economics["r"] <= 1.0:
                raise ConfigError(f"economics.r: out of range [0, 1], got {economics['r']!r}")
            if not 0.0 <= economics["s"] <= 1.0:
                raise ConfigError(f"economics.s: out of range [0, 1], got {economics['s']!r}")
            params = EconomicsParams(
                g=economics["g"], v=economics["v"], h=economics["h"],
                r=economics["r"], s=economics["s"],
            )
            return params, {}
        raise ConfigError("scenario: required (or pass inline 'economics' with g, v, h, r, s)")

    @app.get("/api/v1/catalogs")
    async def catalogs():
        return {"catalogs": _listing(catalogs_path, parse_catalog)}

    @app.get("/api/v1/catalogs/{name}")
    async def catalog_by_name(name: str):
        for entry in _listing(catalogs_path, parse_catalog):
            if entry["name"] == name:
                return entry
        return JSONResponse(status_code=404, content=_error_body(None, f"unknown catalog: {name!r}"))

    @app.get("/api/v1/datasets")
    async def datasets():
        return {"datasets": _listing(datasets_path, parse_dataset)}

    @app.get("/api/v1/version")
    async def version():
        return {"tool": "llmecon", "version": __version__, "schema": SCHEMA_VERSION}

    if ui_dir is None:
        default_ui = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        if default_ui.is_dir():
            ui_dir = default_ui
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
