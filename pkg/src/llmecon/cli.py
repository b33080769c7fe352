"""Command-line interface.

Subcommands bind the library modules one-to-one: cost and cop evaluate
scenario documents, sweep and breakeven explore the economics, simulate runs
the Monte Carlo oracle, stats compares outcome tables, profile / qa-gen /
judge run the corpus operations, and serve starts the HTTP API.

Every report is deterministic for fixed inputs (and seed), and JSON output
embeds the fully resolved scenario plus the tool version so a report can be
re-executed from itself.

Exit codes: 2 configuration/validation error, 3 mathematical domain error,
4 judge transport failure.  Errors print one machine-parsable JSON line on
stderr.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path

import click

from . import __version__
from .corpus import (
    generate_qa_corpus,
    load_chunks,
    profile_corpus,
    qa_pairs_from_dict,
    qa_pairs_to_dict,
    score_outcomes,
)
from .econ import EconomicsParams, sweep as econ_sweep
from .errors import ConfigError, DomainError, TransportError
from .judge import MockJudge, RemoteJudge
from .scenario import (
    SCHEMA_VERSION,
    Scenario,
    amortization_report,
    evaluate_scenario,
    load_scenario,
)
from .simulate import simulate as run_simulation
from .stats import OutcomeTable, format_p_display, pairwise_matrix

EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_TRANSPORT = 4


def _fail(kind: str, message: str, code: int) -> None:
    click.echo(json.dumps({"error": {"kind": kind, "message": message}}, sort_keys=True), err=True)
    sys.exit(code)


def handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            _fail("config", str(exc), EXIT_CONFIG)
        except DomainError as exc:
            _fail("domain", str(exc), EXIT_DOMAIN)
        except TransportError as exc:
            _fail("transport", str(exc), EXIT_TRANSPORT)
        except OSError as exc:
            _fail("config", str(exc), EXIT_CONFIG)

    return wrapper


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _to_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def _csv_rows(header: list[str], rows: list[list]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _money(x: float) -> str:
    return f"{x:.6g}"


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(cell)) for cell in column) for column in zip(header, *rows)] if rows else [
        len(h) for h in header
    ]
    lines = ["  ".join(str(cell).ljust(width) for cell, width in zip(row, widths)).rstrip()
             for row in [header] + rows]
    return "\n".join(lines)


def _load_scenario_arg(path: str) -> Scenario:
    return load_scenario(Path(path))


def _parse_grid(raw: str, kind=float) -> list:
    try:
        return [kind(float(part.strip())) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"malformed grid: {raw!r}") from None


def _make_judge(name: str, transcript: Path | None):
    if name == "mock":
        return MockJudge()
    if name == "remote":
        return RemoteJudge(transcript_path=transcript)
    raise ConfigError(f"unknown judge: {name!r}")


def _apply_economics_overrides(scenario: Scenario, rerun, success) -> Scenario:
    if rerun is None and success is None:
        return scenario
    if rerun is not None:
        scenario.resolved["economics"]["r"] = rerun
    if success is not None:
        scenario.resolved["economics"]["s"] = success
    from .scenario import scenario_from_dict  # re-parse with the overrides applied

    return scenario_from_dict(scenario.resolved)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="llmecon")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Tool configuration file (JSON); may set format, seed, catalog_dir defaults.")
@click.option("--format", "fmt", type=click.Choice(["table", "json", "csv"]), default=None,
              help="Report format [default: table].")
@click.option("--output", type=click.Path(), default=None, help="Write the report to a file.")
@click.option("--seed", type=int, default=None, help="Default RNG seed for stochastic commands.")
@click.pass_context
def main(ctx, config_path, fmt, output, seed):
    """Expected-cost analysis for LLM-assisted question answering."""
    config = {}
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            _fail("config", f"cannot read config {config_path}: {exc}", EXIT_CONFIG)
    ctx.obj = {
        "config": config,
        "format": fmt or config.get("format", "table"),
        "output": Path(output) if output else None,
        "seed": seed if seed is not None else config.get("seed"),
    }


# ---------------------------------------------------------------------------
# cost / cop / sweep / breakeven


@main.command()
@click.argument("scenario_file", type=click.Path())
@click.option("--requests", "requests_grid", default=None,
              help="Comma-separated request volumes, e.g. 1e3,1e4,1e5.")
@click.pass_obj
@handle_errors
def cost(obj, scenario_file, requests_grid):
    """Per-request cost breakdown over a request-volume grid."""
    scenario = _load_scenario_arg(scenario_file)
    grid = _parse_grid(requests_grid, int) if requests_grid else [scenario.workload.num_rl]
    report = amortization_report(scenario, grid)
    if obj["format"] == "json":
        _emit(_to_json(report), obj["output"])
        return
    header = ["pipeline", "num_rl", "embedding", "retrieval", "training", "hosting", "input", "output", "total"]
    rows = []
    for series in report["series"]:
        for row in series["rows"]:
            rows.append([series["kind"], row["num_rl"]] + [
                row[key] for key in ("embedding", "retrieval", "training", "hosting", "input", "output", "total")
            ])
    if obj["format"] == "csv":
        _emit(_csv_rows(header, [[r[0], r[1]] + [repr(x) for x in r[2:]] for r in rows]), obj["output"])
    else:
        _emit(_table(header, [[r[0], str(r[1])] + [_money(x) for x in r[2:]] for r in rows]), obj["output"])


@main.command()
@click.argument("scenario_file", type=click.Path())
@click.option("--r", "rerun", type=float, default=None,
              help="Rerun willingness in [0,1]; required unless the scenario sets it.")
@click.option("--s", "success", type=float, default=None,
              help="Success rate in [0,1]; overrides the scenario.")
@click.pass_obj
@handle_errors
def cop(obj, scenario_file, rerun, success):
    """Extended cost-of-pass per pipeline (needs r and s)."""
    scenario = _apply_economics_overrides(_load_scenario_arg(scenario_file), rerun, success)
    if scenario.economics.r is None:
        raise ConfigError("economics.r: required for cost-of-pass evaluation (no default; pass --r)")
    report = evaluate_scenario(scenario, require_economics=True)
    if obj["format"] == "json":
        _emit(_to_json(report.as_dict()), obj["output"])
        return
    header = ["pipeline", "g", "v", "h", "r", "s", "cop_ex", "denominator", "beats_human", "break_even"]
    rows = []
    for evaluation in report.pipelines:
        econ = evaluation.economics
        rows.append([
            evaluation.kind.value, econ.g, econ.v, econ.h, econ.r, econ.s,
            evaluation.cop.cop_ex, evaluation.cop.denominator, evaluation.cop.beats_human,
            evaluation.break_even if evaluation.break_even is not None else "never",
        ])
    if obj["format"] == "csv":
        _emit(_csv_rows(header, [[r[0]] + [x if isinstance(x, str) else repr(x) for x in r[1:]] for r in rows]),
              obj["output"])
    else:
        _emit(_table(header, [[r[0]] + [x if isinstance(x, str) else (_money(x) if isinstance(x, float) else str(x))
                                        for x in r[1:]] for r in rows]), obj["output"])


@main.command()
@click.argument("scenario_file", type=click.Path())
@click.option("--axis", required=True, type=click.Choice(["g", "v", "h", "r", "s"]))
@click.option("--grid", "grid_raw", required=True, help="Comma-separated axis values.")
@click.option("--pipeline", "pipeline_kind", default=None,
              help="Pipeline kind supplying g (default: first in the scenario).")
@click.option("--r", "rerun", type=float, default=None, help="Overrides the scenario's r.")
@click.option("--s", "success", type=float, default=None, help="Overrides the scenario's s.")
@click.pass_obj
@handle_errors
def sweep(obj, scenario_file, axis, grid_raw, pipeline_kind, rerun, success):
    """Extended cost-of-pass along one economics axis."""
    scenario = _apply_economics_overrides(_load_scenario_arg(scenario_file), rerun, success)
    base = _base_params(scenario, pipeline_kind)
    rows = econ_sweep(base, axis, _parse_grid(grid_raw))
    payload = {
        "tool": "llmecon",
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "scenario_name": scenario.name,
        "scenario_hash": scenario.hash,
        "axis": axis,
        "base": {"g": base.g, "v": base.v, "h": base.h, "r": base.r, "s": base.s},
        "rows": [
            {"value": row.value, "cop_ex": row.result.cop_ex,
             "denominator": row.result.denominator, "beats_human": row.result.beats_human}
            for row in rows
        ],
        "scenario": scenario.resolved,
    }
    if obj["format"] == "json":
        _emit(_to_json(payload), obj["output"])
    elif obj["format"] == "csv":
        _emit(_csv_rows([axis, "cop_ex", "denominator", "beats_human"],
                        [[repr(r["value"]), repr(r["cop_ex"]), repr(r["denominator"]), r["beats_human"]]
                         for r in payload["rows"]]), obj["output"])
    else:
        _emit(_table([axis, "cop_ex", "denominator", "beats_human"],
                     [[_money(r["value"]), _money(r["cop_ex"]), _money(r["denominator"]), str(r["beats_human"])]
                      for r in payload["rows"]]), obj["output"])


def _base_params(scenario: Scenario, pipeline_kind: str | None) -> EconomicsParams:
    from .pricing import PipelineKind, per_request_cost

    pipelines = scenario.pipelines
    if pipeline_kind is not None:
        try:
            wanted = PipelineKind(pipeline_kind)
        except ValueError:
            raise ConfigError(f"unknown pipeline kind: {pipeline_kind!r}") from None
        pipelines = [p for p in scenario.pipelines if p.kind == wanted]
        if not pipelines:
            raise ConfigError(f"scenario has no pipeline of kind {pipeline_kind!r}")
    breakdown = per_request_cost(pipelines[0], scenario.catalog, scenario.dataset, scenario.workload)
    econ = scenario.economics
    if econ.r is None or econ.s is None:
        missing = "r" if econ.r is None else "s"
        raise ConfigError(f"economics.{missing}: required (scenario economics must set r and s)")
    return EconomicsParams(g=breakdown.total, v=econ.v, h=econ.h, r=econ.r, s=econ.s)


@main.command()
@click.argument("scenario_file", type=click.Path())
@click.pass_obj
@handle_errors
def breakeven(obj, scenario_file):
    """Accuracy at which each pipeline's cost equals the human cost."""
    scenario = _load_scenario_arg(scenario_file)
    report = evaluate_scenario(scenario)
    rows = [[e.kind.value, e.breakdown.total,
             e.break_even if e.break_even is not None else "never beats human"]
            for e in report.pipelines]
    if obj["format"] == "json":
        _emit(_to_json(report.as_dict()), obj["output"])
    elif obj["format"] == "csv":
        _emit(_csv_rows(["pipeline", "g", "break_even_s"],
                        [[r[0], repr(r[1]), r[2] if isinstance(r[2], str) else repr(r[2])] for r in rows]),
              obj["output"])
    else:
        _emit(_table(["pipeline", "g", "break_even_s"],
                     [[r[0], _money(r[1]), r[2] if isinstance(r[2], str) else _money(r[2])] for r in rows]),
              obj["output"])


# ---------------------------------------------------------------------------
# simulate


@main.command()
@click.argument("scenario_file", type=click.Path())
@click.option("--trials", type=int, default=100000, show_default=True)
@click.option("--seed", "seed_override", type=int, default=None, help="Overrides the global --seed.")
@click.option("--pipeline", "pipeline_kind", default=None)
@click.option("--r", "rerun", type=float, default=None, help="Overrides the scenario's r.")
@click.option("--s", "success", type=float, default=None, help="Overrides the scenario's s.")
@click.pass_obj
@handle_errors
def simulate(obj, scenario_file, trials, seed_override, pipeline_kind, rerun, success):
    """Monte Carlo verification of the closed-form extended cost-of-pass."""
    scenario = _apply_economics_overrides(_load_scenario_arg(scenario_file), rerun, success)
    params = _base_params(scenario, pipeline_kind)
    seed = seed_override if seed_override is not None else (obj["seed"] if obj["seed"] is not None else 0)
    report = run_simulation(params, trials=trials, seed=seed)
    payload = {
        "tool": "llmecon",
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "scenario_name": scenario.name,
        "scenario_hash": scenario.hash,
        "economics": {"g": params.g, "v": params.v, "h": params.h, "r": params.r, "s": params.s},
        "report": report.as_dict(),
        "scenario": scenario.resolved,
    }
    if obj["format"] == "json":
        _emit(_to_json(payload), obj["output"])
    elif obj["format"] == "csv":
        _emit(_csv_rows(["trials", "mean_cost", "std_error", "fallback_rate", "seed", "rng"],
                        [[report.trials, repr(report.mean_cost), repr(report.std_error),
                          repr(report.fallback_rate), report.seed, report.rng]]), obj["output"])
    else:
        _emit(_table(["trials", "mean_cost", "std_error", "fallback_rate", "seed", "rng"],
                     [[str(report.trials), _money(report.mean_cost), _money(report.std_error),
                       _money(report.fallback_rate), str(report.seed), report.rng]]), obj["output"])


# ---------------------------------------------------------------------------
# stats


def _load_outcomes(path: Path) -> OutcomeTable:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".json"):
        return OutcomeTable.from_dict(json.loads(text))
    return OutcomeTable.from_delimited(text)


@main.command()
@click.argument("outcomes_file", type=click.Path())
@click.pass_obj
@handle_errors
def stats(obj, outcomes_file):
    """Pairwise z-tests with Holm adjustment over an outcome table."""
    table = _load_outcomes(Path(outcomes_file))
    matrix = pairwise_matrix(table)
    if obj["format"] == "json":
        payload = {
            "tool": "llmecon",
            "tool_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "matrix": matrix.to_dict(),
            "accuracies": {system: table.accuracy(system) for system in table.systems},
        }
        _emit(_to_json(payload), obj["output"])
    elif obj["format"] == "csv":
        _emit(matrix.to_csv(), obj["output"])
    else:
        header = [""] + matrix.systems
        rows = []
        for row_system in matrix.systems:
            row = [row_system]
            for col_system in matrix.systems:
                if row_system == col_system:
                    row.append("")
                elif matrix.get(row_system, col_system) is not None:
                    row.append(format_p_display(matrix.get(row_system, col_system).p_adj))
                else:
                    row.append("err")
            rows.append(row)
        _emit(_table(header, rows) + "\n(adjusted p, 3 decimals; 0.000 denotes <0.0005)",
              obj["output"])


# ---------------------------------------------------------------------------
# corpus: profile / qa-gen / judge


@main.command()
@click.argument("corpus_path", type=click.Path())
@click.option("--qa", "qa_file", type=click.Path(), default=None, help="Reference QA pairs (JSON).")
@click.pass_obj
@handle_errors
def profile(obj, corpus_path, qa_file):
    """Dataset statistics for a corpus of chunks."""
    chunks = load_chunks(Path(corpus_path))
    qa = []
    if qa_file:
        qa = qa_pairs_from_dict(json.loads(Path(qa_file).read_text(encoding="utf-8")))
    result = profile_corpus(chunks, qa)
    payload = {
        "num_c": result.num_c,
        "len_c": result.len_c,
        "len_q": result.len_q,
        "len_a": {kind.value: value for kind, value in dict(result.len_a).items()},
        "len_qa": result.len_qa,
        "len_a_ref": result.len_a_ref,
        "num_ft_qa": result.num_ft_qa,
        "oddness": result.oddness,
        "n_train": result.n_train,
        "n_test": result.n_test,
        "tokenizer": result.tokenizer,
    }
    _emit(_to_json(payload), obj["output"])


@main.command("qa-gen")
@click.argument("corpus_path", type=click.Path())
@click.option("--min-quality", type=int, default=4, show_default=True)
@click.option("--judge", "judge_name", type=click.Choice(["mock", "remote"]), default="mock",
              show_default=True)
@click.option("--transcript", type=click.Path(), default=None,
              help="Append raw remote-judge transcripts to this file.")
@click.option("--max-in-flight", type=int, default=1, show_default=True,
              help="Concurrent judge calls.")
@click.pass_obj
@handle_errors
def qa_gen(obj, corpus_path, min_quality, judge_name, transcript, max_in_flight):
    """Generate quality-gated QA pairs from a corpus."""
    chunks = load_chunks(Path(corpus_path))
    client = _make_judge(judge_name, Path(transcript) if transcript else None)
    result = generate_qa_corpus(chunks, client, min_quality=min_quality, max_in_flight=max_in_flight)
    payload = qa_pairs_to_dict(result.pairs)
    payload["failures"] = result.failures
    _emit(_to_json(payload), obj["output"])


@main.command("judge")
@click.argument("qa_file", type=click.Path())
@click.argument("candidates_file", type=click.Path())
@click.option("--system-id", required=True)
@click.option("--judge", "judge_name", type=click.Choice(["mock", "remote"]), default="mock",
              show_default=True)
@click.option("--transcript", type=click.Path(), default=None)
@click.option("--max-in-flight", type=int, default=1, show_default=True,
              help="Concurrent judge calls.")
@click.pass_obj
@handle_errors
def judge_cmd(obj, qa_file, candidates_file, system_id, judge_name, transcript, max_in_flight):
    """Judge candidate answers against reference QA pairs."""
    qa = qa_pairs_from_dict(json.loads(Path(qa_file).read_text(encoding="utf-8")))
    candidates = json.loads(Path(candidates_file).read_text(encoding="utf-8"))
    if not isinstance(candidates, dict):
        raise ConfigError("candidates file must map question to answer")
    client = _make_judge(judge_name, Path(transcript) if transcript else None)
    report = score_outcomes(qa, candidates, client, system_id, max_in_flight=max_in_flight)
    payload = {
        "system_id": report.system_id,
        "accuracy": report.accuracy,
        "coverage": report.coverage,
        "unanswered": report.unanswered,
        "records": [
            {"question_id": r.question_id, "system_id": r.system_id, "correct": r.correct}
            for r in report.records
        ],
    }
    if obj["format"] == "csv":
        table = OutcomeTable.from_records(
            (r.question_id, r.system_id, r.correct) for r in report.records
        )
        _emit(table.to_delimited(), obj["output"])
    else:
        _emit(_to_json(payload), obj["output"])


# ---------------------------------------------------------------------------
# serve


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--catalog-dir", type=click.Path(), default=None,
              help="Directory of price-catalog documents (default: bundled).")
@click.option("--dataset-dir", type=click.Path(), default=None)
@click.option("--ui-dir", type=click.Path(), default=None,
              help="Directory of built UI assets to serve at /.")
@click.pass_obj
@handle_errors
def serve(obj, host, port, catalog_dir, dataset_dir, ui_dir):
    """Serve the HTTP API (and the explorer UI, when built)."""
    import uvicorn

    from .server import create_app

    config = obj["config"]
    catalog_dir = catalog_dir or config.get("catalog_dir")
    dataset_dir = dataset_dir or config.get("dataset_dir")
    ui_dir = ui_dir or config.get("ui_dir")
    app = create_app(
        catalog_dir=Path(catalog_dir) if catalog_dir else None,
        dataset_dir=Path(dataset_dir) if dataset_dir else None,
        ui_dir=Path(ui_dir) if ui_dir else None,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
