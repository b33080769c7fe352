"""Scenario documents: parsing, resolution, canonical hashing, evaluation.

A scenario bundles everything needed to price and judge one deployment:
a price catalog, a dataset profile, one or more pipelines, a workload, and
the economics knobs (v, h, r, s).  Sections may be inline objects or paths
to sibling JSON documents; loading resolves all references so a scenario is
self-contained for re-execution and can be hashed canonically.

The CLI and the HTTP API both evaluate scenarios through this module, which
is what makes their outputs identical field for field.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence

from . import __version__
from .econ import CopResult, EconomicsParams, break_even_accuracy, extended_cost_of_pass
from .errors import ConfigError
from .pricing import (
    DEFAULT_LIFETIME_HOURS,
    CostBreakdown,
    DatasetProfile,
    PipelineKind,
    PipelineSpec,
    PriceCatalog,
    WorkloadProfile,
    amortization_curve,
    per_request_cost,
)

SCHEMA_VERSION = "v1"

DEFAULT_VALIDATION_COST = 0.10
DEFAULT_HUMAN_COST = 1.00


def canonical_json(document) -> str:
    """Stable serialization used for hashing and byte-identical reports."""
    return json.dumps(document, sort_keys=True, separators=(",", ":"), allow_nan=False)


def scenario_hash(document: Mapping) -> str:
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()


def canonical_number(x: float) -> str:
    """Cross-language canonical decimal form: 17 significant digits,
    exponential notation, signed unpadded exponent (matches ECMAScript
    Number.prototype.toExponential(16))."""
    mantissa, _, exponent = f"{x:.16e}".partition("e")
    return f"{mantissa}e{int(exponent):+d}"


# ---------------------------------------------------------------------------
# Field-checked parsing of the document sections


def _check_fields(section: str, document: Mapping, known: Sequence[str], required: Sequence[str]) -> None:
    unknown = [key for key in document if key not in known]
    if unknown:
        warnings.warn(
            f"{section}: ignoring unknown fields: {', '.join(sorted(unknown))}",
            stacklevel=3,
        )
    for key in required:
        if key not in document:
            raise ConfigError(f"{section}: missing required field {key!r}")


def _number(section: str, document: Mapping, name: str, default=None):
    value = document.get(name, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{name}: expected a number, got {value!r}")
    return value


def parse_catalog(document: Mapping, section: str = "catalog") -> PriceCatalog:
    known = ["pit", "pot", "pet", "pft", "pf", "ph", "vdb", "pit_ft", "pot_ft"]
    _check_fields(section, document, known, required=["pit", "pot"])
    try:
        return PriceCatalog(
            pit=_number(section, document, "pit"),
            pot=_number(section, document, "pot"),
            pet=_number(section, document, "pet"),
            pft=_number(section, document, "pft"),
            pf=_number(section, document, "pf"),
            ph=_number(section, document, "ph"),
            vdb=_number(section, document, "vdb", 0.0),
            pit_ft=_number(section, document, "pit_ft"),
            pot_ft=_number(section, document, "pot_ft"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def parse_dataset(document: Mapping, section: str = "dataset") -> DatasetProfile:
    known = [
        "num_c", "len_c", "len_q", "len_a", "len_qa", "len_a_ref",
        "num_ft_qa", "oddness", "n_train", "n_test", "tokenizer",
    ]
    _check_fields(section, document, known, required=["num_c", "len_c", "len_q"])
    len_a_raw = document.get("len_a", {})
    if not isinstance(len_a_raw, Mapping):
        raise ConfigError(f"{section}.len_a: expected a mapping of pipeline kind to tokens")
    len_a = {}
    for key, value in len_a_raw.items():
        try:
            kind = PipelineKind(key)
        except ValueError:
            raise ConfigError(f"{section}.len_a: unknown pipeline kind {key!r}") from None
        len_a[kind] = value
    try:
        return DatasetProfile(
            num_c=int(_number(section, document, "num_c")),
            len_c=_number(section, document, "len_c"),
            len_q=_number(section, document, "len_q"),
            len_a=len_a,
            len_qa=_number(section, document, "len_qa"),
            len_a_ref=_number(section, document, "len_a_ref"),
            num_ft_qa=int(_number(section, document, "num_ft_qa", 0)),
            oddness=_number(section, document, "oddness"),
            n_train=int(_number(section, document, "n_train", 0)),
            n_test=int(_number(section, document, "n_test", 0)),
            tokenizer=document.get("tokenizer"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def parse_pipeline(document: Mapping, section: str = "pipeline") -> PipelineSpec:
    known = ["kind", "k", "len_p", "len_p_rag"]
    _check_fields(section, document, known, required=["kind"])
    try:
        kind = PipelineKind(document["kind"])
    except ValueError:
        raise ConfigError(
            f"{section}.kind: unknown pipeline kind {document['kind']!r} "
            f"(expected one of {', '.join(k.value for k in PipelineKind)})"
        ) from None
    k = document.get("k")
    if k is not None and not isinstance(k, int):
        raise ConfigError(f"{section}.k: expected an integer, got {k!r}")
    try:
        return PipelineSpec(
            kind=kind,
            k=k,
            len_p=_number(section, document, "len_p", 0.0),
            len_p_rag=_number(section, document, "len_p_rag"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def parse_workload(document: Mapping, section: str = "workload") -> WorkloadProfile:
    known = ["num_rl", "lifetime_hours", "num_rh"]
    _check_fields(section, document, known, required=["num_rl"])
    try:
        return WorkloadProfile(
            num_rl=int(_number(section, document, "num_rl")),
            lifetime_hours=_number(section, document, "lifetime_hours", DEFAULT_LIFETIME_HOURS),
            num_rh=_number(section, document, "num_rh"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None


@dataclass(frozen=True)
class EconomicsSection:
    """Scenario economics: v and h have conventional defaults, r never does
    (it materially changes conclusions, so it must be stated), and s comes
    either inline or from a scored outcome table."""

    v: float = DEFAULT_VALIDATION_COST
    h: float = DEFAULT_HUMAN_COST
    r: Optional[float] = None
    s: Optional[float] = None


def parse_economics(document: Mapping, section: str = "economics") -> EconomicsSection:
    known = ["v", "h", "r", "s", "s_from"]
    _check_fields(section, document, known, required=[])
    v = _number(section, document, "v", DEFAULT_VALIDATION_COST)
    h = _number(section, document, "h", DEFAULT_HUMAN_COST)
    r = _number(section, document, "r")
    s = _number(section, document, "s")
    if v < 0:
        raise ConfigError(f"{section}.v: must be nonnegative, got {v!r}")
    if h < 0:
        raise ConfigError(f"{section}.h: must be nonnegative, got {h!r}")
    if r is not None and not (0.0 <= r <= 1.0):
        raise ConfigError(f"{section}.r: out of range [0, 1], got {r!r}")
    if s is not None and not (0.0 <= s <= 1.0):
        raise ConfigError(f"{section}.s: out of range [0, 1], got {s!r}")
    return EconomicsSection(v=v, h=h, r=r, s=s)


# ---------------------------------------------------------------------------
# The scenario itself


@dataclass
class Scenario:
    name: str
    catalog: PriceCatalog
    dataset: DatasetProfile
    pipelines: list[PipelineSpec]
    workload: WorkloadProfile
    economics: EconomicsSection
    resolved: dict = field(default_factory=dict)  # fully inlined source document

    @property
    def hash(self) -> str:
        return scenario_hash(self.resolved)


def _resolve_section(value, base_dir: Optional[Path], section: str):
    """A section is an inline object or a path to a JSON document."""
    if isinstance(value, Mapping):
        return dict(value)
    if isinstance(value, str):
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"{section}: referenced file not found: {path}")
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{section}: malformed JSON in {path}: {exc}") from exc
    raise ConfigError(f"{section}: expected an inline object or a file path, got {value!r}")


def _success_rate_from_outcomes(spec, base_dir: Optional[Path]) -> float:
    """Resolve economics.s_from: the accuracy of one system in a scored
    outcome table (inline document, .json, or delimited text file)."""
    from .stats import OutcomeTable

    if not isinstance(spec, Mapping) or "outcomes" not in spec or "system" not in spec:
        raise ConfigError("economics.s_from: expected {'outcomes': <file or document>, 'system': <id>}")
    source = spec["outcomes"]
    if isinstance(source, Mapping):
        table = OutcomeTable.from_dict(source)
    elif isinstance(source, str):
        path = Path(source)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"economics.s_from: referenced file not found: {path}")
        text = path.read_text(encoding="utf-8")
        table = OutcomeTable.from_dict(json.loads(text)) if path.suffix == ".json" \
            else OutcomeTable.from_delimited(text)
    else:
        raise ConfigError(f"economics.s_from.outcomes: expected a file path or document, got {source!r}")
    try:
        return table.accuracy(str(spec["system"]))
    except Exception as exc:
        raise ConfigError(f"economics.s_from: {exc}") from exc


def scenario_from_dict(document: Mapping, base_dir: Optional[Path] = None) -> Scenario:
    known = ["name", "catalog", "dataset", "pipeline", "pipelines", "workload", "economics"]
    _check_fields("scenario", document, known, required=["catalog", "dataset", "workload"])
    if "pipeline" in document and "pipelines" in document:
        raise ConfigError("scenario: give either 'pipeline' or 'pipelines', not both")
    if "pipeline" in document:
        pipeline_sections = [document["pipeline"]]
    elif "pipelines" in document:
        pipeline_sections = list(document["pipelines"])
        if not pipeline_sections:
            raise ConfigError("scenario.pipelines: must not be empty")
    else:
        raise ConfigError("scenario: missing required field 'pipeline' or 'pipelines'")

    catalog_doc = _resolve_section(document["catalog"], base_dir, "catalog")
    dataset_doc = _resolve_section(document["dataset"], base_dir, "dataset")
    workload_doc = _resolve_section(document["workload"], base_dir, "workload")
    pipeline_docs = [
        _resolve_section(section, base_dir, f"pipelines[{i}]")
        for i, section in enumerate(pipeline_sections)
    ]
    economics_doc = (
        _resolve_section(document["economics"], base_dir, "economics")
        if "economics" in document
        else {}
    )
    # an explicit s wins; otherwise s_from derives it from a scored outcome
    # table, and the derived value is inlined so the scenario stays
    # self-contained and the hash covers it
    if "s_from" in economics_doc and "s" not in economics_doc:
        economics_doc["s"] = _success_rate_from_outcomes(economics_doc["s_from"], base_dir)

    resolved = {
        "name": document.get("name", "scenario"),
        "catalog": catalog_doc,
        "dataset": dataset_doc,
        "pipelines": pipeline_docs,
        "workload": workload_doc,
        "economics": economics_doc,
    }
    return Scenario(
        name=resolved["name"],
        catalog=parse_catalog(catalog_doc),
        dataset=parse_dataset(dataset_doc),
        pipelines=[parse_pipeline(doc, f"pipelines[{i}]") for i, doc in enumerate(pipeline_docs)],
        workload=parse_workload(workload_doc),
        economics=parse_economics(economics_doc),
        resolved=resolved,
    )


def load_scenario(path: Path) -> Scenario:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return scenario_from_dict(document, base_dir=path.parent)


# ---------------------------------------------------------------------------
# Bundled fixture documents


def data_dir() -> Path:
    return Path(str(resources.files("llmecon").joinpath("data")))


def bundled_catalog_dir() -> Path:
    return data_dir() / "catalogs"


def bundled_dataset_dir() -> Path:
    return data_dir() / "datasets"


def bundled_scenario_path(name: str) -> Path:
    return data_dir() / "scenarios" / f"{name}.json"


# ---------------------------------------------------------------------------
# Evaluation


@dataclass
class PipelineEvaluation:
    kind: PipelineKind
    breakdown: CostBreakdown
    economics: Optional[EconomicsParams]
    cop: Optional[CopResult]
    break_even: Optional[float]

    def as_dict(self) -> dict:
        payload: dict = {"kind": self.kind.value, "breakdown": self.breakdown.as_dict()}
        if self.economics is not None:
            payload["economics"] = {
                "g": self.economics.g,
                "v": self.economics.v,
                "h": self.economics.h,
                "r": self.economics.r,
                "s": self.economics.s,
            }
        if self.cop is not None:
            payload["cop"] = {
                "cop_ex": self.cop.cop_ex,
                "denominator": self.cop.denominator,
                "beats_human": self.cop.beats_human,
            }
        payload["break_even"] = self.break_even
        return payload


@dataclass
class EvaluationReport:
    scenario_name: str
    scenario_hash: str
    assumptions: list[str]
    pipelines: list[PipelineEvaluation]
    resolved_scenario: dict

    def as_dict(self) -> dict:
        return {
            "tool": "llmecon",
            "tool_version": __version__,
            "schema_version": SCHEMA_VERSION,
            "scenario_name": self.scenario_name,
            "scenario_hash": self.scenario_hash,
            "assumptions": self.assumptions,
            "pipelines": [evaluation.as_dict() for evaluation in self.pipelines],
            "scenario": self.resolved_scenario,
        }


def scenario_assumptions(scenario: Scenario) -> list[str]:
    assumptions = [
        "validation cost v is charged on every attempt, including the successful one",
        "the human fallback always succeeds and is not followed by a validation charge",
    ]
    if any(p.kind.uses_fine_tuning for p in scenario.pipelines) and scenario.dataset.len_qa_assumed:
        assumptions.append(
            "len_qa not given; assumed len_q + len_a_ref (training pair = question + reference answer)"
        )
    if any(p.kind.uses_retrieval for p in scenario.pipelines) and scenario.catalog.vdb == 0.0:
        assumptions.append("vdb=0: vector-search execution cost assumed negligible")
    return assumptions


def evaluate_scenario(scenario: Scenario, require_economics: bool = False) -> EvaluationReport:
    """Price every pipeline and, when r and s are known, fold the result
    into the extended cost-of-pass and break-even accuracy."""
    econ = scenario.economics
    if require_economics and (econ.r is None or econ.s is None):
        missing = "r" if econ.r is None else "s"
        raise ConfigError(f"economics.{missing}: required for cost-of-pass evaluation")
    evaluations = []
    for pipeline in scenario.pipelines:
        breakdown = per_request_cost(pipeline, scenario.catalog, scenario.dataset, scenario.workload)
        params = None
        cop = None
        break_even = None
        if econ.r is not None and econ.s is not None:
            params = EconomicsParams(g=breakdown.total, v=econ.v, h=econ.h, r=econ.r, s=econ.s)
            cop = extended_cost_of_pass(params)
        if econ.h > 0:
            break_even = break_even_accuracy(breakdown.total, econ.v, econ.h)
        evaluations.append(
            PipelineEvaluation(
                kind=pipeline.kind,
                breakdown=breakdown,
                economics=params,
                cop=cop,
                break_even=break_even,
            )
        )
    return EvaluationReport(
        scenario_name=scenario.name,
        scenario_hash=scenario.hash,
        assumptions=scenario_assumptions(scenario),
        pipelines=evaluations,
        resolved_scenario=scenario.resolved,
    )


def amortization_report(scenario: Scenario, num_rl_grid: Sequence[int]) -> dict:
    """Per-request cost series over a request-volume grid, one per pipeline."""
    series = []
    for pipeline in scenario.pipelines:
        rows = amortization_curve(
            pipeline,
            scenario.catalog,
            scenario.dataset,
            scenario.workload.lifetime_hours,
            num_rl_grid,
        )
        series.append(
            {
                "kind": pipeline.kind.value,
                "rows": [{"num_rl": n, **breakdown.as_dict()} for n, breakdown in rows],
            }
        )
    return {
        "tool": "llmecon",
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "scenario_name": scenario.name,
        "scenario_hash": scenario.hash,
        "assumptions": scenario_assumptions(scenario),
        "series": series,
        "scenario": scenario.resolved,
    }
