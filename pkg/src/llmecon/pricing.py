"""Per-request generation cost for Base, FT, RAG and FT+RAG pipelines.

The expected cost of serving one request splits into marginal token costs
(prompt/context input, generated answer output, per-query vector search) and
fixed costs amortized over the requests served within one system lifetime:
embedding the corpus, fine-tuning, and hosting a deployed fine-tuned model.

Token counts are inputs here, never computed; tokenization lives in the
corpus module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .errors import ConfigError

DEFAULT_LIFETIME_HOURS = 168.0  # seven days


class PipelineKind(str, Enum):
    BASE = "Base"
    FT = "FT"
    RAG = "RAG"
    FT_RAG = "FT_RAG"

    @property
    def uses_retrieval(self) -> bool:
        return self in (PipelineKind.RAG, PipelineKind.FT_RAG)

    @property
    def uses_fine_tuning(self) -> bool:
        return self in (PipelineKind.FT, PipelineKind.FT_RAG)


def _check_rate(name: str, value: Optional[float]) -> None:
    if value is None:
        return
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0.0):
        raise ConfigError(f"price rate must be a finite nonnegative number: {name}={value!r}")


@dataclass(frozen=True)
class PriceCatalog:
    """Monetary rates for one model deployment.

    pit / pot: USD per input / output token served.
    pet: USD per embedded corpus token (required for retrieval pipelines).
    pft: USD per fine-tuning token; pf: flat total fine-tuning price.  The
        two are mutually exclusive modes of the same training term.
    ph: USD per hour of hosting the deployed fine-tuned model.
    vdb: USD per retrieval operation (vector search), default 0.
    pit_ft / pot_ft: token prices when serving the fine-tuned variant;
        default to pit / pot.
    """

    pit: float
    pot: float
    pet: Optional[float] = None
    pft: Optional[float] = None
    pf: Optional[float] = None
    ph: Optional[float] = None
    vdb: float = 0.0
    pit_ft: Optional[float] = None
    pot_ft: Optional[float] = None

    def __post_init__(self):
        for name in ("pit", "pot", "pet", "pft", "pf", "ph", "vdb", "pit_ft", "pot_ft"):
            _check_rate(name, getattr(self, name))
        if self.pft is not None and self.pf is not None:
            raise ConfigError(
                "per-token (pft) and flat (pf) fine-tune pricing are mutually exclusive; set one"
            )

    @property
    def input_rate_ft(self) -> float:
        return self.pit if self.pit_ft is None else self.pit_ft

    @property
    def output_rate_ft(self) -> float:
        return self.pot if self.pot_ft is None else self.pot_ft

    def scale(self, factor: float) -> "PriceCatalog":
        """Catalog with every rate multiplied by ``factor``."""

        def mul(value: Optional[float]) -> Optional[float]:
            return None if value is None else value * factor

        return PriceCatalog(
            pit=self.pit * factor,
            pot=self.pot * factor,
            pet=mul(self.pet),
            pft=mul(self.pft),
            pf=mul(self.pf),
            ph=mul(self.ph),
            vdb=self.vdb * factor,
            pit_ft=mul(self.pit_ft),
            pot_ft=mul(self.pot_ft),
        )


@dataclass(frozen=True)
class DatasetProfile:
    """Corpus and QA token statistics driving the cost formulas.

    num_c / len_c: chunk count and mean chunk length.
    len_q: mean question length.
    len_a: mean generated answer length per pipeline kind (measured per
        deployed model, so the map may be partial).
    len_a_ref: mean reference answer length, used to derive len_qa.
    len_qa: mean fine-tuning pair length; when absent it is assumed to be
        len_q + len_a_ref (a training pair is a question plus its answer).
    """

    num_c: int
    len_c: float
    len_q: float
    len_a: Mapping[PipelineKind, float] = field(default_factory=dict)
    len_qa: Optional[float] = None
    len_a_ref: Optional[float] = None
    num_ft_qa: int = 0
    oddness: Optional[float] = None
    n_train: int = 0
    n_test: int = 0
    tokenizer: Optional[str] = None

    def __post_init__(self):
        for name in ("num_c", "len_c", "len_q", "num_ft_qa", "n_train", "n_test"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise ConfigError(f"count or length must be nonnegative: {name}={value!r}")
        for kind, length in dict(self.len_a).items():
            if not (isinstance(length, (int, float)) and math.isfinite(length) and length >= 0):
                raise ConfigError(f"answer length must be nonnegative: len_a[{kind}]={length!r}")
        for name in ("len_qa", "len_a_ref"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise ConfigError(f"length must be nonnegative: {name}={value!r}")
        if self.oddness is not None and not (0.0 <= self.oddness <= 1.0):
            raise ConfigError(f"oddness out of range: {self.oddness!r}")

    @property
    def training_pair_length(self) -> float:
        """len_qa, or the len_q + len_a_ref assumption when not given."""
        if self.len_qa is not None:
            return self.len_qa
        if self.len_a_ref is not None:
            return self.len_q + self.len_a_ref
        raise ConfigError("dataset profile needs len_qa or len_a_ref to price fine-tuning")

    @property
    def len_qa_assumed(self) -> bool:
        return self.len_qa is None

    def answer_length(self, kind: PipelineKind) -> float:
        try:
            return dict(self.len_a)[kind]
        except KeyError:
            raise ConfigError(
                f"dataset profile has no answer length for pipeline kind {kind.value!r}"
            ) from None


@dataclass(frozen=True)
class PipelineSpec:
    """Which adaptation pipeline runs, and its prompt/retrieval shape."""

    kind: PipelineKind
    k: Optional[int] = None  # retrieved chunks per query, RAG kinds only
    len_p: float = 0.0  # base prompt-template length in tokens
    len_p_rag: Optional[float] = None  # RAG prompt-template length

    def __post_init__(self):
        if self.kind.uses_retrieval:
            if self.k is None or self.k < 1:
                raise ConfigError(f"retrieval pipelines need k >= 1, got k={self.k!r}")
            if self.len_p_rag is None:
                raise ConfigError("retrieval pipelines need len_p_rag")
        if self.len_p < 0 or (self.len_p_rag is not None and self.len_p_rag < 0):
            raise ConfigError("prompt lengths must be nonnegative")


@dataclass(frozen=True)
class WorkloadProfile:
    """Request volume over one amortization window.

    num_rh defaults to num_rl / lifetime_hours; an explicit override exists
    because hourly and lifetime volumes are independent knobs in principle.
    """

    num_rl: int
    lifetime_hours: float = DEFAULT_LIFETIME_HOURS
    num_rh: Optional[float] = None

    def __post_init__(self):
        if not (isinstance(self.lifetime_hours, (int, float)) and self.lifetime_hours > 0):
            raise ConfigError(f"lifetime_hours must be positive: {self.lifetime_hours!r}")
        if not (isinstance(self.num_rl, (int, float)) and self.num_rl >= 1):
            raise ConfigError(f"num_rl must be at least 1: {self.num_rl!r}")
        if self.num_rh is not None and not self.num_rh > 0:
            raise ConfigError(f"num_rh must be positive: {self.num_rh!r}")

    @property
    def requests_per_hour(self) -> float:
        return self.num_rh if self.num_rh is not None else self.num_rl / self.lifetime_hours


@dataclass(frozen=True)
class CostBreakdown:
    """Per-request USD cost, split by origin.  total is always the sum."""

    embedding: float
    retrieval: float
    training: float
    hosting: float
    input: float
    output: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "total",
            self.embedding + self.retrieval + self.training + self.hosting + self.input + self.output,
        )

    def as_dict(self) -> dict:
        return {
            "embedding": self.embedding,
            "retrieval": self.retrieval,
            "training": self.training,
            "hosting": self.hosting,
            "input": self.input,
            "output": self.output,
            "total": self.total,
        }


def _require_catalog_fields(kind: PipelineKind, catalog: PriceCatalog) -> None:
    if kind.uses_retrieval and catalog.pet is None:
        raise ConfigError(f"catalog is missing required field 'pet' for pipeline {kind.value}")
    if kind.uses_fine_tuning:
        if catalog.pft is None and catalog.pf is None:
            raise ConfigError(
                f"catalog is missing required field 'pft' or 'pf' for pipeline {kind.value}"
            )
        if catalog.ph is None:
            raise ConfigError(f"catalog is missing required field 'ph' for pipeline {kind.value}")


def per_request_cost(
    pipeline: PipelineSpec,
    catalog: PriceCatalog,
    data: DatasetProfile,
    work: WorkloadProfile,
) -> CostBreakdown:
    """Expected USD cost of serving one request with the given pipeline.

    Base pays input and output tokens only.  Retrieval adds the amortized
    corpus embedding, the per-query search cost, and K retrieved chunks in
    the prompt.  Fine-tuning adds amortized training, hourly hosting spread
    over the hourly request rate, and serves at the FT token prices.
    """
    kind = pipeline.kind
    _require_catalog_fields(kind, catalog)
    answer_len = data.answer_length(kind)

    embedding = retrieval = training = hosting = 0.0
    if kind.uses_retrieval:
        embedding = data.num_c * data.len_c * catalog.pet / work.num_rl
        retrieval = catalog.vdb
        input_tokens = pipeline.k * data.len_c + data.len_q + pipeline.len_p_rag
    else:
        input_tokens = data.len_q + pipeline.len_p

    if kind.uses_fine_tuning:
        if catalog.pf is not None:
            training = catalog.pf / work.num_rl
        else:
            training = data.num_ft_qa * data.training_pair_length * catalog.pft / work.num_rl
        hosting = catalog.ph / work.requests_per_hour
        input_rate, output_rate = catalog.input_rate_ft, catalog.output_rate_ft
    else:
        input_rate, output_rate = catalog.pit, catalog.pot

    return CostBreakdown(
        embedding=embedding,
        retrieval=retrieval,
        training=training,
        hosting=hosting,
        input=input_tokens * input_rate,
        output=answer_len * output_rate,
    )


def marginal_cost(pipeline: PipelineSpec, catalog: PriceCatalog, data: DatasetProfile) -> float:
    """Volume-independent part of the per-request cost: input + output + retrieval."""
    breakdown = per_request_cost(pipeline, catalog, data, WorkloadProfile(num_rl=1, lifetime_hours=1.0))
    return breakdown.input + breakdown.output + breakdown.retrieval


def amortization_curve(
    pipeline: PipelineSpec,
    catalog: PriceCatalog,
    data: DatasetProfile,
    lifetime_hours: float,
    num_rl_grid: Sequence[int],
) -> list[tuple[int, CostBreakdown]]:
    """Per-request cost as the lifetime request volume grows.

    Fixed costs are divided by num_rl (and hosting by the derived hourly
    rate), so the total is nonincreasing along the grid and approaches the
    marginal token cost.
    """
    if len(num_rl_grid) == 0:
        raise ConfigError("request grid must not be empty")
    previous = None
    for value in num_rl_grid:
        if value < 1:
            raise ConfigError(f"request grid values must be at least 1: {value!r}")
        if previous is not None and value <= previous:
            raise ConfigError(f"request grid must be strictly increasing: {value!r}")
        previous = value
    return [
        (
            num_rl,
            per_request_cost(
                pipeline, catalog, data, WorkloadProfile(num_rl=num_rl, lifetime_hours=lifetime_hours)
            ),
        )
        for num_rl in num_rl_grid
    ]


def utilization_cost_bounds(
    catalog_low: PriceCatalog,
    catalog_high: PriceCatalog,
    pipeline: PipelineSpec,
    data: DatasetProfile,
    work: WorkloadProfile,
) -> tuple[CostBreakdown, CostBreakdown]:
    """Per-request cost under two price scenarios, e.g. the high-utilization
    (cheap) and low-utilization (expensive) rates of a self-hosted model."""
    return (
        per_request_cost(pipeline, catalog_low, data, work),
        per_request_cost(pipeline, catalog_high, data, work),
    )
