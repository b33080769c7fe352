"""Corpus profiling, the oddness metric, QA generation and outcome scoring.

Token counts use a pluggable tokenizer; the default splits on whitespace and
punctuation.  The oddness denominator deliberately uses plain whitespace
words, and every profile records which tokenizer produced it, since "token"
is not a vendor-neutral unit.

Judge-mediated operations accept a max_in_flight cap: above 1, judge calls
run concurrently on a thread pool, and results are assembled in input order
keyed by chunk or question, so the output is identical regardless of
completion order.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, TypeVar

_T = TypeVar("_T")
_R = TypeVar("_R")


def _map_with_cap(func: Callable[[_T], _R], items: Sequence[_T], max_in_flight: int) -> list[_R]:
    if max_in_flight <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(pool.map(func, items))

from .errors import ConfigError, DomainError, TransportError
from .judge import JudgeClient
from .pricing import DatasetProfile

Tokenizer = Callable[[str], list[str]]

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize_whitespace_punct(text: str) -> list[str]:
    """Words plus standalone punctuation marks."""
    return _TOKEN_RE.findall(text)


def words(text: str) -> list[str]:
    """Whitespace words, the denominator unit of the oddness ratio."""
    return text.split()


TOKENIZERS: dict[str, Tokenizer] = {
    "whitespace-punct-v1": tokenize_whitespace_punct,
    "whitespace-v1": words,
}
DEFAULT_TOKENIZER = "whitespace-punct-v1"


def get_tokenizer(tokenizer_id: str) -> Tokenizer:
    try:
        return TOKENIZERS[tokenizer_id]
    except KeyError:
        raise ConfigError(f"unknown tokenizer: {tokenizer_id!r}") from None


@dataclass(frozen=True)
class Chunk:
    """One retrievable unit of corpus text."""

    id: str
    text: str
    token_count: int

    @classmethod
    def from_text(cls, id: str, text: str, tokenizer_id: str = DEFAULT_TOKENIZER) -> "Chunk":
        return cls(id=id, text=text, token_count=len(get_tokenizer(tokenizer_id)(text)))


@dataclass(frozen=True)
class QaPair:
    question: str
    answer: str
    source_chunk: str
    quality: int

    def __post_init__(self):
        if self.quality not in (0, 1, 2, 3, 4):
            raise ConfigError(f"quality must be an integer 0-4: {self.quality!r}")


def load_chunks(path: Path, tokenizer_id: str = DEFAULT_TOKENIZER) -> list[Chunk]:
    """Read a corpus: a directory of one-chunk-per-file texts, or a .jsonl
    file of {"id", "text"} records."""
    import json

    path = Path(path)
    chunks: list[Chunk] = []
    if path.is_dir():
        for file in sorted(path.iterdir()):
            if file.is_file():
                chunks.append(Chunk.from_text(file.name, file.read_text(encoding="utf-8"), tokenizer_id))
    elif path.suffix == ".jsonl":
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                chunks.append(Chunk.from_text(str(record["id"]), str(record["text"]), tokenizer_id))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad chunk record: {exc}") from exc
    else:
        raise ConfigError(f"corpus must be a directory or a .jsonl file: {path}")
    seen = set()
    for chunk in chunks:
        if chunk.id in seen:
            raise ConfigError(f"duplicate chunk id: {chunk.id!r}")
        seen.add(chunk.id)
    return chunks


# ---------------------------------------------------------------------------
# Profiling


def profile_corpus(
    chunks: Sequence[Chunk],
    qa: Sequence[QaPair] = (),
    tokenizer_id: str = DEFAULT_TOKENIZER,
) -> DatasetProfile:
    """Dataset statistics from observed chunks and reference QA pairs.

    The QA list is treated as the fine-tuning pool (num_ft_qa, n_train);
    the training-pair length carries the question + reference answer rule.
    """
    if not chunks:
        raise DomainError("empty corpus")
    tokenizer = get_tokenizer(tokenizer_id)
    len_c = sum(c.token_count for c in chunks) / len(chunks)
    if qa:
        len_q = sum(len(tokenizer(pair.question)) for pair in qa) / len(qa)
        len_a_ref = sum(len(tokenizer(pair.answer)) for pair in qa) / len(qa)
    else:
        len_q = 0.0
        len_a_ref = 0.0
    return DatasetProfile(
        num_c=len(chunks),
        len_c=len_c,
        len_q=len_q,
        len_a={},
        len_a_ref=len_a_ref,
        num_ft_qa=len(qa),
        n_train=len(qa),
        n_test=0,
        tokenizer=tokenizer_id,
    )


# ---------------------------------------------------------------------------
# Oddness


def oddness(text: str, judge: JudgeClient) -> float:
    """Fraction of whitespace words the judge flags as unusual.

    Flags count with multiplicity: a flagged word type that appears three
    times contributes three.
    """
    text_words = words(text)
    if not text_words:
        raise DomainError("cannot score oddness of empty text")
    flagged = set(judge.odd_words(text))
    return sum(1 for word in text_words if word in flagged) / len(text_words)


@dataclass(frozen=True)
class OddnessReport:
    """Corpus-level oddness: mean of per-chunk ratios (primary) and the
    pooled flagged-words-over-all-words ratio (secondary)."""

    per_chunk_mean: float
    pooled: float
    per_chunk: dict[str, float]


def corpus_oddness(chunks: Sequence[Chunk], judge: JudgeClient, max_in_flight: int = 1) -> OddnessReport:
    if not chunks:
        raise DomainError("empty corpus")
    flags = _map_with_cap(lambda chunk: set(judge.odd_words(chunk.text)), chunks, max_in_flight)
    per_chunk: dict[str, float] = {}
    flagged_total = 0
    words_total = 0
    for chunk, flagged in zip(chunks, flags):
        chunk_words = words(chunk.text)
        if not chunk_words:
            per_chunk[chunk.id] = 0.0
            continue
        hits = sum(1 for word in chunk_words if word in flagged)
        per_chunk[chunk.id] = hits / len(chunk_words)
        flagged_total += hits
        words_total += len(chunk_words)
    return OddnessReport(
        per_chunk_mean=sum(per_chunk.values()) / len(per_chunk),
        pooled=flagged_total / words_total if words_total else 0.0,
        per_chunk=per_chunk,
    )


# ---------------------------------------------------------------------------
# QA generation


@dataclass
class QaGenerationResult:
    pairs: list[QaPair] = field(default_factory=list)
    failures: dict[str, str] = field(default_factory=dict)  # chunk id -> error


def generate_qa_corpus(
    chunks: Sequence[Chunk], judge: JudgeClient, min_quality: int = 4, max_in_flight: int = 1
) -> QaGenerationResult:
    """Generate QA pairs from every chunk, keeping quality >= min_quality.

    A chunk may yield several pairs.  Per-chunk judge failures are collected
    into the result's failure manifest; only when every chunk fails does the
    operation raise.
    """
    if min_quality not in (0, 1, 2, 3, 4):
        raise DomainError(f"min_quality must be an integer 0-4: {min_quality!r}")

    def generate(chunk: Chunk):
        try:
            return judge.generate_qa(chunk.text), None
        except Exception as exc:  # noqa: BLE001 - collected into the manifest
            return None, str(exc)

    result = QaGenerationResult()
    for chunk, (generated, error) in zip(chunks, _map_with_cap(generate, chunks, max_in_flight)):
        if error is not None:
            result.failures[chunk.id] = error
            continue
        for item in generated:
            if item.quality >= min_quality:
                result.pairs.append(
                    QaPair(
                        question=item.question,
                        answer=item.answer,
                        source_chunk=chunk.id,
                        quality=item.quality,
                    )
                )
    if chunks and len(result.failures) == len(chunks):
        raise TransportError(f"QA generation failed for all {len(chunks)} chunks")
    return result


# ---------------------------------------------------------------------------
# Outcome scoring


@dataclass(frozen=True)
class OutcomeRecord:
    question_id: str
    system_id: str
    correct: bool


@dataclass
class ScoreReport:
    """Judged correctness records for one system plus summary rates.

    accuracy is the mean over judged questions (None when nothing was
    judged); coverage is judged / total reference questions.
    """

    system_id: str
    records: list[OutcomeRecord]
    unanswered: list[str]
    accuracy: Optional[float]
    coverage: float


def score_outcomes(
    qa: Sequence[QaPair],
    candidates: Mapping[str, str],
    judge: JudgeClient,
    system_id: str,
    max_in_flight: int = 1,
) -> ScoreReport:
    """Judge each candidate answer against its reference.

    Reference questions without a candidate are recorded as unanswered and
    excluded from the accuracy; candidate questions outside the reference
    set are an error.
    """
    reference_questions = {pair.question for pair in qa}
    unknown = [q for q in candidates if q not in reference_questions]
    if unknown:
        raise DomainError(f"candidate question not in reference set: {unknown[0]!r}")
    answered = [pair for pair in qa if pair.question in candidates]
    unanswered = [pair.question for pair in qa if pair.question not in candidates]

    def grade(pair: QaPair) -> bool:
        return judge.judge_correct(pair.question, pair.answer, candidates[pair.question])

    records = [
        OutcomeRecord(pair.question, system_id, correct)
        for pair, correct in zip(answered, _map_with_cap(grade, answered, max_in_flight))
    ]
    judged = len(records)
    accuracy = sum(r.correct for r in records) / judged if judged else None
    coverage = judged / len(qa) if qa else 0.0
    return ScoreReport(
        system_id=system_id,
        records=records,
        unanswered=unanswered,
        accuracy=accuracy,
        coverage=coverage,
    )


def qa_pairs_to_dict(pairs: Iterable[QaPair]) -> dict:
    return {
        "qa_pairs": [
            {
                "question": pair.question,
                "answer": pair.answer,
                "source_chunk": pair.source_chunk,
                "quality": pair.quality,
            }
            for pair in pairs
        ]
    }


def qa_pairs_from_dict(document: Mapping) -> list[QaPair]:
    try:
        return [
            QaPair(
                question=item["question"],
                answer=item["answer"],
                source_chunk=item.get("source_chunk", ""),
                quality=int(item["quality"]),
            )
            for item in document["qa_pairs"]
        ]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed QA document: {exc}") from exc
