"""Pairwise significance testing of system correctness rates.

Systems are rarely evaluated on exactly the same questions, so the two
samples being compared usually overlap only partially.  The z-test here uses
every observation: paired questions contribute a covariance correction
through the phi correlation of the paired outcomes, unpaired questions
contribute independently.  With no paired rows it reduces to the classical
pooled two-proportion z-test; fully paired it reduces to the pooled
difference-of-correlated-proportions z.

Family-wise error over all pairwise contrasts is controlled with the
Holm step-down adjustment.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ConfigError, DomainError

_SQRT2 = math.sqrt(2.0)


def normal_two_sided_p(z: float) -> float:
    """Two-sided standard normal tail probability, erfc-based.

    erfc(|z|/sqrt(2)) evaluates 2*(1 - Phi(|z|)) directly, accurate to well
    under 1e-12 absolute over |z| <= 8.
    """
    return math.erfc(abs(z) / _SQRT2)


# ---------------------------------------------------------------------------
# Outcome bookkeeping


@dataclass
class OutcomeTable:
    """Per-question binary correctness records, one per (question, system).

    A missing pair means the system was not evaluated on that question;
    duplicates are rejected, never merged.
    """

    systems: list[str] = field(default_factory=list)
    _records: dict[tuple[str, str], bool] = field(default_factory=dict)

    def add(self, question_id: str, system_id: str, correct: bool) -> None:
        key = (question_id, system_id)
        if key in self._records:
            raise ConfigError(f"duplicate outcome record for question {question_id!r}, system {system_id!r}")
        if system_id not in self.systems:
            self.systems.append(system_id)
        self._records[key] = bool(correct)

    def outcomes(self, system_id: str) -> dict[str, bool]:
        if system_id not in self.systems:
            raise DomainError(f"unknown system: {system_id!r}")
        return {q: v for (q, s), v in self._records.items() if s == system_id}

    def accuracy(self, system_id: str) -> float:
        outcomes = self.outcomes(system_id)
        if not outcomes:
            raise DomainError(f"system has no observations: {system_id!r}")
        return sum(outcomes.values()) / len(outcomes)

    def __len__(self) -> int:
        return len(self._records)

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, bool]]) -> "OutcomeTable":
        table = cls()
        for question_id, system_id, correct in records:
            table.add(question_id, system_id, correct)
        return table

    @classmethod
    def from_delimited(cls, text: str) -> "OutcomeTable":
        """Parse 'question-id,system-id,0/1' lines (header row optional)."""
        table = cls()
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ConfigError(f"line {lineno}: expected 3 fields, got {len(row)}")
            question_id, system_id, flag = (part.strip() for part in row)
            if lineno == 1 and flag not in ("0", "1"):
                continue  # header row
            if flag not in ("0", "1"):
                raise ConfigError(f"line {lineno}: correctness must be 0 or 1, got {flag!r}")
            table.add(question_id, system_id, flag == "1")
        return table

    def to_delimited(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["question_id", "system_id", "correct"])
        for (question_id, system_id), correct in sorted(self._records.items()):
            writer.writerow([question_id, system_id, "1" if correct else "0"])
        return out.getvalue()

    @classmethod
    def from_dict(cls, document: Mapping) -> "OutcomeTable":
        table = cls()
        for system in document.get("systems", []):
            if system not in table.systems:
                table.systems.append(system)
        for record in document.get("records", []):
            table.add(record["question_id"], record["system_id"], bool(record["correct"]))
        return table

    def to_dict(self) -> dict:
        return {
            "systems": list(self.systems),
            "records": [
                {"question_id": q, "system_id": s, "correct": v}
                for (q, s), v in sorted(self._records.items())
            ],
        }


# ---------------------------------------------------------------------------
# The partially overlapping samples z-test


def _paired_phi(a: Sequence[bool], b: Sequence[bool]) -> float:
    """Pearson correlation of two binary vectors; 0 when a margin is constant."""
    n11 = n10 = n01 = n00 = 0
    for x, y in zip(a, b):
        if x and y:
            n11 += 1
        elif x and not y:
            n10 += 1
        elif not x and y:
            n01 += 1
        else:
            n00 += 1
    denom = (n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00)
    if denom == 0:
        return 0.0
    return (n11 * n00 - n10 * n01) / math.sqrt(denom)


@dataclass(frozen=True)
class _PropTest:
    z: float
    p: float
    n_paired: int
    n_only_a: int
    n_only_b: int


def _prop_test(a: Mapping[str, bool], b: Mapping[str, bool]) -> _PropTest:
    if len(a) == 0 or len(b) == 0:
        raise DomainError("a system with zero observations cannot be tested")
    if len(a) < 2 or len(b) < 2:
        raise DomainError("need at least 2 observations per system")
    paired_ids = sorted(set(a) & set(b))
    only_a = [q for q in a if q not in b]
    only_b = [q for q in b if q not in a]
    n_paired = len(paired_ids)
    if n_paired == 0 and (len(only_a) == 0 or len(only_b) == 0):
        raise DomainError("samples share no questions and one side has no unpaired observations")

    n1 = len(a)
    n2 = len(b)
    x1 = sum(a.values())
    x2 = sum(b.values())
    p1 = x1 / n1
    p2 = x2 / n2
    pooled = (x1 + x2) / (n1 + n2)
    phi = _paired_phi([a[q] for q in paired_ids], [b[q] for q in paired_ids])
    variance = pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2 - 2.0 * n_paired * phi / (n1 * n2))
    if variance <= 0.0 or not math.isfinite(variance):
        if p1 == p2:
            return _PropTest(0.0, 1.0, n_paired, len(only_a), len(only_b))
        raise DomainError("degenerate variance: zero variance with unequal proportions")
    z = (p1 - p2) / math.sqrt(variance)
    return _PropTest(z, normal_two_sided_p(z), n_paired, len(only_a), len(only_b))


def partially_overlapping_prop_test(
    a: Mapping[str, bool], b: Mapping[str, bool]
) -> tuple[float, float]:
    """Compare two correctness proportions using all observations.

    ``a`` and ``b`` map question ids to correctness; questions present in
    both systems form the paired portion.  Returns (z, two-sided p).
    """
    result = _prop_test(a, b)
    return result.z, result.p


# ---------------------------------------------------------------------------
# Multiplicity adjustment and the pairwise matrix


def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Holm step-down adjusted p-values, returned in the input order.

    Sorted ascending (stable, so ties keep input order and end up equal),
    each p is scaled by the number of hypotheses not yet rejected, capped at
    1, and forced nondecreasing along the sorted order.
    """
    for p in p_values:
        if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
            raise DomainError(f"p-value out of range: {p!r}")
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, index in enumerate(order):
        running = max(running, min(1.0, p_values[index] * (m - rank)))
        adjusted[index] = running
    return adjusted


@dataclass(frozen=True)
class PairwiseResult:
    system_a: str
    system_b: str
    z: float
    p_raw: float
    p_adj: float
    n_paired: int
    n_only_a: int
    n_only_b: int


@dataclass
class PairwiseMatrix:
    """Symmetric matrix of pairwise contrasts; per-pair failures become
    annotated cells rather than aborting the whole matrix."""

    systems: list[str]
    cells: dict[tuple[str, str], PairwiseResult] = field(default_factory=dict)
    errors: dict[tuple[str, str], str] = field(default_factory=dict)

    def get(self, system_a: str, system_b: str) -> Optional[PairwiseResult]:
        if (system_a, system_b) in self.cells:
            return self.cells[(system_a, system_b)]
        if (system_b, system_a) in self.cells:
            cell = self.cells[(system_b, system_a)]
            return PairwiseResult(
                system_a=system_a,
                system_b=system_b,
                z=-cell.z,
                p_raw=cell.p_raw,
                p_adj=cell.p_adj,
                n_paired=cell.n_paired,
                n_only_a=cell.n_only_b,
                n_only_b=cell.n_only_a,
            )
        return None

    def error(self, system_a: str, system_b: str) -> Optional[str]:
        return self.errors.get((system_a, system_b)) or self.errors.get((system_b, system_a))

    def to_dict(self) -> dict:
        return {
            "systems": list(self.systems),
            "pairs": [
                {
                    "system_a": cell.system_a,
                    "system_b": cell.system_b,
                    "z": cell.z,
                    "p_raw": cell.p_raw,
                    "p_adj": cell.p_adj,
                    "n_paired": cell.n_paired,
                    "n_only_a": cell.n_only_a,
                    "n_only_b": cell.n_only_b,
                }
                for _, cell in sorted(self.cells.items())
            ],
            "errors": [
                {"system_a": a, "system_b": b, "message": message}
                for (a, b), message in sorted(self.errors.items())
            ],
        }

    def to_csv(self) -> str:
        """Full-precision matrix of adjusted p-values (diagonal empty)."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([""] + self.systems)
        for row_system in self.systems:
            row: list[str] = [row_system]
            for col_system in self.systems:
                if row_system == col_system:
                    row.append("")
                    continue
                cell = self.get(row_system, col_system)
                if cell is None:
                    row.append("error: " + (self.error(row_system, col_system) or "missing"))
                else:
                    row.append(repr(cell.p_adj))
            writer.writerow(row)
        return out.getvalue()


def pairwise_matrix(table: OutcomeTable) -> PairwiseMatrix:
    """All-pairs z-tests with a joint Holm adjustment over the raw p-values."""
    if len(table.systems) < 2:
        raise DomainError("pairwise comparison needs at least 2 systems")
    matrix = PairwiseMatrix(systems=list(table.systems))
    raw: list[tuple[tuple[str, str], _PropTest]] = []
    for i, system_a in enumerate(table.systems):
        for system_b in table.systems[i + 1 :]:
            try:
                result = _prop_test(table.outcomes(system_a), table.outcomes(system_b))
            except DomainError as exc:
                matrix.errors[(system_a, system_b)] = str(exc)
                continue
            raw.append(((system_a, system_b), result))
    adjusted = holm_adjust([result.p for _, result in raw])
    for ((system_a, system_b), result), p_adj in zip(raw, adjusted):
        matrix.cells[(system_a, system_b)] = PairwiseResult(
            system_a=system_a,
            system_b=system_b,
            z=result.z,
            p_raw=result.p,
            p_adj=p_adj,
            n_paired=result.n_paired,
            n_only_a=result.n_only_a,
            n_only_b=result.n_only_b,
        )
    return matrix


def format_p_display(p: float) -> str:
    """3-decimal display form used in rendered reports; '0.000' means <0.0005.

    Presentation only: stored and serialized values keep full precision.
    """
    return f"{p:.3f}"
