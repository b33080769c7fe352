"""Expected-cost models for LLM-assisted task completion.

A system that answers correctly with probability ``s`` at cost ``g`` per
attempt has an expected cost per correct answer of ``g / s``.  The extended
model adds a human validation cost ``v`` paid on every attempt, a bounded
willingness ``r`` to rerun after a failure, and a manual-fallback cost ``h``
paid when the user gives up on the system:

    cop_ex = (g + v + h*(1-r)*(1-s)) / (1 - r*(1-s))

Everything here is a pure function over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import DomainError

SWEEP_AXES = ("g", "v", "h", "r", "s")


def _require_finite_nonnegative(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0.0):
        raise DomainError(f"cost must be a finite nonnegative number: {name}={value!r}")


@dataclass(frozen=True)
class EconomicsParams:
    """Inputs of the retry/fallback cost model (money in USD).

    g: expected generation cost of one pipeline execution
    v: human validation cost charged on every attempt
    h: human cost of answering manually (the fallback)
    r: rerun willingness after a failed attempt, in [0, 1]
    s: expected success rate of one attempt, in [0, 1]
    """

    g: float
    v: float
    h: float
    r: float
    s: float

    def __post_init__(self):
        _require_finite_nonnegative("g", self.g)
        _require_finite_nonnegative("v", self.v)
        _require_finite_nonnegative("h", self.h)
        if not (isinstance(self.r, (int, float)) and 0.0 <= self.r <= 1.0):
            raise DomainError(f"rerun willingness out of range: r={self.r!r}")
        if not (isinstance(self.s, (int, float)) and 0.0 <= self.s <= 1.0):
            raise DomainError(f"success rate out of range: s={self.s!r}")


@dataclass(frozen=True)
class CopResult:
    """Extended cost-of-pass value plus diagnostics."""

    cop_ex: float
    denominator: float  # 1 - r*(1-s), the retry-loop contraction factor
    beats_human: bool


@dataclass(frozen=True)
class SweepRow:
    value: float
    result: CopResult


def cost_of_pass(g: float, s: float) -> float:
    """Expected cost per correct answer of a bare stochastic producer: g / s."""
    _require_finite_nonnegative("g", g)
    if not (isinstance(s, (int, float)) and 0.0 < s <= 1.0):
        raise DomainError(f"success rate out of range: s={s!r}")
    return g / s


def extended_cost_of_pass(p: EconomicsParams) -> CopResult:
    """Closed form of the attempt/validate/retry-or-fallback process.

    Raises DomainError for r=1 with s=0, where the retry loop never
    terminates; every other valid parameter combination is finite.
    """
    if p.r == 1.0 and p.s == 0.0:
        raise DomainError("non-terminating retry loop: r=1 and s=0")
    # (1-r) + r*s equals 1 - r*(1-s) but sums two nonnegative terms, so the
    # full-retry case (r=1) divides by s itself rather than by 1-(1-s).
    denominator = (1.0 - p.r) + p.r * p.s
    numerator = (p.g + p.v) + p.h * (1.0 - p.r) * (1.0 - p.s)
    cop_ex = numerator / denominator
    return CopResult(cop_ex=cop_ex, denominator=denominator, beats_human=cop_ex < p.h)


def break_even_accuracy(g: float, v: float, h: float) -> Optional[float]:
    """Success rate at which the extended cost-of-pass equals the human cost.

    The root is (g + v) / h and does not depend on the rerun willingness.
    Returns None when g + v >= h: no accuracy makes the system cheaper than
    answering manually.
    """
    _require_finite_nonnegative("g", g)
    _require_finite_nonnegative("v", v)
    if not (isinstance(h, (int, float)) and math.isfinite(h) and h > 0.0):
        raise DomainError(f"human cost must be positive: h={h!r}")
    if g + v >= h:
        return None
    return (g + v) / h


def sweep(base: EconomicsParams, axis: str, grid: Sequence[float]) -> list[SweepRow]:
    """Evaluate the extended cost-of-pass along one parameter axis.

    The whole grid is validated before anything is computed, so a bad value
    produces an error and no partial table.
    """
    if axis not in SWEEP_AXES:
        raise DomainError(f"unknown sweep axis: {axis!r} (expected one of {', '.join(SWEEP_AXES)})")
    points = []
    for value in grid:
        try:
            candidate = replace(base, **{axis: value})
        except DomainError as exc:
            raise DomainError(f"value out of range: {axis}={value!r}") from exc
        if candidate.r == 1.0 and candidate.s == 0.0:
            raise DomainError(f"value out of range: {axis}={value!r} (non-terminating retry loop)")
        points.append(candidate)
    return [SweepRow(value=value, result=extended_cost_of_pass(p)) for value, p in zip(grid, points)]
