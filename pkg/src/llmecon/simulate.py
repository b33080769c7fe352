"""Monte Carlo oracle for the attempt/validate/retry-or-fallback process.

Each trial plays the interaction literally: pay g + v for an attempt, end on
success, otherwise retry with probability r or pay h for a manual answer and
end.  The sample mean over many trials estimates the closed-form extended
cost-of-pass independently of its algebra.

Reproducibility is a contract: the generator is numpy's PCG64 seeded from
SeedSequence(entropy=seed, spawn_key=(stream,)), so identical inputs give
bit-identical reports on any platform.  Trials can be partitioned into
independent streams for parallel runs; aggregation is order-independent
because all sums are exactly rounded (math.fsum).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .econ import EconomicsParams
from .errors import DomainError

RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    mean_cost: float
    std_error: float
    attempts_histogram: dict[int, int]
    fallback_rate: float
    seed: int
    streams: int = 1
    rng: str = RNG_ALGORITHM

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_cost": self.mean_cost,
            "std_error": self.std_error,
            "attempts_histogram": {str(k): v for k, v in sorted(self.attempts_histogram.items())},
            "fallback_rate": self.fallback_rate,
            "seed": self.seed,
            "streams": self.streams,
            "rng": self.rng,
        }


@dataclass
class _StreamResult:
    costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    attempts: Counter = field(default_factory=Counter)
    fallbacks: int = 0


def _run_stream(p: EconomicsParams, trials: int, seed: int, stream: int) -> _StreamResult:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(stream,))))
    per_attempt = p.g + p.v
    cost = np.zeros(trials)
    attempts = np.zeros(trials, dtype=np.int64)
    fallback = np.zeros(trials, dtype=bool)
    alive = np.arange(trials)
    while alive.size:
        attempts[alive] += 1
        cost[alive] += per_attempt
        succeeded = rng.random(alive.size) < p.s
        failed = alive[~succeeded]
        if failed.size:
            retry = rng.random(failed.size) < p.r
            giving_up = failed[~retry]
            cost[giving_up] += p.h
            fallback[giving_up] = True
            alive = failed[retry]
        else:
            alive = failed
    result = _StreamResult()
    result.costs = cost
    values, counts = np.unique(attempts, return_counts=True)
    result.attempts = Counter(dict(zip(values.tolist(), counts.tolist())))
    result.fallbacks = int(fallback.sum())
    return result


def simulate(p: EconomicsParams, trials: int, seed: int, streams: int = 1) -> SimulationReport:
    """Run ``trials`` independent plays of the process and report sample stats.

    The r=1, s=0 combination is rejected up front: such a trial may never
    terminate.
    """
    if p.r == 1.0 and p.s == 0.0:
        raise DomainError("non-terminating retry loop: r=1 and s=0")
    if trials < 1:
        raise DomainError(f"trials must be at least 1: {trials!r}")
    if seed < 0:
        raise DomainError(f"seed must be a nonnegative integer: {seed!r}")
    if not (1 <= streams <= trials):
        raise DomainError(f"streams must be between 1 and trials: {streams!r}")

    base, remainder = divmod(trials, streams)
    sizes = [base + (1 if i < remainder else 0) for i in range(streams)]
    results = [_run_stream(p, size, seed, stream) for stream, size in enumerate(sizes) if size]

    all_costs = np.concatenate([r.costs for r in results])
    mean = math.fsum(all_costs.tolist()) / trials
    if trials > 1 and all_costs.min() != all_costs.max():
        variance = math.fsum(((c - mean) ** 2 for c in all_costs.tolist())) / (trials - 1)
    else:
        variance = 0.0
    histogram: Counter = Counter()
    fallbacks = 0
    for r in results:
        histogram.update(r.attempts)
        fallbacks += r.fallbacks

    return SimulationReport(
        trials=trials,
        mean_cost=mean,
        std_error=math.sqrt(variance / trials),
        attempts_histogram=dict(sorted(histogram.items())),
        fallback_rate=fallbacks / trials,
        seed=seed,
        streams=streams,
    )
