"""Seeded Monte Carlo over commitment draws, plus exact enumeration.

Commitment bits come from a counter-based generator keyed by
(seed, trial, commuter), so any draw can be recomputed in isolation and
runs are reproducible regardless of evaluation order or platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .model import CommuterId, Scenario
from .payments import Conditional, ExcludedValueError, PaymentSchedule, Unconditional
from .valuation import EXCLUDED, evaluate

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _u01(seed: int, trial: int, commuter: int) -> float:
    h = _splitmix64(seed & _MASK)
    h = _splitmix64(h ^ (trial & _MASK))
    h = _splitmix64(h ^ (commuter & _MASK))
    return (h >> 11) * 2.0**-53


CommitVector = tuple[int, ...]


def realize(p: Sequence[float], seed: int, trial: int = 0) -> CommitVector:
    """Draw one commitment vector: bit k is 1 with probability p[k]."""
    return tuple(1 if _u01(seed, trial, k) < p[k] else 0 for k in range(len(p)))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    commit: CommitVector
    values: tuple[float | None, ...]
    payments: tuple[float, ...]
    utilities: tuple[float | None, ...]
    welfare: float
    deficit: float
    flagged: bool


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    flagged: int
    mean_commit: tuple[float, ...]
    mean_value: tuple[float, ...]
    mean_payment: tuple[float, ...]
    mean_utility: tuple[float, ...]
    stderr_utility: tuple[float, ...]
    mean_welfare: float
    mean_deficit: float


def _charge(entry, bit: int) -> float:
    if isinstance(entry, Unconditional):
        return entry.amount
    return entry.on_commit if bit else entry.on_fail


def _single_trial(s: Scenario, schedule: PaymentSchedule, seed: int, t: int) -> TrialRecord:
    commit = realize(s.true_p(), seed, t)
    degenerate = tuple(float(b) for b in commit)
    values: list[float | None] = []
    payments: list[float] = []
    utilities: list[float | None] = []
    flagged = False
    for k, c in enumerate(s.commuters):
        v = evaluate(c.true_type.valuation, schedule.allocation, degenerate)
        charge = _charge(schedule.entries[k], commit[k])
        payments.append(charge)
        if v is EXCLUDED:
            values.append(None)
            utilities.append(None)
            flagged = True
        else:
            values.append(v)
            utilities.append(v - charge)
    welfare = math.fsum(v for v in values if v is not None)
    deficit = -math.fsum(payments)
    return TrialRecord(
        t, seed, commit, tuple(values), payments=tuple(payments),
        utilities=tuple(utilities), welfare=welfare, deficit=deficit, flagged=flagged,
    )


def _mean(xs: list[float]) -> float:
    return math.fsum(xs) / len(xs) if xs else 0.0


def _stderr(xs: list[float]) -> float:
    if len(xs) < 2:
        return 0.0
    m = _mean(xs)
    var = math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)
    return math.sqrt(var / len(xs))


def run_trials(
    s: Scenario, schedule: PaymentSchedule, trials: int, seed: int
) -> tuple[list[TrialRecord], SimulationSummary]:
    """Simulate settlement over `trials` independent commitment draws.

    Trials where some commuter's true valuation excludes the realized
    outcome carry no number for that commuter; such trials are flagged and
    left out of the summary means. Summaries reduce with exact summation,
    so they do not depend on accumulation order.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    records = [_single_trial(s, schedule, seed, t) for t in range(trials)]
    clean = [r for r in records if not r.flagged]
    n = s.n
    mean_commit = tuple(_mean([float(r.commit[k]) for r in clean]) for k in range(n))
    mean_value = tuple(_mean([r.values[k] for r in clean]) for k in range(n))
    mean_payment = tuple(_mean([r.payments[k] for r in clean]) for k in range(n))
    mean_utility = tuple(_mean([r.utilities[k] for r in clean]) for k in range(n))
    stderr_utility = tuple(_stderr([r.utilities[k] for r in clean]) for k in range(n))
    summary = SimulationSummary(
        trials=trials,
        flagged=len(records) - len(clean),
        mean_commit=mean_commit,
        mean_value=mean_value,
        mean_payment=mean_payment,
        mean_utility=mean_utility,
        stderr_utility=stderr_utility,
        mean_welfare=_mean([r.welfare for r in clean]),
        mean_deficit=_mean([r.deficit for r in clean]),
    )
    return records, summary


def exact_expected_utilities(s: Scenario, schedule: PaymentSchedule) -> tuple[float, ...]:
    """Expected utilities by summing over all 2**n commitment vectors,
    weighted by the true commitment probabilities. Exact counterpart to
    the Monte Carlo mean; practical for small scenarios only."""
    n = s.n
    p = s.true_p()
    totals = [[] for _ in range(n)]
    for commit in product((0, 1), repeat=n):
        weight = 1.0
        for k in range(n):
            weight *= p[k] if commit[k] else 1.0 - p[k]
        degenerate = tuple(float(b) for b in commit)
        for k, c in enumerate(s.commuters):
            v = evaluate(c.true_type.valuation, schedule.allocation, degenerate)
            if v is EXCLUDED:
                raise ExcludedValueError(
                    f"commuter {k}: true valuation excludes the settled allocation"
                )
            totals[k].append(weight * (v - _charge(schedule.entries[k], commit[k])))
    return tuple(math.fsum(xs) for xs in totals)
