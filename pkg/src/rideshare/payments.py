"""Payment rules layered on the efficient allocation.

Groves payments charge each commuter the pivot term minus everyone else's
reported value at the chosen allocation. Commit-based payments replace the
single charge with a pair settled on whether the commuter actually shows
up, computed by substituting their commitment with certainty one or zero.
Positive amounts are paid to the system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .allocation import WelfareReport, efficient_allocation, efficient_allocation_excluding
from .model import Allocation, CommuterId, Scenario
from .valuation import EXCLUDED, evaluate, substitute


class PivotRule(Enum):
    ZERO = "zero"
    CLARKE = "clarke"


@dataclass(frozen=True)
class Unconditional:
    amount: float


@dataclass(frozen=True)
class Conditional:
    on_commit: float
    on_fail: float


PaymentEntry = Union[Unconditional, Conditional]


@dataclass(frozen=True)
class PaymentSchedule:
    """Per-commuter payment entries plus the allocation they settle."""

    entries: tuple[PaymentEntry, ...]
    allocation: Allocation


class ExcludedValueError(ValueError):
    """A commuter's true valuation excludes the allocation being scored."""


def _others_value(rep: WelfareReport, i: CommuterId) -> float:
    return math.fsum(v for j, v in enumerate(rep.per_commuter) if j != i)


def _groves_entry(h: float, rep: WelfareReport, i: CommuterId) -> Unconditional:
    return Unconditional(h - _others_value(rep, i))


def _commit_entry(s: Scenario, h: float, rep: WelfareReport, i: CommuterId) -> Conditional:
    p_hat = s.reported_p()
    p_one = substitute(p_hat, i, 1.0)
    p_zero = substitute(p_hat, i, 0.0)
    v_one = []
    v_zero = []
    for j, c in enumerate(s.commuters):
        if j == i:
            continue
        spec = c.reported_type.valuation
        a = evaluate(spec, rep.allocation, p_one)
        b = evaluate(spec, rep.allocation, p_zero)
        # exclusion is pattern-only, and the chosen allocation excluded nobody
        assert a is not EXCLUDED and b is not EXCLUDED
        v_one.append(a)
        v_zero.append(b)
    return Conditional(h - math.fsum(v_one), h - math.fsum(v_zero))


def groves_payments(
    s: Scenario, pivot: PivotRule, public_p: Sequence[float] | None = None
) -> PaymentSchedule:
    """One unconditional charge per commuter. With `public_p` supplied, the
    given probabilities replace the reported ones in every evaluation, both
    for the allocation and for the payments."""
    rep = efficient_allocation(s, p_override=public_p)
    entries = []
    for i in range(s.n):
        if pivot is PivotRule.CLARKE:
            h = efficient_allocation_excluding(s, i, p_override=public_p).welfare
        else:
            h = 0.0
        entries.append(_groves_entry(h, rep, i))
    return PaymentSchedule(tuple(entries), rep.allocation)


def commit_payments(s: Scenario) -> PaymentSchedule:
    """Commitment-settled pair per commuter: the pivot is everyone else's
    best welfare without them, and each branch credits the others' reported
    value with the commuter's commitment forced to one or zero."""
    rep = efficient_allocation(s)
    entries = []
    for i in range(s.n):
        h = efficient_allocation_excluding(s, i).welfare
        entries.append(_commit_entry(s, h, rep, i))
    return PaymentSchedule(tuple(entries), rep.allocation)


def _unconditional_utility(s: Scenario, i: CommuterId, a: Allocation, amount: float) -> float:
    p = s.true_p()
    v = evaluate(s.commuters[i].true_type.valuation, a, p)
    if v is EXCLUDED:
        raise ExcludedValueError(f"commuter {i}: true valuation excludes the chosen allocation")
    return v - amount


def _conditional_utility(s: Scenario, i: CommuterId, a: Allocation, entry: Conditional) -> float:
    p = s.true_p()
    spec = s.commuters[i].true_type.valuation
    v_one = evaluate(spec, a, substitute(p, i, 1.0))
    v_zero = evaluate(spec, a, substitute(p, i, 0.0))
    if v_one is EXCLUDED or v_zero is EXCLUDED:
        raise ExcludedValueError(f"commuter {i}: true valuation excludes the chosen allocation")
    pi = p[i]
    return pi * (v_one - entry.on_commit) + (1.0 - pi) * (v_zero - entry.on_fail)


def expected_utility(s: Scenario, i: CommuterId, schedule: PaymentSchedule) -> float:
    """Quasilinear expected utility of commuter `i` under their true type,
    evaluated at the schedule's allocation with true probabilities.

    Raises ExcludedValueError when the true valuation excludes that
    allocation; callers decide whether that is a modelling error (truthful
    reports) or a searched-over outcome to flag (misreports).
    """
    entry = schedule.entries[i]
    if isinstance(entry, Unconditional):
        return _unconditional_utility(s, i, schedule.allocation, entry.amount)
    return _conditional_utility(s, i, schedule.allocation, entry)
