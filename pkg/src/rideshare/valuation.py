"""Clause-based valuation language over allocation outcomes and commitment
probabilities.

A valuation is an ordered list of clauses. The first clause whose outcome
pattern matches the owner's assignment decides the value: excluded clauses
mark the outcome as unacceptable, threshold gates zero the value when a
probability misses a bound, and otherwise the monomial terms are summed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .model import Allocation, Assignment, CommuterId, Role, all_none_allocation

LINEARITY_TOLERANCE = 1e-9
INDEPENDENCE_TOLERANCE = 1e-12

_EMPTY: frozenset[int] = frozenset()


class _Excluded:
    """Sentinel for outcomes a commuter rules out entirely."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "Excluded"


EXCLUDED = _Excluded()


@dataclass(frozen=True)
class AnyPartners:
    pass


@dataclass(frozen=True)
class ExactPartners:
    partners: frozenset[CommuterId]


@dataclass(frozen=True)
class PartnerCountAtLeast:
    count: int


PartnerConstraint = Union[AnyPartners, ExactPartners, PartnerCountAtLeast]


@dataclass(frozen=True)
class OutcomePattern:
    own_role: Role
    partner_constraint: PartnerConstraint = AnyPartners()


class GateDirection(Enum):
    AT_LEAST = "at_least"
    BELOW = "below"


@dataclass(frozen=True)
class ThresholdGate:
    subject: CommuterId
    bound: float
    direction: GateDirection


@dataclass(frozen=True)
class Monomial:
    """coefficient * product of p[subject] ** exponent. Empty factors make
    a constant term."""

    coefficient: float
    factors: tuple[tuple[CommuterId, int], ...] = ()


@dataclass(frozen=True)
class Clause:
    pattern: OutcomePattern
    gates: tuple[ThresholdGate, ...] = ()
    terms: tuple[Monomial, ...] = ()
    excluded: bool = False


@dataclass(frozen=True)
class ValuationSpec:
    owner: CommuterId
    clauses: tuple[Clause, ...]
    default_value: float = 0.0


def _matches(pattern: OutcomePattern, assignment: Assignment) -> bool:
    if pattern.own_role is not assignment.role:
        return False
    c = pattern.partner_constraint
    if isinstance(c, AnyPartners):
        return True
    if isinstance(c, ExactPartners):
        return assignment.partners == c.partners
    return len(assignment.partners) >= c.count


def evaluate(
    spec: ValuationSpec,
    allocation: Allocation,
    p: Sequence[float],
    absent: frozenset[int] = _EMPTY,
):
    """Value of `allocation` to the spec's owner at probability vector `p`.

    Returns a float, or EXCLUDED when the first matching clause is excluded.
    Exclusion depends only on the outcome pattern, never on probabilities.
    Commuters in `absent` are treated as missing: factors on them evaluate
    to zero and gates on them fail.
    """
    assignment = allocation.assignments[spec.owner]
    for clause in spec.clauses:
        if not _matches(clause.pattern, assignment):
            continue
        if clause.excluded:
            return EXCLUDED
        for gate in clause.gates:
            if gate.subject in absent:
                return 0.0
            v = p[gate.subject]
            passed = v >= gate.bound if gate.direction is GateDirection.AT_LEAST else v < gate.bound
            if not passed:
                return 0.0
        total = 0.0
        for term in clause.terms:
            x = term.coefficient
            for subject, exponent in term.factors:
                if subject in absent:
                    x = 0.0
                    break
                v = p[subject]
                x *= v if exponent == 1 else v**exponent
            total += x
        return total
    return spec.default_value


def substitute(p: Sequence[float], i: CommuterId, value: float) -> tuple[float, ...]:
    out = list(p)
    out[i] = value
    return tuple(out)


def spec_violations(spec: ValuationSpec, n: int, expected_owner: CommuterId | None = None) -> list[str]:
    """Structural checks a spec must pass before it is evaluated."""
    out: list[str] = []
    if expected_owner is not None and spec.owner != expected_owner:
        out.append(f"owner {spec.owner} does not match commuter {expected_owner}")
    if not 0 <= spec.owner < n:
        out.append(f"owner {spec.owner} out of range")
    for ci, clause in enumerate(spec.clauses):
        c = clause.pattern.partner_constraint
        if isinstance(c, ExactPartners):
            if spec.owner in c.partners:
                out.append(f"clause {ci}: exact partners include the owner")
            if any(j < 0 or j >= n for j in c.partners):
                out.append(f"clause {ci}: exact partner id out of range")
        elif isinstance(c, PartnerCountAtLeast) and c.count < 1:
            out.append(f"clause {ci}: partner count bound must be at least 1")
        for gate in clause.gates:
            if not 0 <= gate.subject < n:
                out.append(f"clause {ci}: gate subject {gate.subject} out of range")
            if not 0.0 <= gate.bound <= 1.0:
                out.append(f"clause {ci}: gate bound {gate.bound} outside [0, 1]")
        for term in clause.terms:
            for subject, exponent in term.factors:
                if not 0 <= subject < n:
                    out.append(f"clause {ci}: factor subject {subject} out of range")
                if exponent < 1:
                    out.append(f"clause {ci}: factor exponent {exponent} below 1")
        if clause.excluded and clause.terms:
            out.append(f"clause {ci}: excluded clause carries terms")
        if clause.excluded and clause.gates:
            out.append(f"clause {ci}: excluded clause carries gates")
    if not out:
        # travelling alone must always be an acceptable fallback
        if evaluate(spec, all_none_allocation(n), [0.0] * n) is EXCLUDED:
            out.append("the all-none outcome is excluded")
    return out


def referenced_subjects(spec: ValuationSpec) -> tuple[CommuterId, ...]:
    """Owner plus every commuter whose probability the spec reads.
    Excluded clauses never contribute a value, so they are ignored."""
    subjects = {spec.owner}
    for clause in spec.clauses:
        if clause.excluded:
            continue
        for gate in clause.gates:
            subjects.add(gate.subject)
        for term in clause.terms:
            for subject, _ in term.factors:
                subjects.add(subject)
    return tuple(sorted(subjects))


def is_external_commit_independent(spec: ValuationSpec) -> bool:
    """True when no gate or factor reads another commuter's probability."""
    return all(subject == spec.owner for subject in referenced_subjects(spec))


def is_linear_in_commitment(spec: ValuationSpec) -> bool:
    """True when every factor has exponent 1 and every gate is vacuous over
    [0, 1]. Such specs are affine in each probability coordinate. A gate
    with 0 < bound <= 1 flips somewhere on the interval (for either
    direction), so it bends the value and disqualifies the spec."""
    for clause in spec.clauses:
        if clause.excluded:
            continue
        for gate in clause.gates:
            if 0.0 < gate.bound <= 1.0:
                return False
        for term in clause.terms:
            for _, exponent in term.factors:
                if exponent != 1:
                    return False
    return True


def _lattice(spec: ValuationSpec, allocation: Allocation, grid: int):
    if grid < 3:
        raise ValueError(f"grid must be at least 3, got {grid}")
    n = len(allocation.assignments)
    subjects = referenced_subjects(spec)[:4]
    points = [k / (grid - 1) for k in range(grid)]
    base = [0.5] * n
    for combo in itertools.product(points, repeat=len(subjects)):
        p = list(base)
        for subject, value in zip(subjects, combo):
            p[subject] = value
        yield subjects, tuple(p)


def linearity_residual(spec: ValuationSpec, allocation: Allocation, grid: int = 5) -> float:
    """Worst absolute gap between the value and its coordinate-wise affine
    interpolation over a grid lattice. Zero (up to noise) means linear.
    Returns 0.0 outright when the outcome is excluded for the owner."""
    if evaluate(spec, allocation, [0.5] * len(allocation.assignments)) is EXCLUDED:
        return 0.0
    worst = 0.0
    for subjects, p in _lattice(spec, allocation, grid):
        v = evaluate(spec, allocation, p)
        for j in subjects:
            v1 = evaluate(spec, allocation, substitute(p, j, 1.0))
            v0 = evaluate(spec, allocation, substitute(p, j, 0.0))
            residual = abs(v - (p[j] * v1 + (1.0 - p[j]) * v0))
            if residual > worst:
                worst = residual
    return worst


def check_linearity_numeric(spec: ValuationSpec, allocation: Allocation, grid: int = 5) -> bool:
    return linearity_residual(spec, allocation, grid) <= LINEARITY_TOLERANCE


def independence_spread(spec: ValuationSpec, allocation: Allocation, grid: int = 5) -> float:
    """Worst value spread across others' probabilities with the owner's
    probability held fixed, over a grid lattice."""
    if evaluate(spec, allocation, [0.5] * len(allocation.assignments)) is EXCLUDED:
        return 0.0
    subjects = referenced_subjects(spec)[:4]
    others = [j for j in subjects if j != spec.owner]
    if not others:
        return 0.0
    if grid < 3:
        raise ValueError(f"grid must be at least 3, got {grid}")
    n = len(allocation.assignments)
    points = [k / (grid - 1) for k in range(grid)]
    worst = 0.0
    for own in points:
        lo = hi = None
        for combo in itertools.product(points, repeat=len(others)):
            p = [0.5] * n
            p[spec.owner] = own
            for subject, value in zip(others, combo):
                p[subject] = value
            v = evaluate(spec, allocation, p)
            if lo is None or v < lo:
                lo = v
            if hi is None or v > hi:
                hi = v
        worst = max(worst, hi - lo)
    return worst


def check_independence_numeric(spec: ValuationSpec, allocation: Allocation, grid: int = 5) -> bool:
    return independence_spread(spec, allocation, grid) <= INDEPENDENCE_TOLERANCE
