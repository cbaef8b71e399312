"""Brute-force deviation audits for truthfulness, plus a suite of bundled
scenarios with known verdicts.

An audit sweeps a commuter's report over a finite deviation grid (commitment
probability points crossed with coefficient rescalings, optionally gate
edits) and compares true expected utility against truthful reporting. The
ex-post notion holds everyone else truthful; the dominant notion additionally
sweeps every opponent over a grid of misreports. A grid search can only ever
certify "no violation found", never truthfulness itself; a reported
violation, on the other hand, comes with a witness that replays exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from enum import Enum

from .allocation import efficient_allocation, efficient_allocation_excluding
from .model import CommuterId, Scenario, TripType, with_report, with_truthful_reports
from .payments import (
    ExcludedValueError,
    _commit_entry,
    _conditional_utility,
    _groves_entry,
    _unconditional_utility,
)
from .valuation import Clause, GateDirection, Monomial, ThresholdGate, ValuationSpec

GAIN_TOLERANCE = 1e-9
MAX_DOMINANT_COMMUTERS = 4
_MAX_SCALE_COMBOS = 4096


class Mechanism(Enum):
    GROVES_ZERO = "groves-zero"
    GROVES_CLARKE = "groves-clarke"
    GROVES_CLARKE_PUBLIC_P = "groves-clarke-public-p"
    COMMIT_BASED = "commit"


class Notion(Enum):
    DOMINANT = "dominant"
    EX_POST = "expost"


class Verdict(Enum):
    NO_VIOLATION_FOUND = "no-violation-found"
    VIOLATED = "violated"


class AuditSizeError(ValueError):
    """The dominant sweep was refused because it would not terminate in
    reasonable time."""


@dataclass(frozen=True)
class DeviationSpace:
    """Finite grid of candidate misreports for one commuter.

    p_grid evenly spaced probability points over [0, 1]; every monomial
    coefficient is rescaled by each multiplier (cartesian across monomials,
    falling back to uniform rescaling when that product explodes). With
    gate_toggles set, variants that drop existing threshold gates or add a
    mid-range gate on a referenced commuter are tried as well.
    """

    p_grid: int = 21
    coefficient_scales: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 10.0)
    gate_toggles: bool = False

    def __post_init__(self) -> None:
        if self.p_grid < 2:
            raise ValueError(f"p_grid must be at least 2, got {self.p_grid}")
        for scale in self.coefficient_scales:
            if not math.isfinite(scale):
                raise ValueError(f"coefficient scales must be finite, got {scale!r}")


@dataclass(frozen=True)
class Deviation:
    trip: TripType
    encoding: tuple[int, ...]


@dataclass(frozen=True)
class Witness:
    commuter: CommuterId
    report: TripType
    truthful_utility: float
    deviated_utility: float
    gain: float
    opponent_reports: tuple[tuple[CommuterId, TripType], ...] = ()


@dataclass(frozen=True)
class AuditReport:
    mechanism: Mechanism
    notion: Notion
    verdict: Verdict
    witness: Witness | None
    space: DeviationSpace
    opponent_space: DeviationSpace | None = None
    excluded_deviations: int = 0


def _scaled_spec(spec: ValuationSpec, combo: tuple[float, ...]) -> ValuationSpec:
    it = iter(combo)
    clauses = []
    for clause in spec.clauses:
        terms = tuple(Monomial(next(it) * t.coefficient, t.factors) for t in clause.terms)
        clauses.append(replace(clause, terms=terms))
    return replace(spec, clauses=tuple(clauses))


def _scale_combos(spec: ValuationSpec, scales: tuple[float, ...]) -> list[tuple[float, ...]]:
    m = sum(len(c.terms) for c in spec.clauses)
    identity = (1.0,) * m
    if m == 0:
        return [identity]
    if len(scales) ** m > _MAX_SCALE_COMBOS:
        combos = [(s,) * m for s in scales if s != 1.0]
    else:
        combos = [c for c in itertools.product(scales, repeat=m) if c != identity]
    return [identity] + combos


def _gate_variants(spec: ValuationSpec) -> list[ValuationSpec]:
    variants = [spec]
    positions = [
        (ci, gi)
        for ci, clause in enumerate(spec.clauses)
        for gi in range(len(clause.gates))
    ]
    for ci, gi in positions:
        clauses = list(spec.clauses)
        gates = tuple(g for k, g in enumerate(clauses[ci].gates) if k != gi)
        clauses[ci] = replace(clauses[ci], gates=gates)
        variants.append(replace(spec, clauses=tuple(clauses)))
    if len(positions) > 1:
        clauses = tuple(replace(c, gates=()) for c in spec.clauses)
        variants.append(replace(spec, clauses=clauses))
    for ci, clause in enumerate(spec.clauses):
        if clause.excluded or not clause.terms:
            continue
        subjects = sorted(
            {s for t in clause.terms for s, _ in t.factors if s != spec.owner}
        )
        for subject in subjects:
            clauses = list(spec.clauses)
            extra = ThresholdGate(subject, 0.5, GateDirection.AT_LEAST)
            clauses[ci] = replace(clause, gates=clause.gates + (extra,))
            variants.append(replace(spec, clauses=tuple(clauses)))
    return variants


def deviations_for(trip: TripType, space: DeviationSpace) -> list[Deviation]:
    """Candidate misreports in a fixed order: probability points ascending,
    truthful coefficients before rescalings, gate edits last. The order is
    the tie-break when several deviations share the maximal gain."""
    points = [k / (space.p_grid - 1) for k in range(space.p_grid)]
    variant_lists = []
    for combo in _scale_combos(trip.valuation, space.coefficient_scales):
        scaled = _scaled_spec(trip.valuation, combo)
        variant_lists.append(_gate_variants(scaled) if space.gate_toggles else [scaled])
    out = []
    for pi, p_hat in enumerate(points):
        for ci, variants in enumerate(variant_lists):
            for gi, spec in enumerate(variants):
                out.append(Deviation(TripType(spec, p_hat), (pi, ci, gi)))
    return out


class _UtilityEngine:
    """Expected utility of one commuter's reports against a fixed profile
    of everyone else. Caches what provably depends on the induced
    allocation alone."""

    def __init__(self, profile: Scenario, i: CommuterId, mechanism: Mechanism):
        self.profile = profile
        self.i = i
        self.mechanism = mechanism
        self.public_p = profile.true_p() if mechanism is Mechanism.GROVES_CLARKE_PUBLIC_P else None
        if mechanism is Mechanism.GROVES_ZERO:
            self.h = 0.0
        else:
            # the pivot never reads i's report, so it is fixed per profile
            self.h = efficient_allocation_excluding(profile, i, p_override=self.public_p).welfare
        self._commit_cache: dict = {}

    def utility(self, trip: TripType) -> float:
        prof = with_report(self.profile, self.i, trip)
        rep = efficient_allocation(prof, p_override=self.public_p)
        if self.mechanism is Mechanism.COMMIT_BASED:
            cached = self._commit_cache.get(rep.allocation)
            if cached is None:
                entry = _commit_entry(prof, self.h, rep, self.i)
                cached = _conditional_utility(prof, self.i, rep.allocation, entry)
                self._commit_cache[rep.allocation] = cached
            return cached
        entry = _groves_entry(self.h, rep, self.i)
        return _unconditional_utility(prof, self.i, rep.allocation, entry.amount)


@dataclass
class _Best:
    gain: float = 0.0
    witness: Witness | None = None


def _sweep(
    profile: Scenario,
    i: CommuterId,
    mechanism: Mechanism,
    devs: list[Deviation],
    opponents: tuple[tuple[CommuterId, TripType], ...],
    best: _Best,
) -> int:
    engine = _UtilityEngine(profile, i, mechanism)
    truthful = profile.commuters[i].true_type
    u_truth = engine.utility(truthful)
    excluded = 0
    for dev in devs:
        try:
            u = engine.utility(dev.trip)
        except ExcludedValueError:
            excluded += 1
            continue
        gain = u - u_truth
        if gain > best.gain:
            best.gain = gain
            best.witness = Witness(i, dev.trip, u_truth, u, gain, opponents)
    return excluded


def _report(
    mechanism: Mechanism,
    notion: Notion,
    best: _Best,
    space: DeviationSpace,
    opponent_space: DeviationSpace | None,
    excluded: int,
) -> AuditReport:
    violated = best.gain > GAIN_TOLERANCE
    return AuditReport(
        mechanism=mechanism,
        notion=notion,
        verdict=Verdict.VIOLATED if violated else Verdict.NO_VIOLATION_FOUND,
        witness=best.witness if violated else None,
        space=space,
        opponent_space=opponent_space,
        excluded_deviations=excluded,
    )


def audit_expost(
    s: Scenario, mechanism: Mechanism, space: DeviationSpace = DeviationSpace()
) -> AuditReport:
    """Hold everyone else truthful and sweep each commuter's misreports.
    Returns the maximal-gain witness when any beats truth by more than
    the gain tolerance. Ties keep the lowest commuter id, then the first
    deviation in grid order."""
    base = with_truthful_reports(s)
    best = _Best()
    excluded = 0
    for i in range(base.n):
        devs = deviations_for(base.commuters[i].true_type, space)
        excluded += _sweep(base, i, mechanism, devs, (), best)
    return _report(mechanism, Notion.EX_POST, best, space, None, excluded)


def audit_dominant(
    s: Scenario,
    mechanism: Mechanism,
    space: DeviationSpace = DeviationSpace(),
    opponent_space: DeviationSpace = DeviationSpace(p_grid=5),
) -> AuditReport:
    """Sweep each commuter's misreports against every grid profile of
    opponent misreports (truthful opponents included). Exhaustive in the
    grids, so cost grows as the profile product; refused above
    MAX_DOMINANT_COMMUTERS commuters."""
    if s.n > MAX_DOMINANT_COMMUTERS:
        raise AuditSizeError(
            f"dominant audit over {s.n} commuters sweeps a full misreport profile "
            f"product and is refused above {MAX_DOMINANT_COMMUTERS}; use audit_expost "
            "or a smaller scenario"
        )
    base = with_truthful_reports(s)
    best = _Best()
    excluded = 0
    for i in range(base.n):
        devs = deviations_for(base.commuters[i].true_type, space)
        others = [j for j in range(base.n) if j != i]
        opponent_devs = []
        for j in others:
            truthful_j = Deviation(base.commuters[j].true_type, (-1, -1, -1))
            opponent_devs.append([truthful_j] + deviations_for(base.commuters[j].true_type, opponent_space))
        for combo in itertools.product(*opponent_devs):
            profile = base
            for j, dev in zip(others, combo):
                profile = with_report(profile, j, dev.trip)
            opponents = tuple((j, dev.trip) for j, dev in zip(others, combo))
            excluded += _sweep(profile, i, mechanism, devs, opponents, best)
    return _report(mechanism, Notion.DOMINANT, best, space, opponent_space, excluded)


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    scenario: Scenario
    mechanism: Mechanism
    expected: Verdict


def truthfulness_suite() -> tuple[SuiteEntry, ...]:
    """Bundled scenarios with known ex-post audit verdicts: private
    commitment probabilities break the classic mechanism, public ones or
    commitment-settled payments with affine valuations repair it, and a
    threshold gate or squared reliability term breaks the repair."""
    from .corpus import by_name

    v = Verdict
    return (
        SuiteEntry("groves-clarke-private-probabilities", by_name("linear-pair-profitable"),
                   Mechanism.GROVES_CLARKE, v.VIOLATED),
        SuiteEntry("groves-clarke-public-probabilities", by_name("linear-pair-profitable"),
                   Mechanism.GROVES_CLARKE_PUBLIC_P, v.NO_VIOLATION_FOUND),
        SuiteEntry("commit-based-linear-pair", by_name("linear-pair-profitable"),
                   Mechanism.COMMIT_BASED, v.NO_VIOLATION_FOUND),
        SuiteEntry("commit-based-linear-trio", by_name("linear-trio-two-drivers"),
                   Mechanism.COMMIT_BASED, v.NO_VIOLATION_FOUND),
        SuiteEntry("commit-based-linear-quad", by_name("linear-quad-competition"),
                   Mechanism.COMMIT_BASED, v.NO_VIOLATION_FOUND),
        SuiteEntry("commit-based-threshold-gate", by_name("threshold-gate-pair"),
                   Mechanism.COMMIT_BASED, v.VIOLATED),
        SuiteEntry("commit-based-quadratic-exponent", by_name("quadratic-reliability-pair"),
                   Mechanism.COMMIT_BASED, v.VIOLATED),
    )
