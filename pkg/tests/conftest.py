"""Shared fixtures: an independent brute-force allocation oracle and
hypothesis strategies for small random scenarios."""

import itertools
import math

import pytest
from hypothesis import strategies as st

from rideshare.model import (
    Allocation,
    Assignment,
    Commuter,
    Role,
    Scenario,
    TripType,
    full_compatibility,
)
from rideshare.valuation import (
    AnyPartners,
    Clause,
    EXCLUDED,
    Monomial,
    OutcomePattern,
    ValuationSpec,
    evaluate,
)


def naive_choice_valid(s, choices):
    """Check a raw driver-choice vector from scratch, without reusing any
    feasibility logic from the package."""
    riders_of = {}
    for i, d in enumerate(choices):
        if d == -1:
            continue
        if d == i:
            return False
        c = s.commuters[d]
        if not c.has_vehicle:
            return False
        if not s.compatibility[i][d]:
            return False
        if choices[d] != -1:
            return False
        riders_of.setdefault(d, []).append(i)
    for d, riders in riders_of.items():
        if len(riders) > s.commuters[d].seat_capacity:
            return False
    return True


def naive_allocation_from_choices(s, choices):
    riders_of = {}
    for i, d in enumerate(choices):
        if d != -1:
            riders_of.setdefault(d, set()).add(i)
    assignments = []
    for i, d in enumerate(choices):
        if d != -1:
            assignments.append(Assignment(Role.RIDE, frozenset({d})))
        elif i in riders_of:
            assignments.append(Assignment(Role.DRIVE, frozenset(riders_of[i])))
        else:
            assignments.append(Assignment(Role.NONE, frozenset()))
    return Allocation(tuple(assignments))


def naive_feasible_allocations(s):
    """Every feasible allocation, in lexicographic driver-choice order with
    self (-1) first. Enumerates the full candidate product and filters."""
    n = s.n
    candidate_lists = [[-1] + sorted(j for j in range(n) if j != i) for i in range(n)]
    out = []
    for choices in itertools.product(*candidate_lists):
        if naive_choice_valid(s, choices):
            out.append(naive_allocation_from_choices(s, choices))
    return out


def naive_best_allocation(s, p=None):
    """First strict welfare maximizer over the naive enumeration."""
    if p is None:
        p = s.reported_p()
    best = None
    best_welfare = None
    for a in naive_feasible_allocations(s):
        values = [evaluate(c.reported_type.valuation, a, p) for c in s.commuters]
        if any(v is EXCLUDED for v in values):
            continue
        w = math.fsum(values)
        if best_welfare is None or w > best_welfare:
            best = a
            best_welfare = w
    return best, best_welfare


def bernoulli_expectation(spec, allocation, p):
    """Exact expectation of the valuation over independent commit draws:
    sum over all 2^n commit vectors, weighting each by its probability."""
    n = len(p)
    total = 0.0
    for bits in itertools.product((0.0, 1.0), repeat=n):
        weight = 1.0
        for pi, b in zip(p, bits):
            weight *= pi if b == 1.0 else 1.0 - pi
        if weight == 0.0:
            continue
        v = evaluate(spec, allocation, bits)
        assert v is not EXCLUDED
        total += weight * v
    return total


def _linear_spec(owner, n, coefficients):
    """Valuation with one multilinear monomial per role, built from a flat
    coefficient list so hypothesis can drive it."""
    drive_coeff, ride_coeff = coefficients
    subjects = tuple(range(n))
    factors = tuple((j, 1) for j in subjects)
    clauses = (
        Clause(OutcomePattern(Role.DRIVE, AnyPartners()), (),
               (Monomial(drive_coeff, factors),), False),
        Clause(OutcomePattern(Role.RIDE, AnyPartners()), (),
               (Monomial(ride_coeff, factors),), False),
        Clause(OutcomePattern(Role.NONE, AnyPartners()), (), (), False),
    )
    return ValuationSpec(owner, clauses, 0.0)


@st.composite
def small_scenarios(draw):
    """Scenarios with 1 to 4 commuters, multilinear valuations, and a random
    symmetric compatibility matrix."""
    n = draw(st.integers(min_value=1, max_value=4))
    coeff = st.floats(min_value=-8.0, max_value=8.0, allow_nan=False, width=32)
    commuters = []
    for i in range(n):
        has_vehicle = draw(st.booleans())
        capacity = draw(st.integers(min_value=0, max_value=3)) if has_vehicle else 0
        spec = _linear_spec(i, n, (draw(coeff), draw(coeff)))
        p = draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False, width=16))
        commuters.append(Commuter(i, has_vehicle, capacity, TripType(spec, p)))
    if draw(st.booleans()):
        compat = full_compatibility(n)
    else:
        rows = [[True] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                ok = draw(st.booleans())
                rows[i][j] = ok
                rows[j][i] = ok
        compat = tuple(tuple(r) for r in rows)
    return Scenario(tuple(commuters), compat)


@pytest.fixture(scope="session")
def corpus_entries():
    from rideshare.corpus import corpus

    return corpus()
