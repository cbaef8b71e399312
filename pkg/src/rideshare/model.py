"""Core data model: commuters, trip types, allocations, feasibility."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Iterator

if TYPE_CHECKING:
    from .valuation import ValuationSpec

CommuterId = int

_EMPTY: frozenset[int] = frozenset()


class Role(Enum):
    DRIVE = "drive"
    RIDE = "ride"
    NONE = "none"


@dataclass(frozen=True)
class TripType:
    """A commuter's private type: how they value outcomes and how likely
    they are to actually show up."""

    valuation: ValuationSpec
    p_commit: float


@dataclass(frozen=True)
class Commuter:
    id: CommuterId
    has_vehicle: bool
    seat_capacity: int
    true_type: TripType
    reported_type: TripType | None = None

    def __post_init__(self) -> None:
        if self.reported_type is None:
            object.__setattr__(self, "reported_type", self.true_type)


@dataclass(frozen=True)
class Assignment:
    role: Role
    partners: frozenset[CommuterId]


@dataclass(frozen=True)
class Allocation:
    """One assignment per commuter. Drivers carry their rider set, riders
    carry their single driver, unscheduled commuters carry nothing."""

    assignments: tuple[Assignment, ...]

    def role_of(self, i: CommuterId) -> Role:
        return self.assignments[i].role

    def partners_of(self, i: CommuterId) -> frozenset[CommuterId]:
        return self.assignments[i].partners

    def all_none(self) -> bool:
        return all(a.role is Role.NONE for a in self.assignments)

    def encoding(self) -> tuple[int, ...]:
        """Per-commuter driver choice: the driver's id for riders, -1 otherwise."""
        out = []
        for a in self.assignments:
            if a.role is Role.RIDE:
                out.append(min(a.partners))
            else:
                out.append(-1)
        return tuple(out)


def all_none_allocation(n: int) -> Allocation:
    return Allocation(tuple(Assignment(Role.NONE, _EMPTY) for _ in range(n)))


@dataclass(frozen=True)
class Scenario:
    commuters: tuple[Commuter, ...]
    compatibility: tuple[tuple[bool, ...], ...]
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.commuters)

    def true_p(self) -> tuple[float, ...]:
        return tuple(c.true_type.p_commit for c in self.commuters)

    def reported_p(self) -> tuple[float, ...]:
        return tuple(c.reported_type.p_commit for c in self.commuters)


def full_compatibility(n: int) -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(True for _ in range(n)) for _ in range(n))


def with_report(s: Scenario, i: CommuterId, trip: TripType) -> Scenario:
    commuters = list(s.commuters)
    commuters[i] = replace(commuters[i], reported_type=trip)
    return replace(s, commuters=tuple(commuters))


def with_truthful_reports(s: Scenario) -> Scenario:
    commuters = tuple(replace(c, reported_type=c.true_type) for c in s.commuters)
    return replace(s, commuters=commuters)


def allocation_violations(s: Scenario, a: Allocation) -> list[str]:
    """Check the structural allocation invariants. Returns human-readable
    violations; an empty list means the allocation is well formed."""
    out: list[str] = []
    n = s.n
    if len(a.assignments) != n:
        return [f"allocation has {len(a.assignments)} assignments for {n} commuters"]
    ride_memberships: dict[int, list[int]] = {}
    for i, asg in enumerate(a.assignments):
        if i in asg.partners:
            out.append(f"commuter {i}: partnered with itself")
        if any(j < 0 or j >= n for j in asg.partners):
            out.append(f"commuter {i}: partner id out of range")
            continue
        if asg.role is Role.NONE:
            if asg.partners:
                out.append(f"commuter {i}: role none but has partners")
        elif asg.role is Role.RIDE:
            if len(asg.partners) != 1:
                out.append(f"commuter {i}: rider must have exactly one driver")
            else:
                d = min(asg.partners)
                if a.assignments[d].role is not Role.DRIVE:
                    out.append(f"commuter {i}: rides with {d} who is not driving")
                elif i not in a.assignments[d].partners:
                    out.append(f"commuter {i}: driver {d} does not list them")
        elif asg.role is Role.DRIVE:
            if not asg.partners:
                out.append(f"commuter {i}: driving with no riders")
            if not s.commuters[i].has_vehicle:
                out.append(f"commuter {i}: driving without a vehicle")
            if len(asg.partners) > s.commuters[i].seat_capacity:
                out.append(f"commuter {i}: {len(asg.partners)} riders exceed capacity "
                           f"{s.commuters[i].seat_capacity}")
            for r in asg.partners:
                ride_memberships.setdefault(r, []).append(i)
                if a.assignments[r].role is not Role.RIDE:
                    out.append(f"commuter {i}: partner {r} is not riding")
                elif a.assignments[r].partners != frozenset((i,)):
                    out.append(f"commuter {i}: partner {r} does not ride with them alone")
    for r, drivers in ride_memberships.items():
        if len(drivers) > 1:
            out.append(f"commuter {r}: claimed by drivers {sorted(drivers)}")
    return out


def validate_scenario(s: Scenario) -> list[str]:
    """Semantic validation. Violations are returned as data, never raised."""
    from .valuation import spec_violations

    out: list[str] = []
    n = s.n
    if n < 1:
        return ["scenario has no commuters"]
    for k, c in enumerate(s.commuters):
        if c.id != k:
            out.append(f"commuter at index {k} has id {c.id}; ids must be 0..{n - 1} in order")
        if c.seat_capacity < 0:
            out.append(f"commuter {k}: negative seat_capacity {c.seat_capacity}")
        if not c.has_vehicle and c.seat_capacity != 0:
            out.append(f"commuter {k}: seat_capacity {c.seat_capacity} without a vehicle")
        for label, trip in (("true", c.true_type), ("reported", c.reported_type)):
            if not 0.0 <= trip.p_commit <= 1.0:
                out.append(f"commuter {k}: {label} p_commit {trip.p_commit} outside [0, 1]")
            for v in spec_violations(trip.valuation, n, expected_owner=k):
                out.append(f"commuter {k} {label} valuation: {v}")
    if len(s.compatibility) != n or any(len(row) != n for row in s.compatibility):
        out.append(f"compatibility matrix is not {n}x{n}")
        return out
    for i in range(n):
        if not s.compatibility[i][i]:
            out.append(f"compatibility: diagonal entry ({i}, {i}) must be true")
        for j in range(i + 1, n):
            if s.compatibility[i][j] != s.compatibility[j][i]:
                out.append(f"compatibility: asymmetric at ({i}, {j})")
    return out


_FEASIBLE_CACHE: dict[tuple, tuple[Allocation, ...]] = {}


def _structure_key(s: Scenario, absent: frozenset[int]) -> tuple:
    return (
        tuple(c.has_vehicle for c in s.commuters),
        tuple(c.seat_capacity for c in s.commuters),
        s.compatibility,
        absent,
    )


def _feasible(s: Scenario, absent: frozenset[int]) -> tuple[Allocation, ...]:
    key = _structure_key(s, absent)
    cached = _FEASIBLE_CACHE.get(key)
    if cached is not None:
        return cached
    n = s.n
    candidates: list[tuple[int, ...]] = []
    for r in range(n):
        if r in absent:
            candidates.append((-1,))
            continue
        drivers = [
            d
            for d in range(n)
            if d != r
            and d not in absent
            and s.commuters[d].has_vehicle
            and s.commuters[d].seat_capacity >= 1
            and s.compatibility[r][d]
        ]
        candidates.append(tuple([-1] + drivers))
    out: list[Allocation] = []
    for choice in itertools.product(*candidates):
        riders_of: dict[int, list[int]] = {}
        for r, d in enumerate(choice):
            if d >= 0:
                riders_of.setdefault(d, []).append(r)
        ok = True
        for d, riders in riders_of.items():
            if choice[d] != -1 or len(riders) > s.commuters[d].seat_capacity:
                ok = False
                break
        if not ok:
            continue
        assignments = []
        for i in range(n):
            if choice[i] >= 0:
                assignments.append(Assignment(Role.RIDE, frozenset((choice[i],))))
            elif i in riders_of:
                assignments.append(Assignment(Role.DRIVE, frozenset(riders_of[i])))
            else:
                assignments.append(Assignment(Role.NONE, _EMPTY))
        out.append(Allocation(tuple(assignments)))
    result = tuple(out)
    _FEASIBLE_CACHE[key] = result
    return result


def enumerate_feasible_allocations(
    s: Scenario, absent: Iterable[CommuterId] = ()
) -> Iterator[Allocation]:
    """Yield every feasible allocation in a fixed deterministic order.

    Order is lexicographic over the per-commuter driver-choice encoding with
    "not riding" (-1) first, so the all-none allocation always comes first.
    Commuters listed in `absent` are pinned to role none and cannot drive.
    """
    yield from _feasible(s, frozenset(absent))
