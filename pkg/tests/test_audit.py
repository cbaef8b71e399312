"""Misreport grid search: verdicts, witnesses, and witness replay."""

import pytest

from rideshare.audit import (
    AuditSizeError,
    DeviationSpace,
    Mechanism,
    Notion,
    Verdict,
    audit_dominant,
    audit_expost,
    deviations_for,
    truthfulness_suite,
)
from rideshare.corpus import by_name, corpus, linear_entries
from rideshare.model import full_compatibility, with_report, with_truthful_reports
from rideshare.payments import (
    PivotRule,
    commit_payments,
    expected_utility,
    groves_payments,
)


def replay_schedule(s, mechanism):
    if mechanism is Mechanism.COMMIT_BASED:
        return commit_payments(s)
    if mechanism is Mechanism.GROVES_ZERO:
        return groves_payments(s, PivotRule.ZERO)
    if mechanism is Mechanism.GROVES_CLARKE:
        return groves_payments(s, PivotRule.CLARKE)
    return groves_payments(s, PivotRule.CLARKE, public_p=s.true_p())


def replay_witness(s, report):
    """Recompute both sides of a witness from scratch through the public
    payment API; returns (truthful_utility, deviated_utility)."""
    w = report.witness
    bent = with_truthful_reports(s)
    for j, trip in w.opponent_reports:
        bent = with_report(bent, j, trip)
    truthful = expected_utility(bent, w.commuter, replay_schedule(bent, report.mechanism))
    deviated_s = with_report(bent, w.commuter, w.report)
    deviated = expected_utility(
        deviated_s, w.commuter, replay_schedule(deviated_s, report.mechanism)
    )
    return truthful, deviated


def test_threshold_gate_commit_violated():
    """The worked manipulation: misreporting p0 = 0.6 clears the gate and
    nets (alpha + beta) * p0 * p1 = 1.2 over a truthful utility of zero."""
    s = by_name("threshold-gate-pair")
    report = audit_expost(s, Mechanism.COMMIT_BASED)
    assert report.verdict is Verdict.VIOLATED
    w = report.witness
    assert w.commuter == 0
    assert w.report.p_commit == pytest.approx(0.6, abs=1e-12)
    assert w.truthful_utility == pytest.approx(0.0, abs=1e-12)
    assert w.deviated_utility == pytest.approx(1.2, abs=1e-12)
    assert w.gain == pytest.approx(1.2, abs=1e-12)


def test_linear_pair_commit_clean():
    report = audit_expost(by_name("linear-pair-profitable"), Mechanism.COMMIT_BASED)
    assert report.verdict is Verdict.NO_VIOLATION_FOUND
    assert report.witness is None
    assert report.excluded_deviations == 0


def test_private_clarke_violated_at_certainty():
    """Overstating commitment to p = 1 inflates the subsidy by exactly 2.0."""
    report = audit_expost(by_name("linear-pair-profitable"), Mechanism.GROVES_CLARKE)
    assert report.verdict is Verdict.VIOLATED
    w = report.witness
    assert w.commuter == 0
    assert w.report.p_commit == 1.0
    assert w.gain == pytest.approx(2.0, abs=1e-12)


def test_private_zero_pivot_equally_manipulable():
    """The pivot term cancels out of the deviation gain, so the zero pivot
    shares the Clarke verdict."""
    report = audit_expost(by_name("linear-pair-profitable"), Mechanism.GROVES_ZERO)
    assert report.verdict is Verdict.VIOLATED
    assert report.witness.gain == pytest.approx(2.0, abs=1e-12)


def test_public_probabilities_remove_the_lever():
    s = by_name("linear-pair-profitable")
    assert (
        audit_expost(s, Mechanism.GROVES_CLARKE_PUBLIC_P).verdict
        is Verdict.NO_VIOLATION_FOUND
    )
    report = audit_dominant(
        s,
        Mechanism.GROVES_CLARKE_PUBLIC_P,
        DeviationSpace(p_grid=21),
        DeviationSpace(p_grid=21),
    )
    assert report.verdict is Verdict.NO_VIOLATION_FOUND
    assert report.opponent_space is not None


def test_quadratic_exponent_commit_violated():
    report = audit_expost(by_name("quadratic-reliability-pair"), Mechanism.COMMIT_BASED)
    assert report.verdict is Verdict.VIOLATED
    assert report.witness.gain == pytest.approx(0.4, abs=1e-12)


def test_quadratic_pure_probability_witness():
    """Restricting deviations to probability-only misreports still finds the
    violation: claiming p0 = 0.55 tips 4 * p0^2 * 0.8 past the drive cost."""
    space = DeviationSpace(p_grid=21, coefficient_scales=(1.0,))
    report = audit_expost(by_name("quadratic-reliability-pair"), Mechanism.COMMIT_BASED, space)
    assert report.verdict is Verdict.VIOLATED
    w = report.witness
    assert w.report.p_commit == pytest.approx(0.55, abs=1e-12)
    assert w.gain == pytest.approx(0.4, abs=1e-12)


def test_linear_corpus_commit_expost_clean():
    for e in linear_entries():
        report = audit_expost(e.scenario, Mechanism.COMMIT_BASED)
        assert report.verdict is Verdict.NO_VIOLATION_FOUND, e.name
        assert report.excluded_deviations == 0, e.name


def test_commit_not_dominant_strategy_proof():
    """Ex-post truthfulness does not survive opponent misreports: an inflated
    drive-cost report turns the share sour, and the rider escapes by
    reporting zero commitment."""
    s = by_name("linear-pair-profitable")
    report = audit_dominant(
        s, Mechanism.COMMIT_BASED, opponent_space=DeviationSpace(p_grid=11)
    )
    assert report.verdict is Verdict.VIOLATED
    w = report.witness
    assert w.opponent_reports, "dominant witness must pin the opponent reports"
    truthful, deviated = replay_witness(s, report)
    assert truthful == pytest.approx(w.truthful_utility, abs=1e-12)
    assert deviated == pytest.approx(w.deviated_utility, abs=1e-12)
    assert deviated - truthful == pytest.approx(w.gain, abs=1e-12)


def test_constant_values_clarke_dominant_clean():
    """Commitment-free valuations collapse to classic VCG: the dominant
    sweep finds nothing whether probabilities are private or public."""
    coarse = DeviationSpace(p_grid=3, coefficient_scales=(0.0, 1.0, 2.0))
    for mechanism in (Mechanism.GROVES_CLARKE, Mechanism.GROVES_CLARKE_PUBLIC_P):
        report = audit_dominant(
            by_name("linear-trio-constants"), mechanism, coarse, coarse
        )
        assert report.verdict is Verdict.NO_VIOLATION_FOUND, mechanism


def test_every_violated_witness_replays(corpus_entries):
    """Each violation the auditor reports must replay through the public
    payment API to the same two utilities."""
    seen = 0
    for e in corpus_entries:
        for mechanism in (Mechanism.COMMIT_BASED, Mechanism.GROVES_CLARKE):
            report = audit_expost(e.scenario, mechanism)
            if report.verdict is not Verdict.VIOLATED:
                continue
            seen += 1
            truthful, deviated = replay_witness(e.scenario, report)
            assert truthful == pytest.approx(report.witness.truthful_utility, abs=1e-12)
            assert deviated == pytest.approx(report.witness.deviated_utility, abs=1e-12)
            assert deviated > truthful + 1e-9
    assert seen >= 3


def test_finer_grid_never_flips_to_clean(corpus_entries):
    """Refining 21 to 41 probability points keeps every violated verdict
    violated, with no smaller maximum gain."""
    for e in corpus_entries:
        coarse = audit_expost(e.scenario, Mechanism.COMMIT_BASED, DeviationSpace(p_grid=21))
        if coarse.verdict is not Verdict.VIOLATED:
            continue
        fine = audit_expost(e.scenario, Mechanism.COMMIT_BASED, DeviationSpace(p_grid=41))
        assert fine.verdict is Verdict.VIOLATED, e.name
        assert fine.witness.gain >= coarse.witness.gain - 1e-12, e.name


def test_deviation_space_rejects_non_finite_scales():
    with pytest.raises(ValueError):
        DeviationSpace(coefficient_scales=(1.0, float("inf")))


def test_gate_toggle_deviations_keep_violation():
    s = by_name("threshold-gate-pair")
    report = audit_expost(
        s, Mechanism.COMMIT_BASED, DeviationSpace(p_grid=21, gate_toggles=True)
    )
    assert report.verdict is Verdict.VIOLATED
    assert report.witness.gain >= 1.2 - 1e-12


def test_dominant_sweep_refuses_large_scenarios():
    base = by_name("linear-quad-competition")
    from dataclasses import replace

    extra = replace(base.commuters[0], id=4)
    five = replace(
        base,
        commuters=base.commuters + (extra,),
        compatibility=full_compatibility(5),
    )
    with pytest.raises(AuditSizeError):
        audit_dominant(five, Mechanism.COMMIT_BASED)
    # the ex-post sweep has no such cap
    assert audit_expost(five, Mechanism.COMMIT_BASED) is not None


def test_deviation_space_shape():
    s = by_name("linear-pair-profitable")
    trip = s.commuters[0].reported_type
    space = DeviationSpace(p_grid=5, coefficient_scales=(0.5, 1.0))
    devs = deviations_for(trip, space)
    # 5 probability points times 2 scale choices for the single monomial
    assert len(devs) == 10
    p_values = [d.trip.p_commit for d in devs]
    assert p_values == sorted(p_values), "probability must be the outer loop"
    assert len({d.encoding for d in devs}) == len(devs)
    with pytest.raises(ValueError):
        DeviationSpace(p_grid=1)


def test_suite_reproduces_expected_verdicts():
    entries = truthfulness_suite()
    assert len(entries) == 7
    assert len({e.name for e in entries}) == 7
    for e in entries:
        report = audit_expost(e.scenario, e.mechanism)
        assert report.verdict is e.expected, e.name
        assert report.mechanism is e.mechanism
        assert report.notion is Notion.EX_POST