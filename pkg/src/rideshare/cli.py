"""Command-line front end.

Exit codes: 0 success (and audits that find nothing), 1 a violation or a
failed suite entry, 2 bad input, 3 could not write output.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from .allocation import efficient_allocation
from .audit import (
    AuditSizeError,
    DeviationSpace,
    Mechanism,
    Notion,
    Verdict,
    audit_dominant,
    audit_expost,
    truthfulness_suite,
)
from .model import Scenario, validate_scenario
from .payments import Conditional, PivotRule, commit_payments, groves_payments
from .scenario_io import ScenarioFormatError, parse_scenario_text, trip_to_json
from .simulate import run_trials

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_IO = 3

THREADS_ENV = "RIDESHARE_THREADS"


class _InputError(Exception):
    pass


def thread_cap() -> int:
    """Parallelism cap from the environment; 0 means automatic.
    Evaluation currently runs on one thread, which respects any cap."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise _InputError(f"{THREADS_ENV} must be a non-negative integer, got {raw!r}")
    if value < 0:
        raise _InputError(f"{THREADS_ENV} must be a non-negative integer, got {raw!r}")
    return value


def _load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e}")
    try:
        s = parse_scenario_text(text)
    except ScenarioFormatError as e:
        raise _InputError(f"{path}: {e}")
    violations = validate_scenario(s)
    if violations:
        listing = "\n".join(f"  {v}" for v in violations)
        raise _InputError(f"{path}: invalid scenario\n{listing}")
    return s


_MECHANISMS = {
    "groves-zero": Mechanism.GROVES_ZERO,
    "groves-clarke": Mechanism.GROVES_CLARKE,
    "commit": Mechanism.COMMIT_BASED,
}


def _schedule_for(s: Scenario, name: str, public_p: bool):
    if name == "commit":
        if public_p:
            raise _InputError("--public-p only applies to groves mechanisms")
        return commit_payments(s)
    pivot = PivotRule.ZERO if name == "groves-zero" else PivotRule.CLARKE
    return groves_payments(s, pivot, public_p=s.true_p() if public_p else None)


def cmd_allocate(args) -> int:
    s = _load_scenario(args.scenario)
    rep = efficient_allocation(s)
    if rep.allocation.all_none():
        print("all travel alone")
    else:
        for i, a in enumerate(rep.allocation.assignments):
            partners = sorted(a.partners)
            suffix = f" {partners}" if partners else ""
            print(f"{i}: {a.role.value}{suffix}")
    print(f"welfare: {rep.welfare}")
    for i, v in enumerate(rep.per_commuter):
        print(f"value[{i}]: {v}")
    return EXIT_OK


def cmd_pay(args) -> int:
    s = _load_scenario(args.scenario)
    schedule = _schedule_for(s, args.mechanism, args.public_p)
    print(f"mechanism: {args.mechanism}" + (" (public p)" if args.public_p else ""))
    for i, entry in enumerate(schedule.entries):
        if isinstance(entry, Conditional):
            print(f"payment[{i}]: ({entry.on_commit}, {entry.on_fail})")
        else:
            print(f"payment[{i}]: {entry.amount}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = _load_scenario(args.scenario)
    if args.trials < 1:
        raise _InputError(f"--trials must be at least 1, got {args.trials}")
    schedule = _schedule_for(s, args.mechanism, args.public_p)
    records, summary = run_trials(s, schedule, args.trials, args.seed)
    text = render_trials_csv(records, summary)
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        print(f"cannot write {args.out}: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"trials: {summary.trials}  seed: {args.seed}  flagged: {summary.flagged}")
    for k in range(s.n):
        print(
            f"commuter {k}: mean utility {summary.mean_utility[k]} "
            f"(stderr {summary.stderr_utility[k]}), mean value {summary.mean_value[k]}, "
            f"mean payment {summary.mean_payment[k]}"
        )
    print(f"mean welfare: {summary.mean_welfare}")
    print(f"mean deficit: {summary.mean_deficit}")
    print(f"wrote {args.out}")
    return EXIT_OK


def render_trials_csv(records, summary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "commuter", "committed", "value", "payment", "utility"])
    for r in records:
        for k in range(len(r.commit)):
            value = "" if r.values[k] is None else repr(r.values[k])
            utility = "" if r.utilities[k] is None else repr(r.utilities[k])
            writer.writerow([r.trial, k, r.commit[k], value, repr(r.payments[k]), utility])
    n = len(summary.mean_commit)
    for k in range(n):
        writer.writerow([
            "mean", k, repr(summary.mean_commit[k]), repr(summary.mean_value[k]),
            repr(summary.mean_payment[k]), repr(summary.mean_utility[k]),
        ])
        writer.writerow(["stderr", k, "", "", "", repr(summary.stderr_utility[k])])
    return buf.getvalue()


def _audit_mechanism(args) -> Mechanism:
    mech = _MECHANISMS[args.mechanism]
    if args.public_p:
        if mech is not Mechanism.GROVES_CLARKE:
            raise _InputError("--public-p audits require --mechanism groves-clarke")
        return Mechanism.GROVES_CLARKE_PUBLIC_P
    return mech


def cmd_audit(args) -> int:
    s = _load_scenario(args.scenario)
    mechanism = _audit_mechanism(args)
    space = DeviationSpace(p_grid=args.grid)
    if args.notion == "expost":
        report = audit_expost(s, mechanism, space)
    else:
        try:
            report = audit_dominant(s, mechanism, space, DeviationSpace(p_grid=args.opponent_grid))
        except AuditSizeError as e:
            raise _InputError(str(e))
    print(f"mechanism: {report.mechanism.value}")
    print(f"notion: {report.notion.value}")
    print(f"p-grid: {report.space.p_grid}")
    print(f"verdict: {report.verdict.value}")
    if report.witness is not None:
        w = report.witness
        print(f"witness commuter: {w.commuter}")
        print(f"truthful utility: {w.truthful_utility}")
        print(f"deviated utility: {w.deviated_utility}")
        print(f"gain: {w.gain}")
        print(f"deviated report: {trip_to_json(w.report)}")
        for j, trip in w.opponent_reports:
            print(f"opponent {j} report: {trip_to_json(trip)}")
    return EXIT_VIOLATION if report.verdict is Verdict.VIOLATED else EXIT_OK


def cmd_suite(args) -> int:
    failures = 0
    for entry in truthfulness_suite():
        report = audit_expost(entry.scenario, entry.mechanism)
        ok = report.verdict is entry.expected
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{status}  {entry.name}: expected {entry.expected.value}, got {report.verdict.value}")
    print(f"{'all suite entries passed' if failures == 0 else f'{failures} suite entries failed'}")
    return EXIT_OK if failures == 0 else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rideshare",
        description="Allocate shared trips, price them, and audit truthfulness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="print the welfare-maximising allocation")
    p.add_argument("scenario", help="scenario file (JSON)")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("pay", help="print the payment schedule")
    p.add_argument("scenario")
    p.add_argument("--mechanism", choices=sorted(_MECHANISMS), default="commit")
    p.add_argument("--public-p", action="store_true",
                   help="treat true commitment probabilities as publicly known")
    p.set_defaults(func=cmd_pay)

    p = sub.add_parser("simulate", help="Monte Carlo settlement over commitment draws")
    p.add_argument("scenario")
    p.add_argument("--mechanism", choices=sorted(_MECHANISMS), default="commit")
    p.add_argument("--public-p", action="store_true")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="per-trial CSV output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="grid search for profitable misreports")
    p.add_argument("scenario")
    p.add_argument("--mechanism", choices=sorted(_MECHANISMS), default="commit")
    p.add_argument("--public-p", action="store_true")
    p.add_argument("--notion", choices=["expost", "dominant"], default="expost")
    p.add_argument("--grid", type=int, default=21, help="probability grid points")
    p.add_argument("--opponent-grid", type=int, default=5,
                   help="probability grid points per opponent (dominant only)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("suite", help="run the bundled known-verdict scenarios")
    p.set_defaults(func=cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        thread_cap()
        return args.func(args)
    except _InputError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
