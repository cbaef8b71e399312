"""End-to-end command line behavior and scenario file round-trips."""

import json
from pathlib import Path

import pytest

from rideshare import cli
from rideshare.corpus import by_name, corpus
from rideshare.scenario_io import (
    ScenarioFormatError,
    parse_scenario_text,
    serialize_scenario,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
PAIR = str(SCENARIOS / "linear-pair-profitable.json")
GATE = str(SCENARIOS / "threshold-gate-pair.json")
GATE_MISREPORT = str(SCENARIOS / "threshold-gate-pair-misreport.json")


def test_allocate_pair(capsys):
    assert cli.main(["allocate", PAIR]) == 0
    out = capsys.readouterr().out
    assert "0: drive [1]" in out
    assert "1: ride [0]" in out
    assert "welfare: 1.2" in out


def test_allocate_gate_stays_home(capsys):
    assert cli.main(["allocate", GATE]) == 0
    out = capsys.readouterr().out
    assert "all travel alone" in out


def test_pay_public_clarke(capsys):
    assert cli.main(["pay", PAIR, "--mechanism", "groves-clarke", "--public-p"]) == 0
    out = capsys.readouterr().out
    assert "payment[0]: -2.0" in out
    assert "payment[1]: 0.8" in out


def test_pay_defaults_to_commit(capsys):
    assert cli.main(["pay", PAIR]) == 0
    out = capsys.readouterr().out
    assert "mechanism: commit" in out
    assert "payment[0]: (-4.0, 0.0)" in out


def test_public_p_rejected_for_commit(capsys):
    assert cli.main(["pay", PAIR, "--mechanism", "commit", "--public-p"]) == 2
    assert "groves" in capsys.readouterr().err


def test_audit_gate_violated_exit_code(capsys):
    assert cli.main(["audit", GATE, "--mechanism", "commit"]) == 1
    out = capsys.readouterr().out
    assert "verdict: violated" in out
    assert "witness commuter: 0" in out
    assert "gain: 1.2" in out
    assert '"p_commit": 0.6' in out


def test_audit_clean_exit_code(capsys):
    assert cli.main(["audit", PAIR, "--mechanism", "commit"]) == 0
    out = capsys.readouterr().out
    assert "verdict: no-violation-found" in out


def test_audit_public_p_requires_clarke(capsys):
    assert cli.main(["audit", PAIR, "--mechanism", "groves-zero", "--public-p"]) == 2
    assert cli.main(["audit", PAIR, "--mechanism", "groves-clarke", "--public-p"]) == 0


def test_audit_dominant_flag(capsys):
    code = cli.main([
        "audit", PAIR, "--mechanism", "commit",
        "--notion", "dominant", "--opponent-grid", "11",
    ])
    assert code == 1
    out = capsys.readouterr().out
    assert "notion: dominant" in out
    assert "opponent 0 report:" in out


def test_suite_passes(capsys):
    assert cli.main(["suite"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7
    assert "FAIL" not in out


def test_simulate_writes_deterministic_csv(tmp_path, capsys):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    args = ["simulate", PAIR, "--trials", "200", "--seed", "9"]
    assert cli.main(args + ["--out", str(out_a)]) == 0
    assert cli.main(args + ["--out", str(out_b)]) == 0
    a = out_a.read_bytes()
    assert a == out_b.read_bytes()
    header = a.decode().splitlines()[0]
    assert header == "trial,commuter,committed,value,payment,utility"
    assert a.decode().count("\nmean,") == 2
    assert a.decode().count("\nstderr,") == 2


def test_simulate_rejects_zero_trials(capsys):
    code = cli.main(["simulate", PAIR, "--trials", "0", "--out", "/tmp/x.csv"])
    assert code == 2


def test_simulate_unwritable_output(tmp_path, capsys):
    target = tmp_path / "no-such-dir" / "x.csv"
    code = cli.main(["simulate", PAIR, "--trials", "5", "--out", str(target)])
    assert code == 3


def test_missing_file_is_input_error(capsys):
    assert cli.main(["allocate", str(SCENARIOS / "nope.json")]) == 2


def test_malformed_json_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["allocate", str(bad)]) == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_unknown_field_names_the_path(tmp_path, capsys):
    doc = json.loads(Path(PAIR).read_text())
    doc["scenario"]["commuters"][0]["seats"] = 1
    del doc["scenario"]["commuters"][0]["seat_capacity"]
    bad = tmp_path / "unknown.json"
    bad.write_text(json.dumps(doc))
    assert cli.main(["allocate", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "commuters[0]" in err


def test_version_mismatch_is_input_error(tmp_path, capsys):
    doc = json.loads(Path(PAIR).read_text())
    doc["schema_version"] = 99
    bad = tmp_path / "v99.json"
    bad.write_text(json.dumps(doc))
    assert cli.main(["allocate", str(bad)]) == 2
    assert "schema_version" in capsys.readouterr().err


def test_invalid_scenario_is_input_error(tmp_path, capsys):
    doc = json.loads(Path(PAIR).read_text())
    doc["scenario"]["commuters"][0]["true_type"]["p_commit"] = 1.5
    bad = tmp_path / "p15.json"
    bad.write_text(json.dumps(doc))
    assert cli.main(["allocate", str(bad)]) == 2
    assert "invalid scenario" in capsys.readouterr().err


def test_thread_env_validation(monkeypatch, capsys):
    monkeypatch.setenv(cli.THREADS_ENV, "-1")
    assert cli.main(["allocate", PAIR]) == 2
    monkeypatch.setenv(cli.THREADS_ENV, "junk")
    assert cli.main(["allocate", PAIR]) == 2
    monkeypatch.setenv(cli.THREADS_ENV, "4")
    assert cli.main(["allocate", PAIR]) == 0


def test_unknown_subcommand_is_input_error(capsys):
    assert cli.main(["frobnicate"]) == 2


def test_bundled_files_are_canonical():
    """Each shipped scenario file is byte-identical to its own re-serialized
    parse, so editing tools cannot silently change meaning."""
    files = sorted(SCENARIOS.glob("*.json"))
    assert len(files) >= 4
    for path in files:
        text = path.read_text()
        s = parse_scenario_text(text)
        assert serialize_scenario(s) == text, path.name


def test_corpus_round_trips_through_json():
    for e in corpus():
        text = serialize_scenario(e.scenario)
        assert parse_scenario_text(text) == e.scenario, e.name


def test_misreport_file_keeps_reported_type():
    s = parse_scenario_text(Path(GATE_MISREPORT).read_text())
    assert s.reported_p() != s.true_p()
    assert s == by_name("threshold-gate-pair-misreport")


def test_parse_rejects_bool_probability():
    doc = json.loads(Path(PAIR).read_text())
    doc["scenario"]["commuters"][0]["true_type"]["p_commit"] = True
    with pytest.raises(ScenarioFormatError) as exc:
        parse_scenario_text(json.dumps(doc))
    assert "p_commit" in str(exc.value)