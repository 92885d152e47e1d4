"""Exit codes and report emission of the command-line driver."""

import json

from qcurrents.cli import parse_and_run


def test_fast_run_exits_zero(tmp_path, capsys):
    out = tmp_path / "rep.json"
    rc = parse_and_run(["--N", "2", "--order", "6", "--suite", "R0",
                        "--suite", "R10", "--out", str(out)])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert any(line.startswith("R0:") for line in lines)
    assert any(line.startswith("R10:") for line in lines)
    docs = json.loads(out.read_text())
    assert [d["suite"] for d in docs] == ["R0", "R10"]
    assert all(d["summary"]["fail"] == 0 for d in docs)


def test_single_suite_report_is_one_document(tmp_path):
    out = tmp_path / "rep.json"
    rc = parse_and_run(["--order", "6", "--suite", "R0", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["suite"] == "R0"


def test_invalid_configuration_exits_two(capsys):
    assert parse_and_run(["--suite", "R99"]) == 2
    assert parse_and_run(["--r", "1", "--k", "2"]) == 2
    assert parse_and_run(["--N", "3", "--lambda", "1"]) == 2
    err = capsys.readouterr().err
    assert "invalid configuration" in err


def test_list_prints_relation_table(capsys):
    rc = parse_and_run(["--list", "--suite", "R0", "--suite", "R4"])
    assert rc == 0
    rows = [line.split("\t") for line in
            capsys.readouterr().out.strip().splitlines()]
    assert rows
    assert {suite for suite, _ in rows} == {"R0", "R4"}


def test_wrong_reading_exits_one(capsys):
    rc = parse_and_run(["--order", "6", "--suite", "R7",
                        "--screening-shift", "B"])
    assert rc == 1
    assert "FAIL" in capsys.readouterr().out
