"""Tests for the JSON-lines audit log."""

import json

from mlbgg.core.exceptions import ParameterError
from mlbgg.reporting.audit_logger import AuditLogger


def _events(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_events_are_json_lines(tmp_path):
    with AuditLogger(tmp_path / "out") as audit:
        audit.log_run_started("simulate", "small", "abc", 7, workers=1)
        audit.log_warning("censor rate high", rate=0.2)
        audit.log_run_finished("simulate", {"report": "report.json"})

    events = _events(tmp_path / "out" / "audit.jsonl")

    assert [e["event"] for e in events] == ["run_started", "warning", "run_finished"]
    assert events[0]["seed"] == 7
    assert events[0]["workers"] == 1
    assert events[1]["rate"] == 0.2
    assert events[2]["outputs"] == {"report": "report.json"}
    assert all("timestamp" in e for e in events)


def test_error_carries_details(tmp_path):
    audit = AuditLogger(tmp_path)
    audit.log_error(ParameterError("bad B", details={"B": -1}), context={"command": "simulate"})
    audit.close()

    (event,) = _events(audit.path)

    assert event["event"] == "error"
    assert event["error_type"] == "ParameterError"
    assert event["details"] == {"B": -1}
    assert event["context"] == {"command": "simulate"}


def test_reopening_appends(tmp_path):
    for command in ("simulate", "optimize-backup"):
        with AuditLogger(tmp_path) as audit:
            audit.log_run_finished(command, {})

    assert [e["command"] for e in _events(tmp_path / "audit.jsonl")] == [
        "simulate",
        "optimize-backup",
    ]


def test_close_twice(tmp_path):
    audit = AuditLogger(tmp_path)
    audit.close()
    audit.close()
