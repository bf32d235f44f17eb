"""Tests for the MSE CSV and the JSON summary."""

from __future__ import annotations

import json

import pytest

from struct_recovery.errors import SystemFileError
from struct_recovery.recovery.planner import FailureEvent
from struct_recovery.sim.harness import run
from struct_recovery.sim.report import (
    CSV_HEADER,
    CSV_NAME,
    SUMMARY_NAME,
    emit_csv,
    mse_rows,
    parse_csv,
    summary,
    write_outputs,
)
from struct_recovery.sim.scenario import NOMINAL_LABEL, Scenario
from struct_recovery.structure.pattern import SystemPattern


@pytest.fixture(scope="module")
def report():
    pattern = SystemPattern(2, [(1, 2), (2, 1)], {"s1": [1], "r": [2]})
    scenario = Scenario(pattern, horizon=10, trials=3, seed=2, events=[FailureEvent("r", 6)], name="cycle")
    return run(scenario)


def test_rows_skip_sensors_that_are_not_alive(report):
    rows = mse_rows(report)

    assert len(rows) == 5 * 2 + 5
    assert rows[0].step == 1 and rows[0].sensor_id == "r"
    assert {row.phase for row in rows if row.step >= 6} == {"failure:r"}
    assert all(row.sensor_id == "s1" for row in rows if row.step >= 6)


def test_csv_text_parses_back_exactly(report):
    text = emit_csv(report)

    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert text.endswith("\n")
    assert parse_csv(text) == mse_rows(report)


@pytest.mark.parametrize(
    "text",
    ["", "step,sensor,mse,phase\n", "step,sensor_id,mse,phase\n1,s1,abc,nominal\n"],
)
def test_malformed_csv(text):
    with pytest.raises(SystemFileError):
        parse_csv(text)


def test_summary_separates_runtime(report):
    data = summary(report)

    assert data["scenario"] == "cycle"
    assert data["trials"] == 3
    assert [p["label"] for p in data["phases"]] == [NOMINAL_LABEL, "failure:r"]
    assert data["phases"][1]["sensors"] == ["s1"]
    assert set(data["phases"][0]["steady_state_mse"]) == {"r", "s1"}
    assert data["mismatches"] == []
    assert "total_seconds" in data["runtime"]
    deterministic = {k: v for k, v in data.items() if k != "runtime"}
    assert "seconds" not in json.dumps(deterministic)


def test_write_outputs(tmp_path, report):
    csv_path, summary_path = write_outputs(report, tmp_path / "out")

    assert csv_path.name == CSV_NAME
    assert summary_path.name == SUMMARY_NAME
    assert parse_csv(csv_path.read_text(encoding="utf-8")) == mse_rows(report)
    assert json.loads(summary_path.read_text(encoding="utf-8"))["horizon"] == 10
