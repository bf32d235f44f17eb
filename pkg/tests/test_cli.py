"""End-to-end tests for the command line."""

from __future__ import annotations

import json

import pytest
from typer.testing import CliRunner

from struct_recovery.cli import (
    EXIT_INFEASIBLE,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_VALIDATION,
    app,
    exit_code_for,
)
from struct_recovery.errors import PlanInfeasibleError, ScenarioError, StructRecoveryError
from struct_recovery.sim.report import CSV_HEADER
from struct_recovery.structure.analysis import structural_observability
from struct_recovery.structure.system_file import load_system, save_system

runner = CliRunner()


@pytest.fixture
def system_file(tmp_path, dilation_pattern):
    return save_system(dilation_pattern, tmp_path / "dilation.json")


def _scenario_file(tmp_path, expect):
    document = {
        "name": "cycle",
        "system": {"n": 2, "edges": [[1, 2], [2, 1]], "sensors": [{"id": "s1", "states": [1]}]},
        "horizon": 20,
        "trials": 3,
        "seed": 4,
        "expect": expect,
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_exit_code_mapping():
    assert exit_code_for(ScenarioError("x")) == EXIT_VALIDATION
    assert exit_code_for(StructRecoveryError("x")) == 1
    plan = type("Plan", (), {"failed_sensor_id": "a", "diagnostic": "none"})()
    assert exit_code_for(PlanInfeasibleError(plan)) == EXIT_INFEASIBLE


class TestAnalyze:
    def test_observable_system(self, tmp_path, system_file):
        out = tmp_path / "report.json"
        result = runner.invoke(app, ["analyze", str(system_file), "--out", str(out)])

        assert result.exit_code == EXIT_OK, result.output
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["verdict"]["observable"] is True
        assert "timings" in report["runtime"]

    def test_unobservable_system_exits_3(self, tmp_path, dilation_pattern):
        path = save_system(dilation_pattern.without_sensor("b"), tmp_path / "reduced.json")
        result = runner.invoke(app, ["analyze", str(path)])
        assert result.exit_code == EXIT_INFEASIBLE

    def test_malformed_json_exits_2(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"n": 3, "edges": [[1, 2],', encoding="utf-8")

        result = runner.invoke(app, ["analyze", str(path)])
        assert result.exit_code == EXIT_VALIDATION

    def test_missing_file_exits_2(self, tmp_path):
        result = runner.invoke(app, ["analyze", str(tmp_path / "absent.json")])
        assert result.exit_code == EXIT_VALIDATION


def test_place_writes_an_observable_system(tmp_path, system_file):
    out = tmp_path / "placed.json"
    result = runner.invoke(app, ["place", str(system_file), "--out", str(out)])

    assert result.exit_code == EXIT_OK, result.output
    placed = load_system(out)
    assert placed.sensor_ids() == ["s1", "s2"]
    assert structural_observability(placed).observable


def test_classify_writes_roles(tmp_path, system_file):
    out = tmp_path / "roles.json"
    result = runner.invoke(app, ["classify", str(system_file), "--out", str(out)])

    assert result.exit_code == EXIT_OK, result.output
    assert out.exists()


class TestPlanRecovery:
    def test_feasible_sequence(self, tmp_path, system_file):
        out = tmp_path / "plan.json"
        result = runner.invoke(
            app, ["plan-recovery", str(system_file), "-s", "a", "-s", "b", "--out", str(out)]
        )

        assert result.exit_code == EXIT_OK, result.output
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["feasible"] is True
        assert [[p["replacement_id"] for p in plans] for plans in data["plans"]] == [["a'"], ["b'"]]
        assert [s["id"] for s in data["system"]["sensors"]] == ["a'", "b'"]

    def test_self_cycle_is_infeasible(self, tmp_path, self_loop_parent):
        path = save_system(self_loop_parent, tmp_path / "loop.json")
        out = tmp_path / "plan.json"
        result = runner.invoke(app, ["plan-recovery", str(path), "--sensor", "b", "--out", str(out)])

        assert result.exit_code == EXIT_INFEASIBLE
        assert json.loads(out.read_text(encoding="utf-8"))["feasible"] is False

    def test_unknown_sensor_exits_2(self, system_file):
        result = runner.invoke(app, ["plan-recovery", str(system_file), "-s", "zz"])
        assert result.exit_code == EXIT_VALIDATION


class TestSimulate:
    def test_matching_expectations(self, tmp_path):
        scenario = _scenario_file(tmp_path, {"nominal": "bounded"})
        out = tmp_path / "run"
        result = runner.invoke(app, ["simulate", str(scenario), "--out", str(out)])

        assert result.exit_code == EXIT_OK, result.output
        lines = (out / "mse.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 1 + 20
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert summary["trials"] == 3

    def test_flags_override_the_file(self, tmp_path):
        scenario = _scenario_file(tmp_path, {})
        out = tmp_path / "run"
        result = runner.invoke(
            app, ["simulate", str(scenario), "--out", str(out), "--horizon", "8", "--trials", "2"]
        )

        assert result.exit_code == EXIT_OK, result.output
        summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
        assert (summary["horizon"], summary["trials"]) == (8, 2)

    def test_mismatch_exits_4(self, tmp_path):
        scenario = _scenario_file(tmp_path, {"nominal": "divergent"})
        result = runner.invoke(app, ["simulate", str(scenario), "--out", str(tmp_path / "run")])
        assert result.exit_code == EXIT_MISMATCH

    def test_bad_scenario_exits_2(self, tmp_path):
        scenario = _scenario_file(tmp_path, {"failure:s9": "bounded"})
        result = runner.invoke(app, ["simulate", str(scenario), "--out", str(tmp_path / "run")])
        assert result.exit_code == EXIT_VALIDATION


class TestGen:
    def test_random_scenario(self, tmp_path):
        out = tmp_path / "random.json"
        result = runner.invoke(
            app, ["gen", "--out", str(out), "--n", "6", "--density", "0.3", "--seed", "2", "--trials", "5"]
        )

        assert result.exit_code == EXIT_OK, result.output
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["system"]["n"] == 6
        assert data["seed"] == 2
        assert data["trials"] == 5

    def test_benchmark_scenario(self, tmp_path):
        out = tmp_path / "bench.json"
        result = runner.invoke(
            app, ["gen", "--benchmark", "--failure", "beta", "--recover", "--out", str(out), "--seed", "3"]
        )

        assert result.exit_code == EXIT_OK, result.output
        data = json.loads(out.read_text(encoding="utf-8"))
        assert [e["kind"] for e in data["events"]] == ["failure", "recovery"]
        assert list(data["expect"].values()) == ["bounded", "bounded"]

    def test_unknown_failure_kind_exits_2(self, tmp_path):
        result = runner.invoke(
            app, ["gen", "--benchmark", "--failure", "gamma", "--out", str(tmp_path / "x.json")]
        )
        assert result.exit_code == EXIT_VALIDATION


@pytest.mark.parametrize(
    "command, fields",
    [
        ("analyze", ["edges", "sensors", "contractions", "verdict"]),
        ("place", ["edges", "sensors"]),
        ("classify", ["covered_contractions", "violations"]),
        ("plan-recovery", ["feasible", "plans"]),
        ("simulate", ["system_file", "scc_radii", "events", "steady_state_mse"]),
        ("gen", ["noise_measurement", "scc_radii", "events", "expect"]),
    ],
)
def test_help_documents_the_file_formats(command, fields):
    result = runner.invoke(app, [command, "--help"])

    assert result.exit_code == EXIT_OK
    for field in fields:
        assert field in result.output
