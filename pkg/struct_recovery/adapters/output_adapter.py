#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Output Adapter - Abstract interface for terminal output

Subcommands render their results through this interface. Primitive output
(panel, table, text) is left to the implementation; the domain renderers
(analysis, classification, plans, simulation summary) are built on top of it.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence

from ..structure.analysis import AnalysisReport, SensorClassification, SensorPlacement


def _states(states: Sequence[int]) -> str:
    return ", ".join(str(s) for s in states) or "-"


class OutputAdapter(ABC):
    """Abstract output adapter interface."""

    @abstractmethod
    def panel(self, content: str, title: str = "", border_style: str = "blue") -> None:
        """
        Display a panel with content.

        Args:
            content: Panel content text
            title: Panel title
            border_style: Border color/style
        """

    @abstractmethod
    def table(self, headers: List[str], rows: List[List[str]], title: str = "") -> None:
        """
        Display a table.

        Args:
            headers: Column headers
            rows: Table rows
            title: Table title
        """

    @abstractmethod
    def text(self, content: str, style: str = "") -> None:
        pass

    def info(self, content: str) -> None:
        self.text(f"[blue]ℹ {content}[/blue]")

    def success(self, content: str) -> None:
        self.text(f"[green]✓ {content}[/green]")

    def warning(self, content: str) -> None:
        self.text(f"[yellow]⚠ {content}[/yellow]")

    def error(self, content: str) -> None:
        self.text(f"[red]✗ {content}[/red]")

    # ---- domain renderers ----
    def analysis(self, report: AnalysisReport) -> None:
        verdict = report.verdict
        lines = [
            f"states: {report.pattern.n}   edges: {len(report.pattern.edges)}   "
            f"sensors: {len(report.pattern.measurement_entries)}",
            f"maximum matching: {report.matching.size}   "
            f"unmatched: {_states(sorted(report.matching.unmatched_left))}",
            f"contraction sets: {len(report.contractions)}   "
            f"parent SCCs: {len(report.partition.parent_ids())}",
            f"minimal placement: m = {report.placement.m}",
        ]
        if report.unreachable:
            lines.append(f"no path to a measured state: {_states(report.unreachable)}")
        style = "green" if verdict.observable else "red"
        title = "observable" if verdict.observable else "not observable"
        self.panel("\n".join(lines), title=f"Structural analysis: {title}", border_style=style)

        if report.contractions:
            self.table(
                ["id", "states", "deficiency", "free"],
                [
                    [str(c.id), _states(c.sorted_states()), str(c.deficiency), _states(sorted(c.free_states))]
                    for c in report.contractions
                ],
                title="Contraction sets",
            )
        parents = report.partition.parent_ids()
        self.table(
            ["id", "states", "parent"],
            [
                [str(cid), _states(sorted(comp)), "yes" if cid in parents else ""]
                for cid, comp in enumerate(report.partition.components, start=1)
            ],
            title="Strongly connected components",
        )
        for message in verdict.messages():
            self.warning(message)

    def placement(self, placement: SensorPlacement) -> None:
        self.table(
            ["sensor", "state", "type", "covers"],
            [
                [
                    f"s{k}",
                    str(r.state),
                    r.type.value,
                    f"contraction {r.contraction_id}" if r.contraction_id is not None else f"SCC {r.scc_id}",
                ]
                for k, r in enumerate(placement.requirements, start=1)
            ],
            title=f"Minimal placement (m = {placement.m})",
        )

    def classification(self, classification: SensorClassification) -> None:
        rows = []
        for sid in classification.sensor_ids():
            role = classification[sid]
            rows.append(
                [
                    sid,
                    role.type.value,
                    _states(role.states),
                    _states(role.covered_contractions),
                    _states(role.covered_parent_sccs),
                ]
            )
        self.table(["sensor", "type", "states", "contractions", "parent SCCs"], rows, title="Sensor roles")
        for violation in classification.violations:
            self.warning(violation.message)

    def plans(self, plans: Sequence[Any]) -> None:
        if not plans:
            self.info("no recovery needed: the failed sensor is redundant")
            return
        rows = []
        for plan in plans:
            rows.append(
                [
                    plan.failed_sensor_id,
                    plan.failed_type.value,
                    str(plan.failed_state),
                    _states(plan.equivalent_states),
                    "-" if plan.chosen_state is None else str(plan.chosen_state),
                    plan.replacement_id,
                    plan.connectivity.value,
                ]
            )
        self.table(
            ["failed", "type", "state", "equivalent", "chosen", "replacement", "connectivity"],
            rows,
            title="Recovery plans",
        )
        for plan in plans:
            if plan.feasible:
                self.success(f"{plan.failed_sensor_id}: {plan.diagnostic}")
            else:
                self.error(f"{plan.failed_sensor_id}: {plan.diagnostic}")

    def simulation(self, summary: Dict[str, Any]) -> None:
        rows = []
        for phase in summary["phases"]:
            expected = phase["expected"] or "-"
            rows.append(
                [
                    phase["label"],
                    f"{phase['start']}-{phase['end']}",
                    ", ".join(phase["sensors"]),
                    f"{phase['rho']:.4f}",
                    "yes" if phase["observable"] else "no",
                    phase["verdict"],
                    expected,
                ]
            )
        self.table(
            ["phase", "steps", "sensors", "rho", "observable", "verdict", "expected"],
            rows,
            title=f"Simulation {summary['scenario']} ({summary['trials']} trials)",
        )
        if summary["mismatches"]:
            self.error(f"verdict mismatches: {', '.join(summary['mismatches'])}")
        else:
            self.success("every phase matches its expectation")
