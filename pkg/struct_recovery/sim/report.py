#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Simulation outputs: the MSE CSV and the JSON summary.

CSV header is ``step,sensor_id,mse,phase``; one row per (step, alive sensor),
ordered by step then sensor id. Floats are written with ``repr`` so parsing
reproduces them exactly.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Tuple, Union

import numpy as np

from ..const import DIVERGENCE_WINDOW
from ..errors import SystemFileError
from .harness import SimulationReport

logger = logging.getLogger(__name__)

CSV_HEADER = ("step", "sensor_id", "mse", "phase")
CSV_NAME = "mse.csv"
SUMMARY_NAME = "summary.json"


class MseRow(NamedTuple):
    step: int
    sensor_id: str
    mse: float
    phase: str


def mse_rows(report: SimulationReport) -> List[MseRow]:
    rows = []
    for step in range(1, report.horizon + 1):
        label = report.phase_at(step).label
        for sid in report.sensor_ids:
            value = report.mse[sid][step - 1]
            if np.isnan(value):
                continue
            rows.append(MseRow(step, sid, float(value), label))
    return rows


def emit_csv(report: SimulationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in mse_rows(report):
        writer.writerow([row.step, row.sensor_id, repr(row.mse), row.phase])
    return buffer.getvalue()


def parse_csv(text: str) -> List[MseRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise SystemFileError(f"unexpected CSV header {header!r}, expected {','.join(CSV_HEADER)}")
    rows = []
    for lineno, record in enumerate(reader, start=2):
        try:
            step, sid, value, phase = record
            rows.append(MseRow(int(step), sid, float(value), phase))
        except ValueError as e:
            raise SystemFileError(f"malformed CSV row: {e}", line=lineno)
    return rows


def _steady_state(series: np.ndarray) -> float:
    window = series[-min(DIVERGENCE_WINDOW, series.size):]
    return float(np.mean(window)) if window.size else float("nan")


def summary(report: SimulationReport) -> Dict[str, Any]:
    """Deterministic summary; wall-clock fields live only under ``runtime``."""
    phases = []
    for phase in report.phases:
        phases.append(
            {
                "label": phase.label,
                "start": phase.start,
                "end": phase.end,
                "sensors": list(phase.sensor_ids),
                "rho": phase.rho,
                "observable": phase.observable,
                "gain_certified": phase.gain_certified,
                "verdict": phase.verdict.value,
                "sensor_verdicts": {sid: v.value for sid, v in sorted(phase.sensor_verdicts.items())},
                "expected": phase.expected.value if phase.expected is not None else None,
                "matches": phase.matches,
                "steady_state_mse": {
                    sid: _steady_state(report.mse[sid][phase.start - 1 : phase.end])
                    for sid in sorted(phase.sensor_ids)
                },
                "plans": [plan.to_dict() for plan in phase.plans],
            }
        )
    return {
        "scenario": report.name,
        "seed": report.seed,
        "trials": report.trials,
        "horizon": report.horizon,
        "phases": phases,
        "mismatches": [p.label for p in report.mismatches()],
        "runtime": dict(report.runtime),
    }


def write_outputs(report: SimulationReport, out_dir: Union[str, Path]) -> Tuple[Path, Path]:
    """Write the CSV and summary; nothing is left behind if either write fails."""
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    csv_path = target / CSV_NAME
    summary_path = target / SUMMARY_NAME
    try:
        csv_path.write_text(emit_csv(report), encoding="utf-8")
        summary_path.write_text(json.dumps(summary(report), indent=2) + "\n", encoding="utf-8")
    except Exception:
        for path in (csv_path, summary_path):
            path.unlink(missing_ok=True)
        raise
    logger.debug(f"wrote {csv_path} and {summary_path}")
    return csv_path, summary_path
