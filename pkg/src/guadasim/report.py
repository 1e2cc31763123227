"""Simulation reports: an ordered event timeline plus unit-tagged metrics.

Emission is bit-stable: keys are sorted, floats are printed with six
significant digits, and identical reports serialize to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class Metric:
    value: float | int | str
    unit: str


@dataclass(frozen=True)
class ReportEvent:
    timestamp_ms: float
    kind: str
    detail: dict = field(default_factory=dict)


@dataclass
class SimReport:
    scenario_id: str
    events: list[ReportEvent] = field(default_factory=list)
    metrics: dict[str, Metric] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add_event(self, timestamp_ms: float, kind: str, **detail) -> None:
        if self.events and timestamp_ms < self.events[-1].timestamp_ms:
            raise ValueError(
                f"event {kind!r} at {timestamp_ms} ms would break timeline order "
                f"(last event at {self.events[-1].timestamp_ms} ms)"
            )
        self.events.append(ReportEvent(timestamp_ms, kind, detail))

    def set_metric(self, name: str, value: float | int | str, unit: str) -> None:
        self.metrics[name] = Metric(value, unit)

    def metric(self, name: str) -> float | int | str:
        return self.metrics[name].value

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "events": [
                {"timestamp_ms": ev.timestamp_ms, "kind": ev.kind, **ev.detail}
                for ev in self.events
            ],
            "metrics": {
                name: {"value": m.value, "unit": m.unit} for name, m in self.metrics.items()
            },
            "warnings": list(self.warnings),
        }


def _round_floats(obj):
    """Round every float to 6 significant digits for stable output."""
    if isinstance(obj, float):
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def report_json(report: SimReport) -> str:
    return json.dumps(_round_floats(report.to_dict()), sort_keys=True, indent=2) + "\n"


def report_csv(report: SimReport) -> str:
    """One row per event; columns are the sorted union of detail keys."""
    detail_keys = sorted({key for ev in report.events for key in ev.detail})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["timestamp_ms", "kind", *detail_keys])
    for ev in report.events:
        row = [_format_cell(ev.timestamp_ms), ev.kind]
        row.extend(_format_cell(ev.detail.get(key, "")) for key in detail_keys)
        writer.writerow(row)
    return buf.getvalue()


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def emit_report(report: SimReport, format: str = "json", dest: str | Path | None = None) -> None:
    """Write the report to a path or stdout ('-' or None)."""
    if format == "json":
        payload = report_json(report)
    elif format == "csv":
        payload = report_csv(report)
    else:
        raise ValueError(f"unknown report format {format!r}")
    if dest is None or dest == "-":
        sys.stdout.write(payload)
        return
    Path(dest).write_text(payload, encoding="utf-8")
