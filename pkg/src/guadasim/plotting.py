"""Render report timelines and summary charts to image files.

Figures are derived purely from the report content, so a report rendered
twice produces the same set of files.
"""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import SimReport

_MODE_COLORS = {"2d": "tab:blue", "3d": "tab:red"}


def _safe_name(name: str) -> str:
    return re.sub(r"[^-A-Za-z0-9_.]", "_", name)


def render_report_figures(report: SimReport, out_dir: str | Path) -> list[Path]:
    """Write every figure the report supports; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = _safe_name(report.scenario_id)
    written = []
    for renderer in (_frames_figure, _loading_figure, _energy_table_figure, _contention_figure):
        result = renderer(report, out_dir, prefix)
        if result is not None:
            written.append(result)
    return written


def _frames_figure(report: SimReport, out_dir: Path, prefix: str) -> Path | None:
    frames = [ev for ev in report.events if ev.kind == "frame"]
    if not frames:
        return None
    fig, (ax_energy, ax_busy) = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
    browsers = sorted({ev.detail.get("browser", "") for ev in frames})
    for browser in browsers:
        for mode, color in _MODE_COLORS.items():
            pts = [
                (ev.timestamp_ms / 1000.0, ev.detail["energy_mj"], ev.detail["busy_3d_ms"])
                for ev in frames
                if ev.detail.get("browser", "") == browser and ev.detail.get("mode") == mode
            ]
            if not pts:
                continue
            xs, energies, busies = zip(*pts)
            label = f"{browser} {mode}".strip()
            ax_energy.plot(xs, energies, ".", ms=3, color=color, alpha=0.8, label=label)
            ax_busy.plot(xs, busies, ".", ms=3, color=color, alpha=0.8)
    for ev in report.events:
        if ev.kind == "switch":
            for ax in (ax_energy, ax_busy):
                ax.axvline(ev.timestamp_ms / 1000.0, color="k", ls="--", lw=0.8)
    ax_energy.set_ylabel("frame energy (mJ)")
    ax_busy.set_ylabel("3D unit busy (ms/frame)")
    ax_busy.set_xlabel("time (s)")
    ax_energy.legend(loc="best", fontsize=8)
    fig.suptitle(report.scenario_id)
    fig.tight_layout()
    path = out_dir / f"{prefix}_frames.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _loading_figure(report: SimReport, out_dir: Path, prefix: str) -> Path | None:
    completions = [ev for ev in report.events if ev.kind == "resource_complete"]
    if not completions:
        return None
    fig, ax = plt.subplots(figsize=(8, 4))
    times = [0.0]
    cumulative = [0]
    total = 0
    for ev in completions:
        total += ev.detail["size_bytes"]
        times.append(ev.timestamp_ms / 1000.0)
        cumulative.append(total)
    ax.step(times, [b / 1024.0 for b in cumulative], where="post", color="tab:blue")
    for ev in report.events:
        if ev.kind == "switch":
            ax.axvline(ev.timestamp_ms / 1000.0, color="k", ls="--", lw=0.8, label="switch to strong core")
        elif ev.kind == "first_packet":
            ax.axvline(ev.timestamp_ms / 1000.0, color="tab:gray", ls=":", lw=0.8, label="first packet")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("loaded (KB)")
    ax.set_title(report.scenario_id)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = out_dir / f"{prefix}_loading.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _energy_table_figure(report: SimReport, out_dir: Path, prefix: str) -> Path | None:
    rows = [ev for ev in report.events if ev.kind == "energy_table_row"]
    if not rows:
        return None
    fig, (ax_power, ax_reduction) = plt.subplots(1, 2, figsize=(8, 3.5))
    labels = [f"{ev.detail['clock_mhz']:g}" for ev in rows]
    ax_power.bar(labels, [ev.detail["power_mw"] for ev in rows], color="tab:blue")
    ax_power.set_xlabel("weak core clock (MHz)")
    ax_power.set_ylabel("power (mW)")
    ax_reduction.bar(labels, [100.0 * ev.detail["energy_reduction"] for ev in rows], color="tab:green")
    ax_reduction.set_xlabel("weak core clock (MHz)")
    ax_reduction.set_ylabel("energy reduction (%)")
    fig.suptitle(report.scenario_id)
    fig.tight_layout()
    path = out_dir / f"{prefix}_energy_table.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _contention_figure(report: SimReport, out_dir: Path, prefix: str) -> Path | None:
    cases = [ev for ev in report.events if ev.kind == "contention_case"]
    if not cases:
        return None
    fig, ax = plt.subplots(figsize=(6, 3.5))
    labels = [f"{ev.detail['browser']}\n@{ev.detail['browser_fps']:g} fps" for ev in cases]
    ax.bar(labels, [ev.detail["bg_fps"] for ev in cases], color="tab:purple")
    ax.set_ylabel("background app fps")
    ax.set_title(report.scenario_id)
    fig.tight_layout()
    path = out_dir / f"{prefix}_contention.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
