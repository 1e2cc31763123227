"""Command-line scenario runner and report emitter.

Subcommands:
  analyze <paths...> [--json]     classify pages (directories expand to *.html)
  run <scenario-file>             run a scenario file
  run --fixture <name>            run a built-in scenario fixture
  energy-table [--hardware FILE]  weak-vs-strong loading energy table
  contention --browser N --browser-fps F   background-app frame rate

Exit codes: 0 success, 1 validation error, 2 runtime/model error,
3 partial failure (some inputs unreadable).

Set GUADASIM_FIXTURE_DIR to put a directory in front of the built-in
fixture search path.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, GuadasimError
from .fixtures import builtin_fixture_names, find_fixture, load_hardware
from .report import emit_report, report_csv, report_json
from .scenario import ScenarioConfig, analyze_paths, run_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guadasim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="classify pages as 2D or 3D")
    p_analyze.add_argument("paths", nargs="+", help=".html files or directories")
    p_analyze.add_argument("--json", action="store_true", help="emit the full JSON report")

    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("scenario", nargs="?", help="scenario file path")
    p_run.add_argument("--fixture", help="built-in scenario fixture name")
    p_run.add_argument("--format", choices=("json", "csv"), default="json")
    p_run.add_argument("--dest", default="-", help="output path, '-' for stdout")
    p_run.add_argument(
        "--out-dir",
        help="write <scenario>.json, <scenario>.csv and figures into this directory",
    )

    p_energy = sub.add_parser("energy-table", help="weak-vs-strong loading energy table")
    p_energy.add_argument("--hardware", help="hardware fixture name or file")
    p_energy.add_argument("--json", action="store_true", help="emit the full JSON report")

    p_cont = sub.add_parser("contention", help="background 3D app frame rate under contention")
    p_cont.add_argument("--browser", required=True, help="browser config name (e.g. guadalupe, chrome)")
    p_cont.add_argument("--browser-fps", required=True, type=float)
    p_cont.add_argument("--bg-draw", type=float, default=10.0, help="background draw cost, ms/frame")
    p_cont.add_argument("--bg-composite", type=float, default=6.7, help="background composition cost, ms/frame")
    p_cont.add_argument("--bg-standalone-fps", type=int, default=60)
    p_cont.add_argument("--json", action="store_true", help="emit the full JSON report")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "energy-table":
            return _cmd_energy_table(args)
        if args.command == "contention":
            return _cmd_contention(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_VALIDATION
    except (GuadasimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _scenario_from_args(args) -> ScenarioConfig:
    if bool(args.scenario) == bool(args.fixture):
        raise ConfigError(["run: give a scenario file or --fixture <name>, not both"])
    if args.fixture:
        try:
            return ScenarioConfig.from_file(find_fixture(args.fixture))
        except ConfigError as exc:
            known = ", ".join(builtin_fixture_names())
            raise ConfigError(exc.problems + [f"known fixtures: {known}"]) from exc
    return ScenarioConfig.from_file(args.scenario)


def _cmd_run(args) -> int:
    config = _scenario_from_args(args)
    report = run_scenario(config)
    if args.out_dir:
        # figures land next to the delimited output
        from .plotting import render_report_figures

        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        base = out_dir / report.scenario_id.replace("/", "_")
        json_path = base.with_suffix(".json")
        csv_path = base.with_suffix(".csv")
        json_path.write_text(report_json(report), encoding="utf-8")
        csv_path.write_text(report_csv(report), encoding="utf-8")
        figures = render_report_figures(report, out_dir)
        for path in (json_path, csv_path, *figures):
            print(path)
    else:
        emit_report(report, format=args.format, dest=args.dest)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    # unlike the analyze_only run type, unreadable paths here become
    # per-file error entries and the run continues
    report = analyze_paths(list(args.paths))
    if args.json:
        emit_report(report, format="json")
    else:
        for ev in report.events:
            if ev.kind == "page":
                reasons = ev.detail["reasons"]
                suffix = f"  [{reasons}]" if reasons else ""
                print(f"{ev.detail['requirement']:>3}  {ev.detail['path']}{suffix}")
            elif ev.kind == "page_error":
                print(f"ERR  {ev.detail['path']}  ({ev.detail['error']})")
        total = report.metric("total")
        if total:
            share = 100.0 * report.metric("two_d_count") / total
            print(
                f"{total} pages: {report.metric('two_d_count')} 2D ({share:.1f}%), "
                f"{report.metric('three_d_count')} 3D, {report.metric('error_count')} errors"
            )
        for warning in report.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    return EXIT_PARTIAL if report.metric("error_count") else EXIT_OK


def _energy_table_scenario(hardware: str | None) -> ScenarioConfig:
    if hardware is None:
        return ScenarioConfig.from_file(find_fixture("paper-energy-table"))
    hw = load_hardware(hardware)
    group_id = "cpu" if "cpu" in hw.groups else sorted(hw.groups)[0]
    group = hw.group(group_id)
    hardware_ref = str(Path(hardware).resolve()) if Path(hardware).is_file() else hardware
    return ScenarioConfig.from_dict(
        {
            "schema_version": 1,
            "scenario_id": f"energy-table-{hw.name}",
            "seed": 0,
            "hardware": hardware_ref,
            "run": {
                "type": "energy_table",
                "weak_unit": group.weak.id,
                "strong_unit": group.strong.id,
                "weak_clocks_mhz": [c for c, _ in group.weak.clock_points],
                "strong_clock_mhz": group.strong.min_clock_mhz,
            },
        }
    )


def _cmd_energy_table(args) -> int:
    config = _energy_table_scenario(args.hardware)
    report = run_scenario(config)
    if args.json:
        emit_report(report, format="json")
        return EXIT_OK
    rows = [ev for ev in report.events if ev.kind == "energy_table_row"]
    strong_clock = config.run["strong_clock_mhz"]
    strong_name = config.run["strong_unit"]
    strong_power = report.metric(f"strong_power_{strong_clock:g}mhz_mw")
    print("Loading compute energy: weak core vs pinning on the strong core")
    print(f"{'unit':<8}{'clock (MHz)':>12}{'power (mW)':>12}{'energy reduction':>20}")
    footnotes = []
    for ev in rows:
        clock = ev.detail["clock_mhz"]
        note = next(
            (w for w in report.warnings if w.startswith(f"{clock:g} MHz:")), None
        )
        marker = ""
        if note:
            footnotes.append(note)
            marker = f"  [{len(footnotes)}]"
        print(
            f"{ev.detail['unit']:<8}{clock:>12g}{ev.detail['power_mw']:>12.2f}"
            f"{ev.detail['energy_reduction']:>19.1%}{marker}"
        )
    print(f"{strong_name:<8}{strong_clock:>12g}{strong_power:>12.2f}{'(baseline)':>20}")
    for i, note in enumerate(footnotes, 1):
        print(f"[{i}] {note}")
    return EXIT_OK


def _cmd_contention(args) -> int:
    config = ScenarioConfig.from_dict(
        {
            "schema_version": 1,
            "scenario_id": f"contention-{args.browser}",
            "seed": 0,
            "run": {
                "type": "contention",
                "cases": [{"browser": args.browser, "browser_fps": args.browser_fps}],
                "background": {
                    "draw_cost_3d_ms": args.bg_draw,
                    "compositor_cost_3d_ms": args.bg_composite,
                    "standalone_fps": args.bg_standalone_fps,
                },
            },
        }
    )
    report = run_scenario(config)
    if args.json:
        emit_report(report, format="json")
        return EXIT_OK
    for ev in report.events:
        if ev.kind == "contention_case":
            print(
                f"{ev.detail['browser']} @ {ev.detail['browser_fps']:g} fps "
                f"(demand {ev.detail['browser_demand_ms_per_s']:.1f} ms/s) -> "
                f"background app {ev.detail['bg_fps']} fps"
            )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
