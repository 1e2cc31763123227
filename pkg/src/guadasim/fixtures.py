"""Built-in and user fixture resolution.

Fixtures are JSON files: hardware descriptions (units, groups, network
stack anchors, cache flush model) and ready-made scenarios. The search
path is GUADASIM_FIXTURE_DIR (when set) followed by the package's own
fixtures directory, so users can shadow or extend the built-ins.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from .errors import ConfigError
from .hardware import (
    CapabilityTier,
    HardwareFixture,
    ProcessingUnit,
    Specialization,
    SpecializationGroup,
)
from .loading import CacheFlushModel, StackPerfModel

FIXTURE_DIR_ENV = "GUADASIM_FIXTURE_DIR"
_PACKAGE_FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fixture_search_paths() -> list[Path]:
    paths = []
    env_dir = os.environ.get(FIXTURE_DIR_ENV)
    if env_dir:
        paths.append(Path(env_dir))
    paths.append(_PACKAGE_FIXTURES)
    return paths


def find_fixture(name: str) -> Path:
    """Resolve a fixture name (with or without .json) to a file path."""
    candidates = [name] if name.endswith(".json") else [name + ".json", name]
    for directory in fixture_search_paths():
        for candidate in candidates:
            path = directory / candidate
            if path.is_file():
                return path
    searched = ", ".join(str(p) for p in fixture_search_paths())
    raise ConfigError([f"fixture {name!r} not found (searched: {searched})"])


def builtin_fixture_names() -> list[str]:
    names = set()
    for directory in fixture_search_paths():
        if directory.is_dir():
            names.update(p.stem for p in directory.glob("*.json"))
    return sorted(names)


def _load_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON: {exc}"]) from exc


def load_hardware(source: str | Path | dict) -> HardwareFixture:
    """Build a HardwareFixture from a fixture name, file path, or inline dict."""
    if isinstance(source, dict):
        data = source
        label = data.get("name", "<inline>")
    else:
        path = Path(source)
        if not path.is_file():
            path = find_fixture(str(source))
        data = _load_json(path)
        label = str(path)
    problems = []
    for key in ("name", "units", "groups"):
        if key not in data:
            problems.append(f"{label}: hardware fixture missing {key!r}")
    if problems:
        raise ConfigError(problems)

    units: dict[str, ProcessingUnit] = {}
    for unit_id, spec in data["units"].items():
        try:
            units[unit_id] = ProcessingUnit(
                id=unit_id,
                specialization=Specialization(spec["specialization"]),
                tier=CapabilityTier(spec["tier"]),
                clock_points=tuple((c, p) for c, p in spec["clock_points"]),
                idle_power_mw=spec["idle_power_mw"],
                wake_latency_us=spec.get("wake_latency_us", 0.0),
                ipi_latency_us=spec.get("ipi_latency_us", 0.0),
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"units.{unit_id}: {exc}")
    groups: dict[str, SpecializationGroup] = {}
    for group_id, members in data["groups"].items():
        try:
            weak = units[members["weak"]]
            strong = units[members["strong"]]
            groups[group_id] = SpecializationGroup(
                specialization=weak.specialization, weak=weak, strong=strong
            )
        except KeyError as exc:
            problems.append(f"groups.{group_id}: unknown unit {exc}")
        except ValueError as exc:
            problems.append(f"groups.{group_id}: {exc}")
    if problems:
        raise ConfigError(problems)

    extras = {}
    if "stack_perf" in data:
        sp = data["stack_perf"]
        extras["stack_perf"] = StackPerfModel(
            anchors=tuple((c, t) for c, t in sp["anchors"]),
            per_packet_overhead_us=sp.get("per_packet_overhead_us", 300.0),
        )
    if "cache_flush" in data:
        cf = data["cache_flush"]
        extras["cache_flush"] = CacheFlushModel(
            cache_size_kb=cf["cache_size_kb"], flush_cycles=cf["flush_cycles"]
        )
    return HardwareFixture(name=data["name"], units=units, groups=groups, extras=extras)
