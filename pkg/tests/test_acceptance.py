"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one pass/fail line; run with `pytest tests/test_acceptance.py -v -s`
to see them inline.
"""

from __future__ import annotations

import json
import random
import re
import subprocess
import sys
import time

import pytest

from oracle_support import substring_oracle

import guadasim.cli as cli
from guadasim.fixtures import find_fixture
from guadasim.pages import (
    Mutation,
    MutationKind,
    PageSource,
    RenderingKind,
    analyze,
    apply_mutation,
    load_page,
)
from guadasim.pods import (
    DEFAULT_BYTES_PER_LAYER,
    Decision,
    EventKind,
    PodState,
    RequirementEvent,
    create_pod,
)
from guadasim.rendering import (
    BackgroundApp,
    RenderPage,
    composition_efficiency_ratio,
    contention,
    frame_rate,
    system_energy_saving,
    utilization_reduction,
)
from guadasim.report import report_csv, report_json
from guadasim.scenario import BUILTIN_BROWSERS, ScenarioConfig, run_scenario
from guadasim.pages import TWO_D

from test_pods import graphics_group


@pytest.fixture(autouse=True)
def acceptance_line(request):
    yield
    rep = getattr(request.node, "rep_call", None)
    if rep is not None:
        status = "PASS" if rep.passed else "FAIL"
        doc = (request.function.__doc__ or request.node.name).strip().splitlines()[0]
        print(f"[acceptance] {status}: {doc}")


def test_criterion_1_energy_table_reproduction(capsys):
    """C1: energy-table prints 15.7% +-0.5pp, 56.2% +-1pp, 36.0% with 39.3% footnote, <1s."""
    start = time.perf_counter()
    code = cli.main(["energy-table"])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert code == 0
    assert elapsed < 1.0
    percents = {float(m) for m in re.findall(r"(\d+\.\d)%", out)}
    assert any(abs(p - 15.7) <= 0.5 for p in percents), percents
    assert any(abs(p - 56.2) <= 1.0 for p in percents), percents
    assert 36.0 in percents
    footnote = [line for line in out.splitlines() if line.startswith("[1]")]
    assert footnote and "39.3" in footnote[0] and "36.0" in footnote[0]


def test_criterion_2_frame_rate_band():
    """C2: 12.6 ms 2D composition plus any other work in (4.1, 20.8] ms gives exactly 30 fps, <1s."""
    start = time.perf_counter()
    steps = 1000
    for i in range(1, steps + 1):
        other = 4.1 + (20.8 - 4.1) * i / steps
        page = RenderPage(1, 12.6, 6.3, other, TWO_D)
        assert frame_rate(page, use_2d=True) == 30.0, other
    # band edges: 4.1 itself still fits one refresh interval
    assert frame_rate(RenderPage(1, 12.6, 6.3, 4.1, TWO_D), use_2d=True) == 60.0
    assert frame_rate(RenderPage(1, 12.6, 6.3, 20.81, TWO_D), use_2d=True) == 20.0
    assert time.perf_counter() - start < 1.0


def test_criterion_3_utilization_reduction():
    """C3: one activity at 30 fps vs two at 60 fps is exactly 75%; equal fps exactly 50%."""
    guadalupe, chrome = BUILTIN_BROWSERS["guadalupe"], BUILTIN_BROWSERS["chrome"]
    assert utilization_reduction(guadalupe, 30, chrome, 60) == 0.75
    for fps in (10, 30, 60):
        assert utilization_reduction(guadalupe, fps, chrome, fps) == 0.5


def test_criterion_4_contention_anchors():
    """C4: fitted costs give 52/6 fps (767% span); the 44 fps case needs its own 8.84 ms fit."""
    bg = BackgroundApp(draw_cost_3d_ms=10.0, compositor_cost_3d_ms=6.7, standalone_fps=60)
    fast = contention(BUILTIN_BROWSERS["guadalupe"], 30, bg)
    slow = contention(BUILTIN_BROWSERS["chrome"], 60, bg)
    assert (fast, slow) == (52, 6)
    assert round(100 * (fast / slow - 1)) == 767
    # the single 15 ms fit cannot reproduce the 44 fps anchor
    assert contention(BUILTIN_BROWSERS["chrome"], 30, bg) != 44
    assert contention(BUILTIN_BROWSERS["chrome-30"], 30, bg) == 44
    assert BUILTIN_BROWSERS["chrome-30"].busy_3d_ms_per_frame == pytest.approx(8.84)
    # the inconsistency is documented where the fitted configs ship
    config = ScenarioConfig.from_file(find_fixture("paper-contention"))
    report = run_scenario(config)
    assert any("8.84" in w and "44" in w for w in report.warnings)


def test_criterion_5_system_energy_and_efficiency():
    """C5: 80 mJ/s of 1700 mW is 4.7% +-0.05pp; efficiency ratio (12, 2) is exactly 6."""
    assert abs(system_energy_saving(80.0, 1700.0) - 0.047) <= 0.0005
    assert composition_efficiency_ratio(12.0, 2.0) == 6.0


def test_criterion_6_scheduler_randomized_sweep():
    """C6: 10^4 random 100-event sequences uphold the binding invariants, <30s."""
    start = time.perf_counter()
    rng = random.Random(0xC0FFEE)
    mb45 = DEFAULT_BYTES_PER_LAYER
    cap_bytes = 64 * mb45  # reachable cap: 64 layers' worth
    event_menu = (
        (EventKind.PAGE_OPEN, None),
        (EventKind.NEED_STRONG, "canvas"),
        (EventKind.WORKLOAD_ABOVE_WEAK_CAPACITY, None),
        (EventKind.WORKLOAD_BELOW_WEAK_CAPACITY, None),
    )
    group = graphics_group()
    for seq in range(10_000):
        pod = create_pod("rendering", group, True, memory_limit_bytes=cap_bytes)
        switches_this_page = 0
        now = 0.0
        for _ in range(100):
            kind, reason = event_menu[rng.randrange(4)]
            before = pod.state
            decision = pod.on_event(RequirementEvent(now, kind, reason))
            if decision is Decision.RESET:
                switches_this_page = 0
                assert pod.state is PodState.WEAK_ACTIVE
                assert pod.prepared_strong_bytes == 0
            elif decision is Decision.SWITCH:
                record = pod.perform_switch(now, strong_prep_cost_if_unprepared_ms=999.0)
                assert record.latency_ms == 4.5  # redundant prep: prep cost is irrelevant
                switches_this_page += 1
            # downgrades happen only through a page open
            if before is PodState.STRONG_ACTIVE and pod.state is not PodState.STRONG_ACTIVE:
                assert kind is EventKind.PAGE_OPEN
            assert switches_this_page <= 1
            assert pod.switch_count_this_page == switches_this_page
            now += 1.0
        # memory model: layers x 4.5 MB until the cap stops preparation
        probe = create_pod("rendering", group, True, memory_limit_bytes=cap_bytes)
        layers = rng.randrange(1, 100)
        expected = min(layers * mb45, cap_bytes)
        assert probe.redundant_prep_memory(layers) == expected
        assert probe.prep_stopped == (layers * mb45 > cap_bytes)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"sweep took {elapsed:.1f}s"


def test_criterion_7_classifier_oracle_and_monotonicity(corpus_dir):
    """C7: analyzer agrees with the substring oracle on all corpus pages; mutations never downgrade."""
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    assert len(manifest) >= 40
    for name in sorted(manifest):
        src, _ = load_page(corpus_dir / name)
        assert (analyze(src).kind is RenderingKind.THREE_D) == substring_oracle(src), name

    rng = random.Random(0xB00)
    menu = (
        (MutationKind.ADD_ELEMENT, "p"),
        (MutationKind.ADD_ELEMENT, "span"),
        (MutationKind.ADD_ELEMENT, "canvas"),
        (MutationKind.ADD_ELEMENT, "video"),
        (MutationKind.ADD_CSS_DECLARATION, "color"),
        (MutationKind.ADD_CSS_DECLARATION, "transform"),
        (MutationKind.ADD_CSS_DECLARATION, "-webkit-animation-name"),
        (MutationKind.SCRIPT_CALL, "layout()"),
        (MutationKind.SCRIPT_CALL, "getContext('webgl')"),
    )
    base = analyze(PageSource(html="<html><body><p>x</p></body></html>"))
    for _ in range(1_000):
        req = base
        was_3d = False
        for step in range(rng.randrange(5, 25)):
            kind, value = menu[rng.randrange(len(menu))]
            req = apply_mutation(req, Mutation(float(step), kind, value))
            if was_3d:
                assert req.kind is RenderingKind.THREE_D
            was_3d = req.kind is RenderingKind.THREE_D


def test_criterion_8_loading_model():
    """C8: throughput anchors and flush cost exact; 3G load has one 2.04 ms switch and tiny delta."""
    from guadasim.loading import CacheFlushModel, StackPerfModel, cache_flush_cost, stack_throughput

    stack = StackPerfModel(anchors=((50.0, 10.0), (200.0, 38.1)))
    assert stack_throughput(stack, 50.0) == 10.0
    assert stack_throughput(stack, 200.0) == 38.1
    assert cache_flush_cost(CacheFlushModel(32.0, 3000.0), 200.0) == 15.0

    config = ScenarioConfig.from_file(find_fixture("paper-loading-3g"))
    report = run_scenario(config)
    assert report.metric("phase1_ms") >= 2000.0
    assert report.metric("switch_count") == 1
    assert report.metric("switch_overhead_ms") <= 2.055
    delta = report.metric("total_ms") - report.metric("baseline_total_ms")
    assert delta <= report.metric("switch_overhead_ms") + 1e-9


def test_criterion_9_determinism():
    """C9: every fixture scenario run twice emits byte-identical reports."""
    for name in ("paper-energy-table", "paper-rendering", "paper-contention", "paper-loading-3g"):
        config = ScenarioConfig.from_file(find_fixture(name))
        first, second = run_scenario(config), run_scenario(config)
        assert report_json(first).encode() == report_json(second).encode(), name
        assert report_csv(first).encode() == report_csv(second).encode(), name
    # and through the CLI process boundary
    cmd = [sys.executable, "-m", "guadasim.cli", "run", "--fixture", "paper-loading-3g"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.returncode == 0 and a.stdout == b.stdout
