"""Cost-equation model of the accelerated rendering pipeline.

Composition of a page's layer bitmaps is the hardware-accelerated stage.
A browser that composites 2D pages on the weak (2D) graphics unit needs
the strong (3D) unit only once per frame, to draw the browser application
itself; a legacy browser needs it twice, for application drawing and page
composition. Frame rate is quantized by the display refresh interval, and
the strong unit's remaining time budget bounds what a concurrent 3D
application can achieve.

Known calibration wrinkle: the three contention anchors (52 fps against a
30 fps two-unit browser, 6 fps against a 60 fps legacy browser, 44 fps
against a 30 fps legacy browser) are mutually inconsistent under one
linear budget with a single legacy per-frame cost. Fitting the first two
gives 15 ms per legacy frame, which predicts 33 fps, not 44, for the
legacy-at-30 case; that case needs its own fitted cost of 8.84 ms. Both
fitted costs ship as separate browser configs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapabilityError
from .hardware import power_at_clock
from .pods import EventKind, MappingPod, RequirementEvent
from .pages import Mutation, RenderingKind, RenderingRequirement, apply_mutation
from .report import SimReport

VSYNC_60HZ_MS = 16.7

# guards float rounding when frame work is an exact multiple of vsync
_QUANTIZE_EPS = 1e-9

# repaint model for a switch without prepared strong-unit structures
DEFAULT_REPAINT_MS_PER_LAYER = 40.0


@dataclass(frozen=True)
class RenderPage:
    """Per-frame rendering costs of one analyzed page."""

    layer_count: int
    composite_latency_2d_ms: float
    composite_latency_3d_ms: float
    other_frame_work_ms: float
    requirement: RenderingRequirement

    def __post_init__(self) -> None:
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        if self.composite_latency_2d_ms <= 0 or self.composite_latency_3d_ms <= 0:
            raise ValueError("composite latencies must be > 0")
        if self.other_frame_work_ms < 0:
            raise ValueError("other_frame_work_ms must be >= 0")


@dataclass(frozen=True)
class BrowserConfig:
    """Which unit composites pages, and the strong unit's per-frame costs."""

    name: str
    uses_2d_compositor: bool
    app_draw_cost_3d_ms: float
    page_composite_cost_3d_ms: float
    target_fps_cap: float = 60.0

    def __post_init__(self) -> None:
        if self.app_draw_cost_3d_ms < 0 or self.page_composite_cost_3d_ms < 0:
            raise ValueError("per-frame costs must be >= 0")
        if not 0 < self.target_fps_cap <= 60:
            raise ValueError("target_fps_cap must be in (0, 60]")

    @property
    def activities_per_frame(self) -> int:
        return 1 if self.uses_2d_compositor else 2

    @property
    def busy_3d_ms_per_frame(self) -> float:
        extra = 0.0 if self.uses_2d_compositor else self.page_composite_cost_3d_ms
        return self.app_draw_cost_3d_ms + extra


@dataclass(frozen=True)
class BackgroundApp:
    """A concurrent 3D application competing for the strong graphics unit."""

    draw_cost_3d_ms: float
    compositor_cost_3d_ms: float
    standalone_fps: int

    def __post_init__(self) -> None:
        if self.draw_cost_3d_ms <= 0 or self.compositor_cost_3d_ms < 0:
            raise ValueError("background app costs must be positive")
        if self.standalone_fps <= 0:
            raise ValueError("standalone_fps must be > 0")
        # 1% slack: a vsync-quantized fps understates the per-frame budget
        # (60 fps at 16.7 ms/frame fills 1002 ms of each second)
        per_frame = self.draw_cost_3d_ms + self.compositor_cost_3d_ms
        if per_frame > 1.01 * 1000.0 / self.standalone_fps:
            raise ValueError(
                f"per-frame cost {per_frame} ms cannot sustain {self.standalone_fps} fps"
            )


def frame_rate(page: RenderPage, use_2d: bool, vsync_ms: float = VSYNC_60HZ_MS) -> float:
    """Achievable fps: frames land on refresh boundaries, so 60/n for integer n.

    A frame whose work spills past one refresh interval waits for the
    next, halving (or worse) the rate.
    """
    if vsync_ms <= 0:
        raise ValueError("vsync must be > 0")
    if use_2d and page.requirement.kind is RenderingKind.THREE_D:
        raise CapabilityError(
            "page requires 3D-only capabilities; the 2D unit cannot composite it"
        )
    composite = page.composite_latency_2d_ms if use_2d else page.composite_latency_3d_ms
    work_ms = composite + page.other_frame_work_ms
    intervals = max(1, math.ceil(work_ms / vsync_ms - _QUANTIZE_EPS))
    return 60.0 / intervals


@dataclass(frozen=True)
class AccelUtilization:
    activities_per_s: float
    busy_ms_per_s: float


def accel_utilization(browser: BrowserConfig, fps: float) -> AccelUtilization:
    """Strong-unit activity count and busy time per second of scrolling."""
    if fps <= 0:
        raise ValueError("fps must be > 0")
    return AccelUtilization(
        activities_per_s=fps * browser.activities_per_frame,
        busy_ms_per_s=fps * browser.busy_3d_ms_per_frame,
    )


def utilization_reduction(
    browser_a: BrowserConfig, fps_a: float, browser_b: BrowserConfig, fps_b: float
) -> float:
    """Fractional reduction in strong-unit activities of a versus b."""
    a = accel_utilization(browser_a, fps_a).activities_per_s
    b = accel_utilization(browser_b, fps_b).activities_per_s
    return 1.0 - a / b


def contention(browser: BrowserConfig, browser_fps: float, bg: BackgroundApp) -> int:
    """Background app fps when the browser's strong-unit needs are served first.

    Linear budget over one second of strong-unit time; the background rate
    is the nearest whole frame count the leftover budget sustains, capped
    at the app's standalone rate.
    """
    demand_ms = accel_utilization(browser, browser_fps).busy_ms_per_s
    if demand_ms > 1000.0:
        raise ValueError(f"browser demand {demand_ms} ms/s exceeds the 1 s budget")
    remaining_ms = 1000.0 - demand_ms
    if remaining_ms <= 0:
        return 0
    per_frame = bg.draw_cost_3d_ms + bg.compositor_cost_3d_ms
    return min(bg.standalone_fps, round(remaining_ms / per_frame))


def composition_efficiency_ratio(
    power_ratio_3d_over_2d: float, latency_ratio_2d_over_3d: float
) -> float:
    """How many times less energy the 2D unit spends per composited frame."""
    if power_ratio_3d_over_2d <= 0 or latency_ratio_2d_over_3d <= 0:
        raise ValueError("ratios must be > 0")
    return power_ratio_3d_over_2d / latency_ratio_2d_over_3d


def system_energy_saving(saving_rate_mj_per_s: float, system_power_mw: float) -> float:
    """Fraction of whole-system energy saved per second of active composition."""
    if system_power_mw <= 0:
        raise ValueError("system power must be > 0")
    return saving_rate_mj_per_s / system_power_mw


def simulate_scroll(
    page: RenderPage,
    browser: BrowserConfig,
    pod: MappingPod,
    duration_s: float,
    *,
    vsync_ms: float = VSYNC_60HZ_MS,
    mutations: tuple[Mutation, ...] = (),
    bytes_per_layer: int | None = None,
    repaint_ms_per_layer: float = DEFAULT_REPAINT_MS_PER_LAYER,
    scenario_id: str = "scroll",
) -> SimReport:
    """Continuously composite the page, tracking frames, switches, and energy.

    With a 2D-compositing browser the pod starts on the weak unit and
    switches once if the page (or a scripted mutation) raises a 3D
    requirement; a legacy browser composites on the strong unit throughout
    and never touches the pod's state.
    """
    if duration_s <= 0:
        raise ValueError("duration must be > 0")
    duration_ms = duration_s * 1000.0
    use_pod = browser.uses_2d_compositor
    if use_pod and pod.is_loading_pod:
        raise ValueError("simulate_scroll requires a rendering pod")

    unit_2d, unit_3d = pod.group.weak, pod.group.strong
    power_2d = power_at_clock(unit_2d, unit_2d.max_clock_mhz)
    power_3d = power_at_clock(unit_3d, unit_3d.max_clock_mhz)

    report = SimReport(scenario_id=scenario_id)
    mode = "2d" if use_pod else "3d"
    prepared_bytes = 0
    switch_latency_ms = 0.0
    frame_cursor = 0.0
    requirement = page.requirement
    frame_count = 0
    busy_2d_ms = 0.0
    busy_3d_ms = 0.0
    composition_energy_mj = 0.0

    def fps_for(current_mode: str) -> float:
        rate = frame_rate(page, use_2d=(current_mode == "2d"), vsync_ms=vsync_ms)
        return min(rate, browser.target_fps_cap)

    def emit_frame(ts: float) -> None:
        nonlocal frame_count, busy_2d_ms, busy_3d_ms, composition_energy_mj
        if mode == "2d":
            compose_ms = page.composite_latency_2d_ms
            frame_busy_3d = browser.app_draw_cost_3d_ms
            energy_mj = (power_2d * compose_ms + power_3d * frame_busy_3d) / 1000.0
            busy_2d_ms += compose_ms
            activities = 1
        else:
            compose_ms = page.composite_latency_3d_ms
            frame_busy_3d = compose_ms + browser.app_draw_cost_3d_ms
            energy_mj = power_3d * frame_busy_3d / 1000.0
            activities = 2
        busy_3d_ms += frame_busy_3d
        composition_energy_mj += energy_mj
        frame_count += 1
        report.add_event(
            ts,
            "frame",
            mode=mode,
            work_ms=compose_ms + page.other_frame_work_ms,
            busy_3d_ms=frame_busy_3d,
            activities_3d=activities,
            energy_mj=energy_mj,
        )

    def render_until(end_ms: float) -> None:
        nonlocal frame_cursor
        step = 1000.0 / fps_for(mode)
        while frame_cursor < end_ms - _QUANTIZE_EPS:
            emit_frame(frame_cursor)
            frame_cursor += step

    def trigger_strong(ts_ms: float, reason: str) -> None:
        nonlocal mode, switch_latency_ms, frame_cursor
        decision = pod.on_event(RequirementEvent(ts_ms, EventKind.NEED_STRONG, reason))
        report.add_event(ts_ms, "need_strong", reason=reason, decision=decision.value)
        if decision.value != "switch":
            if mode == "2d":
                raise CapabilityError(
                    f"pod in state {pod.state.value} refused to leave the weak unit "
                    f"for 3D requirement {reason!r}"
                )
            return
        record = pod.perform_switch(ts_ms, page.layer_count * repaint_ms_per_layer)
        switch_latency_ms = record.latency_ms
        report.add_event(
            ts_ms, "switch", latency_ms=record.latency_ms, completed_at_ms=record.completed_at_ms
        )
        mode = "3d"
        frame_cursor = max(frame_cursor, record.completed_at_ms)

    if use_pod:
        pod.on_event(RequirementEvent(0.0, EventKind.PAGE_OPEN))
        report.add_event(0.0, "page_open", service=pod.service)
        if bytes_per_layer is None:
            prepared_bytes = pod.redundant_prep_memory(page.layer_count)
        else:
            prepared_bytes = pod.redundant_prep_memory(page.layer_count, bytes_per_layer)
        if requirement.kind is RenderingKind.THREE_D:
            trigger_strong(0.0, requirement.reasons[0].keyword)

    for mutation in sorted(mutations, key=lambda m: m.timestamp_ms):
        if mutation.timestamp_ms >= duration_ms:
            break
        render_until(mutation.timestamp_ms)
        mutated = apply_mutation(requirement, mutation)
        introduced = len(mutated.reasons) > len(requirement.reasons)
        requirement = mutated
        report.add_event(
            mutation.timestamp_ms,
            "mutation",
            change=mutation.kind.value,
            value=mutation.value,
            introduces_3d=introduced,
        )
        if use_pod and introduced:
            trigger_strong(mutation.timestamp_ms, requirement.reasons[-1].keyword)
    render_until(duration_ms)
    report.add_event(duration_ms, "scroll_end")

    steady_fps = fps_for(mode)
    idle_2d_mj = unit_2d.idle_power_mw * max(0.0, duration_ms - busy_2d_ms) / 1000.0
    idle_3d_mj = unit_3d.idle_power_mw * max(0.0, duration_ms - busy_3d_ms) / 1000.0
    activities_final = 1 if mode == "2d" else 2
    report.set_metric("fps", steady_fps, "fps")
    report.set_metric("frames", frame_count, "count")
    report.set_metric("switch_count", pod.switch_count_this_page if use_pod else 0, "count")
    report.set_metric("switch_latency_ms", switch_latency_ms, "ms")
    report.set_metric("prepared_memory_bytes", prepared_bytes, "bytes")
    report.set_metric("activities_per_frame", activities_final, "count")
    report.set_metric("activities_per_s", steady_fps * activities_final, "1/s")
    report.set_metric(
        "busy_3d_ms_per_s",
        steady_fps
        * (
            browser.app_draw_cost_3d_ms
            + (0.0 if mode == "2d" else page.composite_latency_3d_ms)
        ),
        "ms/s",
    )
    report.set_metric("composition_energy_mj", composition_energy_mj, "mJ")
    report.set_metric("idle_energy_2d_mj", idle_2d_mj, "mJ")
    report.set_metric("idle_energy_3d_mj", idle_3d_mj, "mJ")
    report.set_metric("total_energy_mj", composition_energy_mj + idle_2d_mj + idle_3d_mj, "mJ")
    report.set_metric("duration_ms", duration_ms, "ms")
    return report
