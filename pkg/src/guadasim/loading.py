"""Two-phase resource loading on asymmetric processors.

The main document is fetched on the weak core while the strong core
sleeps; loading it is network-bound, so a weak core whose stack keeps up
with the wireless bandwidth costs no time. Parsing the main resource
uncovers the subresources, system demand ramps up, and loading switches
to the strong core for the rest of the page. The one-time switch pays the
strong core's wake transition plus a cache flush (the cores are not
cache-coherent), and subresource transfers on the dependency frontier
share the link bandwidth equally.

Energy accounting keeps the inactive core offline: baseline (everything
pinned on the strong core) runs the strong core for the whole load, the
split policy runs the weak core for phase 1 and the strong core from the
switch onward.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, IllegalTransitionError
from .hardware import ProcessingUnit, SpecializationGroup, power_at_clock, wake_transition_cost
from .pods import EventKind, MappingPod, PodState, RequirementEvent
from .report import SimReport

_EPS_BITS = 1e-6


class ResourceKind(Enum):
    MAIN_HTML = "main_html"
    CSS = "css"
    SCRIPT = "script"
    IMAGE = "image"
    OTHER = "other"


@dataclass(frozen=True)
class Resource:
    url: str
    kind: ResourceKind
    size_bytes: int
    discovered_by: str | None = None

    def __post_init__(self) -> None:
        if not self.url:
            raise ValueError("resource url must be non-empty")
        if self.size_bytes <= 0:
            raise ValueError(f"{self.url}: size must be > 0")


@dataclass(frozen=True)
class NetworkModel:
    first_packet_latency_ms: float
    rtt_ms: float
    bandwidth_mbps: float

    def __post_init__(self) -> None:
        if min(self.first_packet_latency_ms, self.rtt_ms, self.bandwidth_mbps) <= 0:
            raise ValueError("network model parameters must all be > 0")


@dataclass(frozen=True)
class StackPerfModel:
    """Measured network-stack throughput anchors, (clock MHz, throughput Mbps)."""

    anchors: tuple[tuple[float, float], ...]
    per_packet_overhead_us: float = 300.0

    def __post_init__(self) -> None:
        anchors = tuple((float(c), float(t)) for c, t in self.anchors)
        object.__setattr__(self, "anchors", anchors)
        if not anchors:
            raise ValueError("stack model needs at least one anchor")
        for (c0, t0), (c1, t1) in zip(anchors, anchors[1:]):
            if c1 <= c0 or t1 <= t0:
                raise ValueError("anchors must be strictly increasing in clock and throughput")
        if self.per_packet_overhead_us <= 0:
            raise ValueError("per-packet overhead must be > 0")


@dataclass(frozen=True)
class CacheFlushModel:
    cache_size_kb: float
    flush_cycles: float

    def __post_init__(self) -> None:
        if self.cache_size_kb <= 0 or self.flush_cycles <= 0:
            raise ValueError("cache flush model parameters must be > 0")


def stack_throughput(model: StackPerfModel, clock_mhz: float) -> float:
    """Stack throughput (Mbps) at a clock: piecewise linear over the anchors.

    Beyond the end anchors the adjacent segment's slope extends linearly,
    floored at zero (single-anchor models extend flat).
    """
    if clock_mhz <= 0:
        raise ValueError("clock must be > 0")
    anchors = model.anchors
    for c, t in anchors:
        if clock_mhz == c:
            return t
    if len(anchors) == 1:
        return anchors[0][1]
    if clock_mhz < anchors[0][0]:
        (c0, t0), (c1, t1) = anchors[0], anchors[1]
    elif clock_mhz > anchors[-1][0]:
        (c0, t0), (c1, t1) = anchors[-2], anchors[-1]
    else:
        idx = max(i for i, (c, _) in enumerate(anchors) if c < clock_mhz)
        (c0, t0), (c1, t1) = anchors[idx], anchors[idx + 1]
    slope = (t1 - t0) / (c1 - c0)
    return max(0.0, t0 + slope * (clock_mhz - c0))


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    margin_mbps: float
    latency_fraction_of_rtt: float


def weak_core_feasible(model: StackPerfModel, clock_mhz: float, net: NetworkModel) -> Feasibility:
    """Can the weak core's stack keep up with the network at this clock?"""
    throughput = stack_throughput(model, clock_mhz)
    return Feasibility(
        feasible=throughput >= net.bandwidth_mbps,
        margin_mbps=throughput - net.bandwidth_mbps,
        latency_fraction_of_rtt=model.per_packet_overhead_us / (net.rtt_ms * 1000.0),
    )


def cache_flush_cost(model: CacheFlushModel, clock_mhz: float) -> float:
    """Microseconds to flush the weak core's cache at the given clock."""
    if clock_mhz <= 0:
        raise ValueError("clock must be > 0")
    return model.flush_cycles / clock_mhz


def loading_switch_overhead(
    strong: ProcessingUnit, flush: CacheFlushModel, weak_clock_mhz: float
) -> float:
    """Microseconds to hand loading to the strong core.

    IPI plus the strong core's power-state wake, plus the weak core
    flushing its cache so the strong core sees the loaded bytes.
    """
    return wake_transition_cost(strong) + cache_flush_cost(flush, weak_clock_mhz)


def _transfer_ms(size_bytes: int, rate_mbps: float, per_packet_us: float | None) -> float:
    ms = size_bytes * 8.0 / (rate_mbps * 1000.0)
    if per_packet_us is not None:
        packets = -(-size_bytes // 1000)
        ms += packets * per_packet_us / 1000.0
    return ms


def _validate_dag(resources: list[Resource]) -> tuple[Resource, dict[str, list[Resource]]]:
    problems = []
    mains = [r for r in resources if r.kind is ResourceKind.MAIN_HTML]
    if len(mains) != 1:
        problems.append(f"expected exactly one main_html resource, found {len(mains)}")
    by_url: dict[str, Resource] = {}
    for r in resources:
        if r.url in by_url:
            problems.append(f"duplicate resource url {r.url!r}")
        by_url[r.url] = r
    if problems:
        raise ConfigError(problems)
    main = mains[0]
    if main.discovered_by is not None:
        problems.append("the main resource cannot be discovered by another resource")
    children: dict[str, list[Resource]] = {r.url: [] for r in resources}
    for r in resources:
        if r is main:
            continue
        parent = r.discovered_by if r.discovered_by is not None else main.url
        if parent not in by_url:
            problems.append(f"{r.url}: discovered_by references unknown url {parent!r}")
        else:
            children[parent].append(r)
    if problems:
        raise ConfigError(problems)
    # every resource must be reachable from the main document; anything
    # unreached sits on a cycle
    reached = {main.url}
    frontier = [main.url]
    while frontier:
        url = frontier.pop()
        for child in children[url]:
            if child.url not in reached:
                reached.add(child.url)
                frontier.append(child.url)
    unreached = [r.url for r in resources if r.url not in reached]
    if unreached:
        raise ConfigError([f"dependency cycle or orphan involving: {', '.join(sorted(unreached))}"])
    return main, children


def _drain_frontier(
    children: dict[str, list[Resource]],
    start_urls: list[str],
    rate_mbps: float,
    start_ms: float,
    per_packet_us: float | None,
) -> list[tuple[float, Resource]]:
    """Processor-sharing transfer of the DAG below start_urls; returns completions."""
    remaining: dict[str, float] = {}
    resources: dict[str, Resource] = {}

    def activate(url: str) -> None:
        for child in children[url]:
            bits = child.size_bytes * 8.0
            if per_packet_us is not None:
                packets = -(-child.size_bytes // 1000)
                bits += packets * per_packet_us / 1000.0 * rate_mbps * 1000.0
            remaining[child.url] = bits
            resources[child.url] = child

    for url in start_urls:
        activate(url)
    completions: list[tuple[float, Resource]] = []
    now = start_ms
    rate_bits_per_ms = rate_mbps * 1000.0
    while remaining:
        share = rate_bits_per_ms / len(remaining)
        dt = min(bits / share for bits in remaining.values())
        now += dt
        finished = []
        for url in list(remaining):
            remaining[url] -= share * dt
            if remaining[url] <= _EPS_BITS:
                finished.append(url)
                del remaining[url]
        for url in sorted(finished):
            completions.append((now, resources[url]))
            activate(url)
    return completions


def simulate_page_load(
    resources: list[Resource],
    net: NetworkModel,
    hw: SpecializationGroup,
    pod: MappingPod,
    perf: StackPerfModel,
    flush: CacheFlushModel,
    weak_clock_mhz: float,
    strong_clock_mhz: float,
    *,
    include_per_packet_overhead: bool = False,
    scenario_id: str = "page_load",
) -> SimReport:
    """Load one page main-on-weak then subresources-on-strong.

    The switch fires exactly once, at main-resource completion, with
    latency loading_switch_overhead. The report carries the timeline, the
    per-phase durations and energies, and a strong-pinned baseline for
    comparison. Per-packet stack overhead is ignored by default (it is
    well under 1% of wireless RTT); enable include_per_packet_overhead for
    fine-grained timelines.
    """
    if not pod.is_loading_pod:
        raise ValueError("simulate_page_load requires a resource_loading pod")
    if pod.state is not PodState.WEAK_ACTIVE:
        raise IllegalTransitionError(f"loading pod must start WEAK_ACTIVE, is {pod.state.value}")
    main, children = _validate_dag(list(resources))
    per_packet = perf.per_packet_overhead_us if include_per_packet_overhead else None

    weak_rate = min(net.bandwidth_mbps, stack_throughput(perf, weak_clock_mhz))
    strong_rate = min(net.bandwidth_mbps, stack_throughput(perf, strong_clock_mhz))
    switch_ms = loading_switch_overhead(hw.strong, flush, weak_clock_mhz) / 1000.0
    pod.base_switch_latency_ms = switch_ms  # hardware-derived, not a pod constant

    report = SimReport(scenario_id=scenario_id)
    report.add_event(0.0, "phase1_start", url=main.url, core=hw.weak.id, rate_mbps=weak_rate)
    report.add_event(net.first_packet_latency_ms, "first_packet")
    main_done = net.first_packet_latency_ms + _transfer_ms(main.size_bytes, weak_rate, per_packet)
    report.add_event(
        main_done,
        "resource_complete",
        url=main.url,
        resource_kind=main.kind.value,
        size_bytes=main.size_bytes,
    )

    decision = pod.on_event(RequirementEvent(main_done, EventKind.WORKLOAD_ABOVE_WEAK_CAPACITY))
    report.add_event(main_done, "workload_above_weak_capacity", decision=decision.value)
    record = pod.perform_switch(main_done)
    report.add_event(main_done, "switch", latency_ms=record.latency_ms, completed_at_ms=record.completed_at_ms)

    phase2_start = record.completed_at_ms
    completions = _drain_frontier(children, [main.url], strong_rate, phase2_start, per_packet)
    if completions:
        report.add_event(phase2_start, "phase2_start", core=hw.strong.id, rate_mbps=strong_rate)
        for ts, resource in completions:
            report.add_event(
                ts,
                "resource_complete",
                url=resource.url,
                resource_kind=resource.kind.value,
                size_bytes=resource.size_bytes,
            )
        total_ms = completions[-1][0]
    else:
        total_ms = phase2_start
    report.add_event(total_ms, "load_complete")

    # strong-pinned baseline: identical network, no switch, strong core throughout
    baseline_phase1_ms = net.first_packet_latency_ms + _transfer_ms(main.size_bytes, strong_rate, per_packet)
    baseline_completions = _drain_frontier(children, [main.url], strong_rate, baseline_phase1_ms, per_packet)
    baseline_total_ms = baseline_completions[-1][0] if baseline_completions else baseline_phase1_ms

    weak_power = power_at_clock(hw.weak, weak_clock_mhz)
    strong_power = power_at_clock(hw.strong, strong_clock_mhz)
    phase2_ms = total_ms - phase2_start
    weak_phase1_mj = weak_power * main_done / 1000.0
    strong_active_mj = strong_power * (record.latency_ms + phase2_ms) / 1000.0
    total_mj = weak_phase1_mj + strong_active_mj
    baseline_phase1_mj = strong_power * baseline_phase1_ms / 1000.0
    baseline_total_mj = strong_power * baseline_total_ms / 1000.0

    report.set_metric("phase1_ms", main_done, "ms")
    report.set_metric("phase2_ms", phase2_ms, "ms")
    report.set_metric("switch_overhead_ms", record.latency_ms, "ms")
    report.set_metric("total_ms", total_ms, "ms")
    report.set_metric("switch_count", pod.switch_count_this_page, "count")
    report.set_metric("weak_rate_mbps", weak_rate, "Mbps")
    report.set_metric("strong_rate_mbps", strong_rate, "Mbps")
    report.set_metric("bytes_total", sum(r.size_bytes for r in resources), "bytes")
    report.set_metric("weak_phase1_energy_mj", weak_phase1_mj, "mJ")
    report.set_metric("strong_active_energy_mj", strong_active_mj, "mJ")
    report.set_metric("total_energy_mj", total_mj, "mJ")
    report.set_metric("baseline_phase1_ms", baseline_phase1_ms, "ms")
    report.set_metric("baseline_total_ms", baseline_total_ms, "ms")
    report.set_metric("baseline_phase1_energy_mj", baseline_phase1_mj, "mJ")
    report.set_metric("baseline_total_energy_mj", baseline_total_mj, "mJ")
    report.set_metric("phase1_energy_reduction", 1.0 - weak_phase1_mj / baseline_phase1_mj, "fraction")
    report.set_metric("energy_saving_vs_baseline", 1.0 - total_mj / baseline_total_mj, "fraction")
    return report
