"""Per-pod weak-to-strong binding state machine.

A mapping pod is a browser service bound to one hardware specialization
group. Every page starts on the group's weak unit; when the running page
needs capability or performance the weak unit cannot deliver, the pod
switches to the strong unit exactly once, and only a new page brings it
back to the weak unit. Data structures for the strong unit can be
prepared redundantly while still on the weak unit, so the eventual switch
costs only the base switch latency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import EventOrderError, IllegalTransitionError
from .hardware import ProcessingUnit, SpecializationGroup

# A full-page graphics layer bitmap; also the minimum redundant-prep cost
# since every page has at least one layer.
DEFAULT_BYTES_PER_LAYER = int(4.5 * 2**20)
DEFAULT_MEMORY_LIMIT_BYTES = 256 * 2**20

DEFAULT_RENDER_SWITCH_LATENCY_MS = 4.5

LOADING_SERVICE = "resource_loading"


class PodState(Enum):
    WEAK_ACTIVE = "weak_active"
    SWITCH_PENDING = "switch_pending"
    STRONG_ACTIVE = "strong_active"


class EventKind(Enum):
    PAGE_OPEN = "page_open"
    NEED_STRONG = "need_strong"
    WORKLOAD_BELOW_WEAK_CAPACITY = "workload_below_weak_capacity"
    WORKLOAD_ABOVE_WEAK_CAPACITY = "workload_above_weak_capacity"


# Events that demand the strong unit while on the weak one.
_STRONG_TRIGGERS = (EventKind.NEED_STRONG, EventKind.WORKLOAD_ABOVE_WEAK_CAPACITY)


class Decision(Enum):
    STAY = "stay"
    SWITCH = "switch"
    RESET = "reset"


@dataclass(frozen=True)
class RequirementEvent:
    """An application-state observation delivered to a pod."""

    timestamp_ms: float
    kind: EventKind
    reason: str | None = None

    def __post_init__(self) -> None:
        if self.kind is EventKind.NEED_STRONG and not self.reason:
            raise ValueError("NEED_STRONG events require a non-empty reason")


@dataclass(frozen=True)
class SwitchRecord:
    latency_ms: float
    completed_at_ms: float


@dataclass(frozen=True)
class LogEntry:
    timestamp_ms: float
    event: str
    state_before: PodState
    state_after: PodState
    detail: str | None = None


class MappingPod:
    """Single-owner mutable binding state for one browser service.

    Not safe for concurrent mutation; independent pods never coordinate.
    """

    def __init__(
        self,
        service: str,
        group: SpecializationGroup,
        redundant_prep: bool,
        base_switch_latency_ms: float = DEFAULT_RENDER_SWITCH_LATENCY_MS,
        memory_limit_bytes: int = DEFAULT_MEMORY_LIMIT_BYTES,
    ):
        if not service:
            raise ValueError("service name must be non-empty")
        if base_switch_latency_ms < 0:
            raise ValueError("base switch latency must be >= 0")
        self.service = service
        self.group = group
        self.redundant_prep = redundant_prep
        self.base_switch_latency_ms = base_switch_latency_ms
        self.memory_limit_bytes = memory_limit_bytes
        self.state = PodState.WEAK_ACTIVE
        self.prepared_strong_bytes = 0
        self.prep_stopped = False
        self.switch_count_this_page = 0
        self.event_log: list[LogEntry] = []

    @property
    def active_unit(self) -> ProcessingUnit:
        """The unit currently executing the pod's work."""
        if self.state is PodState.STRONG_ACTIVE:
            return self.group.strong
        return self.group.weak

    @property
    def is_loading_pod(self) -> bool:
        return self.service == LOADING_SERVICE

    def _log(self, timestamp_ms: float, event: str, before: PodState, detail: str | None = None) -> None:
        self.event_log.append(LogEntry(timestamp_ms, event, before, self.state, detail))

    def _check_order(self, timestamp_ms: float) -> None:
        if self.event_log and timestamp_ms < self.event_log[-1].timestamp_ms:
            raise EventOrderError(
                f"{self.service}: event at {timestamp_ms} ms precedes log head "
                f"at {self.event_log[-1].timestamp_ms} ms"
            )

    def on_event(self, ev: RequirementEvent) -> Decision:
        """Apply one application-state event and return the policy decision.

        PAGE_OPEN resets to the weak unit and clears prepared structures.
        A strong trigger while on the weak unit arms the switch; once the
        strong unit is active nothing but a new page moves the pod, and a
        workload drop never causes a downgrade mid-page.
        """
        self._check_order(ev.timestamp_ms)
        before = self.state
        if ev.kind is EventKind.PAGE_OPEN:
            self.state = PodState.WEAK_ACTIVE
            self.prepared_strong_bytes = 0
            self.prep_stopped = False
            self.switch_count_this_page = 0
            decision = Decision.RESET
        elif ev.kind in _STRONG_TRIGGERS and self.state is PodState.WEAK_ACTIVE:
            self.state = PodState.SWITCH_PENDING
            decision = Decision.SWITCH
        else:
            decision = Decision.STAY
        self._log(ev.timestamp_ms, ev.kind.value, before, ev.reason)
        return decision

    def perform_switch(self, now_ms: float, strong_prep_cost_if_unprepared_ms: float = 0.0) -> SwitchRecord:
        """Complete the armed weak-to-strong switch.

        With redundant preparation the strong unit's data structures are
        already built and the cost is the base switch latency alone;
        otherwise the full preparation cost is paid on top.
        """
        self._check_order(now_ms)
        if self.state is not PodState.SWITCH_PENDING:
            raise IllegalTransitionError(
                f"{self.service}: perform_switch requires SWITCH_PENDING, pod is {self.state.value}"
            )
        latency = self.base_switch_latency_ms
        if not self.redundant_prep:
            latency += strong_prep_cost_if_unprepared_ms
        before = self.state
        self.state = PodState.STRONG_ACTIVE
        self.switch_count_this_page = 1
        self._log(now_ms, "switch", before, f"latency_ms={latency:g}")
        return SwitchRecord(latency_ms=latency, completed_at_ms=now_ms + latency)

    def redundant_prep_memory(self, layer_count: int, bytes_per_layer: int = DEFAULT_BYTES_PER_LAYER) -> int:
        """Bytes held by redundantly prepared strong-unit structures.

        Only meaningful while on the weak unit with preparation enabled.
        A loading pod prepares only URLs, modeled as zero bytes. The result
        is capped at the pod's memory limit; hitting the cap stops further
        preparation and sets prep_stopped.
        """
        if bytes_per_layer <= 0:
            raise ValueError("bytes_per_layer must be positive")
        if self.is_loading_pod:
            return 0
        if layer_count < 1:
            raise ValueError("rendering pods require layer_count >= 1")
        if not (self.redundant_prep and self.state is PodState.WEAK_ACTIVE):
            return 0
        requested = layer_count * bytes_per_layer
        if requested > self.memory_limit_bytes:
            self.prep_stopped = True
            requested = self.memory_limit_bytes
        self.prepared_strong_bytes = requested
        return requested

    def event_log_jsonl(self) -> str:
        """Event log as JSON lines, one event or transition per line."""
        lines = []
        for entry in self.event_log:
            record = {
                "timestamp_ms": entry.timestamp_ms,
                "pod": self.service,
                "event": entry.event,
                "state_before": entry.state_before.value,
                "state_after": entry.state_after.value,
            }
            if entry.detail is not None:
                record["detail"] = entry.detail
            lines.append(json.dumps(record, sort_keys=True))
        return "\n".join(lines)


def create_pod(
    service: str,
    group: SpecializationGroup,
    redundant_prep: bool,
    base_switch_latency_ms: float = DEFAULT_RENDER_SWITCH_LATENCY_MS,
    memory_limit_bytes: int = DEFAULT_MEMORY_LIMIT_BYTES,
) -> MappingPod:
    """Create a pod bound to its group's weak unit with an empty log."""
    return MappingPod(service, group, redundant_prep, base_switch_latency_ms, memory_limit_bytes)


def ordered_events(events: list[RequirementEvent]) -> list[RequirementEvent]:
    """Stable delivery order: by timestamp, PAGE_OPEN first on ties.

    A new page supersedes requirements raised at the same instant.
    """
    return sorted(events, key=lambda ev: (ev.timestamp_ms, ev.kind is not EventKind.PAGE_OPEN))
