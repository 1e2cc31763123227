"""Executable model of weak-to-strong hardware binding for browser services.

The package has three legs: a static page classifier that decides whether
the weak graphics unit can composite a page, a per-pod binding state
machine that starts every page on weak hardware and upgrades on demand,
and calibrated simulators for the rendering and resource-loading pods
that reproduce the published performance and energy numbers at desk
scale. The `guadasim` CLI runs scenario files and built-in fixtures and
emits JSON/CSV reports plus figures.
"""

from .errors import (
    CapabilityError,
    ConfigError,
    EventOrderError,
    GuadasimError,
    IllegalTransitionError,
)
from .hardware import (
    DSP,
    GENERAL_PURPOSE,
    GRAPHICS_ACCEL,
    STRONG,
    WEAK,
    CapabilityTier,
    HardwareFixture,
    ProcessingUnit,
    Specialization,
    SpecializationGroup,
    energy_for_work,
    energy_reduction,
    idle_energy,
    power_at_clock,
    wake_transition_cost,
)
from .loading import (
    CacheFlushModel,
    Feasibility,
    NetworkModel,
    Resource,
    ResourceKind,
    StackPerfModel,
    cache_flush_cost,
    loading_switch_overhead,
    simulate_page_load,
    stack_throughput,
    weak_core_feasible,
)
from .pages import (
    CANONICAL_KEYWORDS,
    Category,
    CorpusStats,
    Mutation,
    MutationKind,
    PageSource,
    RenderingKind,
    RenderingRequirement,
    Requirement3D,
    analyze,
    apply_mutation,
    corpus_stats,
    load_page,
)
from .pods import (
    Decision,
    EventKind,
    MappingPod,
    PodState,
    RequirementEvent,
    SwitchRecord,
    create_pod,
    ordered_events,
)
from .rendering import (
    BackgroundApp,
    BrowserConfig,
    RenderPage,
    accel_utilization,
    composition_efficiency_ratio,
    contention,
    frame_rate,
    simulate_scroll,
    system_energy_saving,
    utilization_reduction,
)
from .report import Metric, ReportEvent, SimReport, emit_report, report_csv, report_json
from .scenario import BUILTIN_BROWSERS, ScenarioConfig, analyze_paths, run_scenario

__version__ = "0.1.0"
