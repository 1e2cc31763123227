"""Heterogeneous processing units: power curves, energy, and transition costs.

Units are classified along two axes: what a unit is specialized for
(general purpose CPU, graphics accelerator, DSP, ...) and how capable it
is within that specialization (weak vs strong). Power follows a set of
measured (clock, active power) points; between points we interpolate
log-log linearly, which preserves the multiplicative clock/power scaling
behaviour of DVFS curves.

Unit conventions used throughout: clock in MHz, power in mW, work in
megacycles, energy in mJ, latencies in microseconds, durations in ms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Specialization:
    """A hardware specialization family; equality is by name."""

    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("specialization name must be non-empty")


GENERAL_PURPOSE = Specialization("general_purpose")
GRAPHICS_ACCEL = Specialization("graphics_accel")
DSP = Specialization("dsp")


@dataclass(frozen=True)
class CapabilityTier:
    """Weak or strong within one specialization group."""

    tier: str

    def __post_init__(self) -> None:
        if self.tier not in ("weak", "strong"):
            raise ValueError(f"capability tier must be 'weak' or 'strong', got {self.tier!r}")


WEAK = CapabilityTier("weak")
STRONG = CapabilityTier("strong")


@dataclass(frozen=True)
class ProcessingUnit:
    """One processing unit with its measured power curve and wake costs.

    clock_points is an ordered sequence of (clock MHz, active power mW)
    pairs, strictly increasing in both coordinates. idle_power_mw is the
    power while powered but not executing; wake_latency_us is the time to
    leave a sleep state, ipi_latency_us the inter-processor interrupt cost
    to request it.
    """

    id: str
    specialization: Specialization
    tier: CapabilityTier
    clock_points: tuple[tuple[float, float], ...]
    idle_power_mw: float
    wake_latency_us: float = 0.0
    ipi_latency_us: float = 0.0

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("unit id must be non-empty")
        points = tuple((float(c), float(p)) for c, p in self.clock_points)
        object.__setattr__(self, "clock_points", points)
        if not points:
            raise ValueError(f"{self.id}: clock_points must be non-empty")
        for clock, power in points:
            if clock <= 0 or power <= 0:
                raise ValueError(f"{self.id}: clock points must be positive, got ({clock}, {power})")
        for (c0, p0), (c1, p1) in zip(points, points[1:]):
            if c1 <= c0:
                raise ValueError(f"{self.id}: clock points must be strictly increasing in clock")
            if p1 <= p0:
                raise ValueError(f"{self.id}: active power must be strictly increasing in clock")
        if self.idle_power_mw >= points[0][1]:
            raise ValueError(
                f"{self.id}: idle power {self.idle_power_mw} mW must be below "
                f"minimum active power {points[0][1]} mW"
            )
        if self.idle_power_mw < 0:
            raise ValueError(f"{self.id}: idle power must be >= 0")
        if self.wake_latency_us < 0 or self.ipi_latency_us < 0:
            raise ValueError(f"{self.id}: latencies must be >= 0")

    @property
    def min_clock_mhz(self) -> float:
        return self.clock_points[0][0]

    @property
    def max_clock_mhz(self) -> float:
        return self.clock_points[-1][0]


@dataclass(frozen=True)
class SpecializationGroup:
    """A weak/strong pair sharing one specialization."""

    specialization: Specialization
    weak: ProcessingUnit
    strong: ProcessingUnit

    def __post_init__(self) -> None:
        if self.weak.tier != WEAK:
            raise ValueError(f"group weak member {self.weak.id} has tier {self.weak.tier.tier}")
        if self.strong.tier != STRONG:
            raise ValueError(f"group strong member {self.strong.id} has tier {self.strong.tier.tier}")
        for unit in (self.weak, self.strong):
            if unit.specialization != self.specialization:
                raise ValueError(
                    f"unit {unit.id} has specialization {unit.specialization.name}, "
                    f"group requires {self.specialization.name}"
                )


def power_at_clock(unit: ProcessingUnit, clock_mhz: float) -> float:
    """Active power (mW) of unit at the given clock (MHz).

    Exact at the unit's listed clock points; log-log linear interpolation
    between them; beyond the ends, extrapolation continues the nearest
    segment's log-log slope (constant for single-point curves). Valid for
    clocks within [0.1 x min point, 10 x max point].
    """
    if clock_mhz <= 0:
        raise ValueError(f"clock must be positive, got {clock_mhz}")
    points = unit.clock_points
    if clock_mhz < 0.1 * points[0][0] or clock_mhz > 10.0 * points[-1][0]:
        raise ValueError(
            f"clock {clock_mhz} MHz outside supported range "
            f"[{0.1 * points[0][0]}, {10.0 * points[-1][0]}] for {unit.id}"
        )
    for pt_clock, pt_power in points:
        if clock_mhz == pt_clock:
            return pt_power
    if len(points) == 1:
        return points[0][1]
    # pick the bracketing or nearest segment
    if clock_mhz < points[0][0]:
        (c0, p0), (c1, p1) = points[0], points[1]
    elif clock_mhz > points[-1][0]:
        (c0, p0), (c1, p1) = points[-2], points[-1]
    else:
        idx = max(i for i, (c, _) in enumerate(points) if c < clock_mhz)
        (c0, p0), (c1, p1) = points[idx], points[idx + 1]
    slope = math.log(p1 / p0) / math.log(c1 / c0)
    return p0 * math.exp(slope * math.log(clock_mhz / c0))


def energy_for_work(unit: ProcessingUnit, work_megacycles: float, clock_mhz: float) -> float:
    """Energy (mJ) to execute work megacycles at clock MHz.

    power (mW) times duration (s, = work/clock) gives mJ.
    """
    if work_megacycles < 0:
        raise ValueError(f"work must be >= 0, got {work_megacycles}")
    return power_at_clock(unit, clock_mhz) * (work_megacycles / clock_mhz)


def energy_reduction(
    weak_cfg: tuple[ProcessingUnit, float],
    strong_cfg: tuple[ProcessingUnit, float],
    work_megacycles: float = 1.0,
) -> float:
    """Fractional energy saved by running work on weak_cfg instead of strong_cfg.

    1 - E_weak/E_strong; negative when the weak configuration is actually
    less efficient. Independent of the amount of work.
    """
    if work_megacycles <= 0:
        raise ValueError(f"work must be > 0, got {work_megacycles}")
    weak_unit, weak_clock = weak_cfg
    strong_unit, strong_clock = strong_cfg
    e_weak = energy_for_work(weak_unit, work_megacycles, weak_clock)
    e_strong = energy_for_work(strong_unit, work_megacycles, strong_clock)
    return 1.0 - e_weak / e_strong


def idle_energy(unit: ProcessingUnit, duration_ms: float) -> float:
    """Energy (mJ) spent idling for duration_ms."""
    if duration_ms < 0:
        raise ValueError(f"duration must be >= 0, got {duration_ms}")
    return unit.idle_power_mw * duration_ms / 1000.0


def wake_transition_cost(unit: ProcessingUnit) -> float:
    """Microseconds to bring the unit out of sleep: IPI plus power-state wake."""
    return unit.ipi_latency_us + unit.wake_latency_us


@dataclass(frozen=True)
class HardwareFixture:
    """A named set of units and weak/strong groups loaded from a fixture file."""

    name: str
    units: dict[str, ProcessingUnit]
    groups: dict[str, SpecializationGroup]
    extras: dict = field(default_factory=dict)

    def unit(self, unit_id: str) -> ProcessingUnit:
        try:
            return self.units[unit_id]
        except KeyError:
            raise KeyError(f"fixture {self.name!r} has no unit {unit_id!r}") from None

    def group(self, group_id: str) -> SpecializationGroup:
        try:
            return self.groups[group_id]
        except KeyError:
            raise KeyError(f"fixture {self.name!r} has no group {group_id!r}") from None
