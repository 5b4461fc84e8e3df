"""Dial states, calibration geometry, and state distances.

A dial state is either a clock time on the 12-hour cycle (minute granularity,
720 distinct states) or a calibrated scalar gauge value.  Every distance used
by margins, rewards, and metrics bottoms out in the two functions defined
here: `clock_distance` (circular, in minutes) and `gauge_distance`
(normalized scalar error).  `state_distance_normalized` maps both onto a
shared [0, 1] scale: clock distance divided by its maximum of 360 minutes,
gauge distance as-is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import CalibrationMismatchError, DomainError, VariantMismatchError

CLOCK_CYCLE_MINUTES = 720
CLOCK_MAX_DISTANCE_MINUTES = 360


@dataclass(frozen=True)
class ClockState:
    """Clock time at minute granularity; hour 0 is displayed as 12."""

    hour: int
    minute: int

    def __post_init__(self):
        if not (isinstance(self.hour, int) and 0 <= self.hour <= 11):
            raise DomainError(f"hour must be an integer in [0, 11], got {self.hour!r}")
        if not (isinstance(self.minute, int) and 0 <= self.minute <= 59):
            raise DomainError(f"minute must be an integer in [0, 59], got {self.minute!r}")

    @property
    def minutes_of_cycle(self) -> int:
        return 60 * self.hour + self.minute


def clock_from_minutes(minutes: int) -> ClockState:
    """Inverse of `clock_state_to_minutes`; wraps modulo the 720-minute cycle."""
    m = minutes % CLOCK_CYCLE_MINUTES
    return ClockState(hour=m // 60, minute=m % 60)


def clock_state_to_minutes(state: ClockState) -> int:
    """Canonical minute-of-cycle in [0, 720)."""
    return state.minutes_of_cycle


def clock_hand_angles(state: ClockState) -> tuple[float, float]:
    """(hour_angle, minute_angle) in degrees, clockwise from 12 o'clock.

    Minute hand moves 6 degrees per minute; hour hand moves 30 degrees per
    hour plus 0.5 degrees per minute.
    """
    minute_angle = 6.0 * state.minute
    hour_angle = 30.0 * state.hour + 0.5 * state.minute
    return hour_angle % 360.0, minute_angle % 360.0


def clock_distance(s1: ClockState, s2: ClockState) -> int:
    """Circular distance in minutes on the 720-minute cycle, in [0, 360]."""
    delta = abs(s1.minutes_of_cycle - s2.minutes_of_cycle)
    return min(delta, CLOCK_CYCLE_MINUTES - delta)


@dataclass(frozen=True)
class GaugeCalibration:
    """Linear map from a value range onto a pointer-angle sweep.

    `major_ticks` counts major intervals (so there are major_ticks + 1 major
    marks); `minor_per_major` minor marks subdivide each major interval.
    Angles follow the gauge convention: 0 degrees points at 3 o'clock,
    90 at 12 o'clock, 180 at 9 o'clock, so the default 180 -> 0 sweep covers
    the top half circle left to right.
    """

    value_min: float
    value_max: float
    angle_start_deg: float = 180.0
    angle_end_deg: float = 0.0
    major_ticks: int = 10
    minor_per_major: int = 4
    calibration_id: str = "default"

    def __post_init__(self):
        if not self.value_max > self.value_min:
            raise DomainError("value_max must exceed value_min")
        if self.angle_start_deg == self.angle_end_deg:
            raise DomainError("angle_start_deg and angle_end_deg must differ")
        if self.major_ticks < 1:
            raise DomainError("major_ticks must be a positive integer")
        if self.minor_per_major < 0:
            raise DomainError("minor_per_major must be non-negative")

    @property
    def value_span(self) -> float:
        return self.value_max - self.value_min

    @property
    def minor_tick_value(self) -> float:
        """Value step between adjacent marks (minor spacing)."""
        major_step = self.value_span / self.major_ticks
        return major_step / (self.minor_per_major + 1)

    def value_to_angle(self, value: float) -> float:
        frac = (value - self.value_min) / self.value_span
        return self.angle_start_deg + frac * (self.angle_end_deg - self.angle_start_deg)

    def to_json(self) -> dict:
        return {
            "calibration_id": self.calibration_id,
            "value_min": self.value_min,
            "value_max": self.value_max,
            "angle_start_deg": self.angle_start_deg,
            "angle_end_deg": self.angle_end_deg,
            "major_ticks": self.major_ticks,
            "minor_per_major": self.minor_per_major,
        }

    @staticmethod
    def from_json(obj: dict) -> "GaugeCalibration":
        return GaugeCalibration(
            value_min=float(obj["value_min"]),
            value_max=float(obj["value_max"]),
            angle_start_deg=float(obj["angle_start_deg"]),
            angle_end_deg=float(obj["angle_end_deg"]),
            major_ticks=int(obj["major_ticks"]),
            minor_per_major=int(obj["minor_per_major"]),
            calibration_id=str(obj.get("calibration_id", "default")),
        )


DEFAULT_GAUGE_CALIBRATION = GaugeCalibration(value_min=0.0, value_max=100.0)


@dataclass(frozen=True)
class GaugeState:
    """A gauge reading: scalar value within its calibration range."""

    value: float
    calibration: GaugeCalibration = DEFAULT_GAUGE_CALIBRATION

    def __post_init__(self):
        cal = self.calibration
        if not (cal.value_min <= self.value <= cal.value_max):
            raise DomainError(
                f"value {self.value} outside calibrated range "
                f"[{cal.value_min}, {cal.value_max}]"
            )


DialState = Union[ClockState, GaugeState]


def gauge_value_to_angle(state: GaugeState) -> float:
    """Pointer angle induced by the gauge calibration (linear in value)."""
    return state.calibration.value_to_angle(state.value)


def gauge_distance(s1: GaugeState, s2: GaugeState) -> float:
    """Normalized scalar error |v1 - v2| / value_span, in [0, 1]."""
    if s1.calibration != s2.calibration:
        raise CalibrationMismatchError(
            f"gauge states use different calibrations: "
            f"{s1.calibration.calibration_id!r} vs {s2.calibration.calibration_id!r}"
        )
    return abs(s1.value - s2.value) / s1.calibration.value_span


def state_distance_normalized(s1: DialState, s2: DialState) -> float:
    """State distance on the shared [0, 1] scale used by margins and rewards."""
    if isinstance(s1, ClockState) and isinstance(s2, ClockState):
        return clock_distance(s1, s2) / CLOCK_MAX_DISTANCE_MINUTES
    if isinstance(s1, GaugeState) and isinstance(s2, GaugeState):
        return gauge_distance(s1, s2)
    raise VariantMismatchError(
        f"cannot compare {type(s1).__name__} with {type(s2).__name__}"
    )


def task_of(state: DialState) -> str:
    if isinstance(state, ClockState):
        return "clock"
    if isinstance(state, GaugeState):
        return "gauge"
    raise VariantMismatchError(f"not a dial state: {type(state).__name__}")


# --- manifest serialization -------------------------------------------------
#
# Clock states print as "H:MM" with hour 0 shown as 12 and zero-padded
# minutes; gauge values print as decimal strings with up to 4 fractional
# digits (trailing zeros trimmed, at least one digit kept).

GAUGE_VALUE_DECIMALS = 4


def format_clock(state: ClockState) -> str:
    display_hour = 12 if state.hour == 0 else state.hour
    return f"{display_hour}:{state.minute:02d}"


def parse_clock_text(text: str) -> ClockState:
    parts = text.strip().split(":")
    if len(parts) != 2:
        raise DomainError(f"not a clock time: {text!r}")
    hour = int(parts[0])
    minute = int(parts[1])
    if not (0 <= hour <= 12):
        raise DomainError(f"hour out of range in {text!r}")
    return ClockState(hour=hour % 12, minute=minute)


def format_gauge_value(value: float) -> str:
    text = f"{value:.{GAUGE_VALUE_DECIMALS}f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


def quantize_gauge_value(value: float) -> float:
    """Round to serialization precision so text round-trips are lossless."""
    return round(value, GAUGE_VALUE_DECIMALS)


def state_to_json(state: DialState) -> dict:
    if isinstance(state, ClockState):
        return {"kind": "clock", "text": format_clock(state)}
    if isinstance(state, GaugeState):
        return {
            "kind": "gauge",
            "text": format_gauge_value(state.value),
            "calibration_id": state.calibration.calibration_id,
        }
    raise VariantMismatchError(f"not a dial state: {type(state).__name__}")


def state_from_json(obj: dict, calibration: GaugeCalibration | None = None) -> DialState:
    """Rebuild a state from its manifest dict.

    Gauge states need the full calibration, which manifests store alongside
    the state; the state dict itself carries only the calibration id.
    """
    kind = obj.get("kind")
    if kind == "clock":
        return parse_clock_text(obj["text"])
    if kind == "gauge":
        cal = calibration if calibration is not None else DEFAULT_GAUGE_CALIBRATION
        stored_id = obj.get("calibration_id", cal.calibration_id)
        if stored_id != cal.calibration_id:
            raise CalibrationMismatchError(
                f"state refers to calibration {stored_id!r}, got {cal.calibration_id!r}"
            )
        return GaugeState(value=float(obj["text"]), calibration=cal)
    raise DomainError(f"unknown state kind: {kind!r}")
