"""
Lab-frame spacetime bookkeeping for the delayed-choice condition.

Positions live on a single lab axis: only |dx| enters the interval.
"""

import math
from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from qo_physics.errors import GeometryInconsistencyError


# -----------------------------
# Constants
# -----------------------------
SPEED_OF_LIGHT = 299_792_458.0  # m/s
DEFAULT_TOLERANCE = 0.5e-9      # s, lightlike band half-width
MAX_FLIGHT_MISMATCH = 0.05      # relative

REFERENCE_PATH_LENGTH = 48.0
REFERENCE_FLIGHT_TIME = 160e-9
REFERENCE_CLOCK_PERIOD = 238e-9


class IntervalClass(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float
    label: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"Non-finite spacetime event {self}")


class GeometryConfig(BaseModel):
    """Interferometer arm length, photon flight time and choice location."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    path_length: float = Field(REFERENCE_PATH_LENGTH, gt=0.0)
    flight_time: float = Field(REFERENCE_FLIGHT_TIME, gt=0.0)
    clock_period: float = Field(REFERENCE_CLOCK_PERIOD, gt=0.0)
    choice_position: float = Field(REFERENCE_PATH_LENGTH, ge=0.0)
    # Lab time of the choice relative to photon entry
    choice_delay: float = 0.0

    @model_validator(mode="after")
    def _finite(self):
        if not math.isfinite(self.choice_delay):
            raise ValueError("choice_delay must be finite")
        return self


@dataclass(frozen=True)
class GeometryReport:
    separation: IntervalClass
    margin_ns: float
    choice_precedes_arrival: bool
    passed: bool


def classify_interval(a: SpacetimeEvent, b: SpacetimeEvent,
                      tolerance: float = DEFAULT_TOLERANCE) -> IntervalClass:
    """
    Classify the interval between two events.

    spacelike iff dx > c (dt + tol), timelike iff dx < c (dt - tol),
    lightlike otherwise.
    """
    if tolerance < 0.0:
        raise ValueError(f"tolerance={tolerance} must be >= 0")

    dt = abs(b.t - a.t)
    dx = abs(b.x - a.x)

    if dx > SPEED_OF_LIGHT * (dt + tolerance):
        return IntervalClass.SPACELIKE
    if dx < SPEED_OF_LIGHT * (dt - tolerance):
        return IntervalClass.TIMELIKE
    return IntervalClass.LIGHTLIKE


def check_geometry_consistency(g: GeometryConfig):
    expected = g.path_length / SPEED_OF_LIGHT
    mismatch = abs(g.flight_time - expected) / expected
    if mismatch > MAX_FLIGHT_MISMATCH:
        raise GeometryInconsistencyError(
            f"flight_time={g.flight_time:.3e} s deviates {100 * mismatch:.1f}% "
            f"from path_length/c={expected:.3e} s"
        )


def verify_delayed_choice_geometry(g: GeometryConfig,
                                   tolerance: float = DEFAULT_TOLERANCE) -> GeometryReport:
    """
    Classify photon entry (t=0, x=0) against the choice event.

    margin = dx / c - dt; the check passes iff the pair is space-like.
    """
    check_geometry_consistency(g)

    entry = SpacetimeEvent(t=0.0, x=0.0, label="photon entry")
    choice = SpacetimeEvent(t=g.choice_delay, x=g.choice_position, label="choice")

    separation = classify_interval(entry, choice, tolerance)
    margin = abs(choice.x - entry.x) / SPEED_OF_LIGHT - abs(choice.t - entry.t)

    return GeometryReport(
        separation=separation,
        margin_ns=margin * 1e9,
        choice_precedes_arrival=g.choice_delay < g.flight_time,
        passed=separation is IntervalClass.SPACELIKE,
    )


def reference_geometry_consistent() -> bool:
    """48 m of free propagation and a 160 ns flight time agree within 1 ns."""
    return abs(REFERENCE_PATH_LENGTH / SPEED_OF_LIGHT - REFERENCE_FLIGHT_TIME) < 1e-9
