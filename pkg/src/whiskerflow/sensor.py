"""Assembled sensor: forward chain from flow to counts, and its inversion.

Forward: drag moment -> suspension deflection (stop-clamped) -> field change
at the sensing point -> quantized counts. All intermediates are returned for
inspection.

Inversion runs a bisection on speed against the smooth (pre-quantization)
response magnitude, which is strictly monotone below the stop; direction
comes from the four-quadrant angle of the in-plane reading.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from . import magnetics
from .errors import NonMonotoneDesignError, UndefinedOrientationError, UnreachableReadingError
from .geometry import (
    FlowState,
    ImmersionConfig,
    WhiskerSpec,
    drag_force,
    drag_moment,
    moment_arm,
    normalize_angle_deg,
    projected_area,
)
from .magnetics import FieldDelta, HallSpec, MagnetSpec, SensorReading, field_delta, quantize
from .suspension import Deflection, SpringSpec, deflection_from_moment

#: Bisection convergence tolerance on estimated speed, m/s.
SPEED_TOLERANCE = 1e-4

#: Readings this close (LSB) to the clamp magnitude are reported as saturated.
_SATURATION_MARGIN_LSB = 0.75


@dataclass(frozen=True)
class SensorDesign:
    """Full sensor assembly. Construction verifies that the response
    magnitude is strictly monotone in deflection (and hence in speed)."""

    whisker: WhiskerSpec
    immersion: ImmersionConfig
    spring: SpringSpec = field(default_factory=SpringSpec)
    magnet: MagnetSpec = field(default_factory=MagnetSpec)
    hall: HallSpec = field(default_factory=HallSpec)
    fluid_density: float = 1000.0

    def __post_init__(self):
        self.immersion.check_against(self.whisker)
        self.hall.check_against(self.magnet)
        if self.fluid_density <= 0:
            raise NonMonotoneDesignError("fluid density must be positive")
        _check_monotone(self.magnet, self.hall, self.spring.max_deflection)


@lru_cache(maxsize=256)
def _check_monotone(magnet: MagnetSpec, hall: HallSpec, phi_max: float, samples: int = 17) -> None:
    last = 0.0
    for i in range(1, samples + 1):
        phi = phi_max * i / samples
        g, _ = magnetics.tilt_response(magnet, hall, phi)
        if g <= last:
            raise NonMonotoneDesignError(
                "field response is not strictly increasing with deflection; "
                "adjust magnet/sensing geometry"
            )
        last = g


@dataclass(frozen=True)
class ForwardResult:
    """Every stage of the forward chain for one flow state."""

    projected_area: float
    force: float
    moment_arm: float
    moment: float
    deflection: Deflection
    delta: FieldDelta
    reading: SensorReading


@dataclass(frozen=True)
class SpeedEstimate:
    speed: float
    saturated: bool = False


def forward(design: SensorDesign, flow: FlowState, t: float = 0.0) -> ForwardResult:
    """Evaluate the full flow-to-counts chain."""
    area = projected_area(design.whisker, design.immersion, flow.direction_deg)
    force = drag_force(design.whisker, flow, design.immersion)
    arm = moment_arm(design.whisker, design.immersion)
    moment = force * arm
    deflection = deflection_from_moment(design.spring, moment, flow.direction_deg)
    delta = field_delta(design.magnet, design.hall, deflection)
    reading = quantize(delta, design.hall, t=t)
    return ForwardResult(area, force, arm, moment, deflection, delta, reading)


def moment_coefficient(design: SensorDesign, theta_deg: float = 0.0) -> float:
    """c in M(v) = c * v**2 for the given flow direction, N*m/(m/s)^2."""
    area = projected_area(design.whisker, design.immersion, theta_deg)
    arm = moment_arm(design.whisker, design.immersion)
    return 0.5 * design.whisker.drag_coefficient * design.fluid_density * area * arm


def clamp_speed(design: SensorDesign, theta_deg: float = 0.0) -> float:
    """Speed (m/s) at which the suspension reaches its mechanical stop."""
    if design.spring.model == "sine":
        target = design.spring.torsional_stiffness * math.sin(design.spring.max_deflection)
    else:
        target = design.spring.torsional_stiffness * design.spring.max_deflection
    return math.sqrt(target / moment_coefficient(design, theta_deg))


def response_magnitude(design: SensorDesign, speed: float, theta_deg: float = 0.0) -> float:
    """Pre-quantization in-plane response magnitude in LSB at (speed, theta)."""
    moment = moment_coefficient(design, theta_deg) * speed**2
    deflection = deflection_from_moment(design.spring, moment, 0.0)
    delta = field_delta(design.magnet, design.hall, deflection)
    return design.hall.sensitivity * delta.magnitude_xy


def invert_orientation(bx: float, by: float) -> float:
    """Flow direction in degrees [0, 360) from an in-plane reading."""
    if bx == 0 and by == 0:
        raise UndefinedOrientationError("orientation is undefined for a zero reading")
    return normalize_angle_deg(math.degrees(math.atan2(by, bx)))


def invert_speed_from_components(design: SensorDesign, bx: float, by: float) -> SpeedEstimate:
    """Estimate speed from in-plane components (LSB, may be fractional)."""
    magnitude = math.hypot(bx, by)
    if magnitude == 0.0:
        return SpeedEstimate(0.0, saturated=False)
    theta = invert_orientation(bx, by)
    v_max = clamp_speed(design, theta)
    clamp_magnitude = response_magnitude(design, v_max, theta)
    if magnitude > clamp_magnitude + 1.0:
        raise UnreachableReadingError(
            f"reading magnitude {magnitude:.2f} LSB exceeds the saturated "
            f"response {clamp_magnitude:.2f} LSB"
        )
    if magnitude >= clamp_magnitude - _SATURATION_MARGIN_LSB:
        return SpeedEstimate(v_max, saturated=True)
    lo, hi = 0.0, v_max
    while hi - lo > SPEED_TOLERANCE:
        mid = 0.5 * (lo + hi)
        if response_magnitude(design, mid, theta) < magnitude:
            lo = mid
        else:
            hi = mid
    return SpeedEstimate(0.5 * (lo + hi), saturated=False)


def invert_speed(design: SensorDesign, reading: SensorReading) -> SpeedEstimate:
    """Estimate speed from a quantized reading."""
    return invert_speed_from_components(design, reading.bx, reading.by)


def design_fingerprint(design: SensorDesign) -> str:
    """Short content hash of the design's physical parameters (SI units)."""
    doc = asdict(design)
    canonical = json.dumps(doc, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
