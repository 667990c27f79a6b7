"""Drag-element geometry and quasi-static drag loading.

A whisker drag element immersed to depth ``D`` in a fluid of density ``rho``
moving at relative speed ``v`` sees a drag force

    F = 1/2 * C_d * rho * v**2 * A(theta)

where the projected frontal area at flow direction ``theta`` is

    A(theta) = A_x0 * |cos(theta)| + A_y0 * |sin(theta)|

with ``A_x0`` and ``A_y0`` the immersed frontal areas seen along the x and y
axes. Absolute values keep the area non-negative and four-quadrant symmetric.
The equivalent point load acts at the centroid of the immersed strip, giving
a moment arm about the suspension of

    r = h_stem + h - D/2

and a drag moment ``M = F * r``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidGeometryError


class Shape(str, enum.Enum):
    ROD = "rod"
    PLATE = "plate"
    CROSS = "cross"


def normalize_angle_deg(angle: float) -> float:
    """Wrap an angle in degrees to [0, 360)."""
    return float(angle) % 360.0


@dataclass(frozen=True)
class WhiskerSpec:
    """Geometry of one drag element.

    Lengths in meters. For a rod, ``width`` and ``thickness`` both equal the
    diameter. ``stem_height`` is the dry standoff between the top of the drag
    element and the suspension.
    """

    shape: Shape
    height: float
    width: float
    thickness: float
    drag_coefficient: float
    stem_height: float = 5e-3

    def __post_init__(self):
        if self.height <= 0 or self.width <= 0 or self.thickness <= 0:
            raise InvalidGeometryError("height, width and thickness must be positive")
        if self.drag_coefficient <= 0:
            raise InvalidGeometryError("drag coefficient must be positive")
        if self.stem_height < 0:
            raise InvalidGeometryError("stem height must be non-negative")
        if self.shape is Shape.ROD and self.width != self.thickness:
            raise InvalidGeometryError("a rod's width and thickness are both its diameter")

    def frontal_areas(self, depth: float) -> tuple[float, float]:
        """Immersed frontal areas (A_x0, A_y0) at immersion ``depth``.

        Rod: diameter * depth on both axes. Plate: face w*depth along x,
        edge t*depth along y. Cross: two orthogonal plates, (w + t) * depth
        on both axes (the t x t projection overlap is negligible here).
        """
        if self.shape is Shape.ROD:
            a = self.width * depth
            return a, a
        if self.shape is Shape.PLATE:
            return self.width * depth, self.thickness * depth
        a = (self.width + self.thickness) * depth
        return a, a


@dataclass(frozen=True)
class FlowState:
    """Relative flow in the sensor frame: speed (m/s), direction (degrees
    from the x-axis in the xy-plane), fluid density (kg/m^3)."""

    speed: float
    direction_deg: float = 0.0
    fluid_density: float = 1000.0

    def __post_init__(self):
        if self.speed < 0:
            raise InvalidGeometryError("flow speed must be non-negative")
        if self.fluid_density <= 0:
            raise InvalidGeometryError("fluid density must be positive")
        object.__setattr__(self, "direction_deg", normalize_angle_deg(self.direction_deg))


@dataclass(frozen=True)
class ImmersionConfig:
    """Immersed depth of the drag element below the free surface, meters."""

    depth: float

    def __post_init__(self):
        if self.depth <= 0:
            raise InvalidGeometryError("immersion depth must be positive")

    def check_against(self, spec: WhiskerSpec) -> None:
        if self.depth > spec.height:
            raise InvalidGeometryError(
                f"immersion depth {self.depth} m exceeds element height {spec.height} m"
            )


def projected_area(spec: WhiskerSpec, immersion: ImmersionConfig, theta_deg: float) -> float:
    """Projected frontal area (m^2) at flow direction ``theta_deg``."""
    immersion.check_against(spec)
    ax0, ay0 = spec.frontal_areas(immersion.depth)
    theta = math.radians(normalize_angle_deg(theta_deg))
    return ax0 * abs(math.cos(theta)) + ay0 * abs(math.sin(theta))


def drag_force(spec: WhiskerSpec, flow: FlowState, immersion: ImmersionConfig) -> float:
    """Drag force magnitude in newtons."""
    area = projected_area(spec, immersion, flow.direction_deg)
    return 0.5 * spec.drag_coefficient * flow.fluid_density * flow.speed**2 * area


def moment_arm(spec: WhiskerSpec, immersion: ImmersionConfig) -> float:
    """Lever arm (m) from the suspension to the centroid of the immersed strip."""
    immersion.check_against(spec)
    return spec.stem_height + spec.height - 0.5 * immersion.depth


def drag_moment(spec: WhiskerSpec, flow: FlowState, immersion: ImmersionConfig) -> float:
    """Quasi-static drag moment (N*m) about the suspension center."""
    return drag_force(spec, flow, immersion) * moment_arm(spec, immersion)
