"""Torsional spring suspension: moment in, deflection out.

The four-serpentine flexure is lumped into a single torsional stiffness
``k_theta``. An applied moment ``M`` at azimuth ``theta`` produces a polar
deflection ``phi`` of the center plate, clamped by mechanical stops at
``phi_max``. Two solve variants are supported:

    linear: phi = M / k_theta            (first-order, default)
    sine:   phi = asin(M / k_theta)      (inverse of the moment decomposition)

They differ by at most 1 - sin(phi)/phi, about 2% at a 20 degree stop.
The in-plane moment components of a deflected plate decompose as

    M_x = k_theta * sin(phi) * cos(theta)
    M_y = k_theta * sin(phi) * sin(theta)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidGeometryError
from .geometry import normalize_angle_deg

DeflectionModel = str  # "linear" | "sine"


@dataclass(frozen=True)
class SpringGeometry:
    """Flexure cut parameters, carried for provenance only (not used in the
    lumped model)."""

    material: str = "stainless steel"
    sheet_thickness: float = 100e-6
    arm_width: float = 0.25e-3
    arm_length: float = 1e-3
    pitch: float = 0.41e-3
    turns: int = 6


@dataclass(frozen=True)
class SpringSpec:
    """Lumped suspension: stiffness (N*m/rad), stop angle (rad), solve model."""

    torsional_stiffness: float = 3.47e-3
    max_deflection: float = math.radians(20.0)
    model: DeflectionModel = "linear"
    geometry: SpringGeometry = field(default_factory=SpringGeometry)

    def __post_init__(self):
        if self.torsional_stiffness <= 0:
            raise InvalidGeometryError("torsional stiffness must be positive")
        if not 0 < self.max_deflection <= math.radians(45.0):
            raise InvalidGeometryError("stop angle must be in (0, 45] degrees")
        if self.model not in ("linear", "sine"):
            raise InvalidGeometryError(f"unknown deflection model {self.model!r}")


@dataclass(frozen=True)
class Deflection:
    """Quasi-static suspension pose: polar angle (rad), azimuth (deg), and
    whether the mechanical stop is engaged."""

    phi: float
    theta_deg: float
    saturated: bool = False

    def __post_init__(self):
        if self.phi < 0:
            raise InvalidGeometryError("deflection angle must be non-negative")
        object.__setattr__(self, "theta_deg", normalize_angle_deg(self.theta_deg))


def deflection_from_moment(spring: SpringSpec, moment: float, theta_deg: float) -> Deflection:
    """Solve the balance of drag and spring moments for the deflection.

    The stop clamp engages when the unconstrained solution would exceed
    ``max_deflection``; the azimuth passes through unchanged.
    """
    if moment < 0:
        raise ValueError("moment must be non-negative")
    ratio = moment / spring.torsional_stiffness
    if spring.model == "sine":
        phi = math.asin(ratio) if ratio < math.sin(spring.max_deflection) else spring.max_deflection
    else:
        phi = ratio
    if phi >= spring.max_deflection:
        return Deflection(spring.max_deflection, theta_deg, saturated=True)
    return Deflection(phi, theta_deg, saturated=False)


def moment_components(deflection: Deflection, spring: SpringSpec) -> tuple[float, float]:
    """In-plane moment components (M_x, M_y) in N*m for a given deflection."""
    m = spring.torsional_stiffness * math.sin(deflection.phi)
    theta = math.radians(deflection.theta_deg)
    return m * math.cos(theta), m * math.sin(theta)
