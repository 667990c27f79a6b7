"""Design figures of merit and two-parameter sweeps.

For the in-line direction the drag moment is M(v) = c * v**2, so the speed
that produces a given deflection has the closed form

    v(phi) = sqrt(k_theta * phi / c)        (linear spring solve)
    v(phi) = sqrt(k_theta * sin(phi) / c)   (sine spring solve)

Three figures of merit characterize a design:

* ``v_max``  -- speed at the mechanical stop (20 deg by default),
* ``v_mid``  -- speed at the mid-range deflection of 12.5 deg,
* sensitivity in LSB per mm/s, reported two ways: the analytic derivative of
  the count magnitude at ``v_mid`` (point), and the quantized secant over
  0.2..0.7 m/s, shortened to 0.2..v_max for designs that clamp earlier
  (secant, the default figure).

Sweeps evaluate the metrics over a dense 2-axis grid; cells whose
constraints fail are marked invalid with a reason code instead of aborting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

from . import presets as presets_mod
from .errors import (
    InsensitiveDesignError,
    InvalidGeometryError,
    NonMonotoneDesignError,
    UnknownParameterError,
    WhiskerflowError,
)
from .geometry import FlowState, ImmersionConfig, Shape
from .magnetics import tilt_response
from .sensor import SensorDesign, clamp_speed, design_fingerprint, forward, moment_coefficient

MID_ANGLE_DEG = 12.5
SECANT_SPAN = (0.2, 0.7)


@dataclass(frozen=True)
class DesignMetrics:
    """Figures of merit for one design; sensitivities in LSB/(mm/s)."""

    v_mid: float
    v_max: float
    sensitivity_point: float
    sensitivity_secant: float

    @property
    def sensitivity(self) -> float:
        return self.sensitivity_secant

    def __post_init__(self):
        if not 0 < self.v_mid < self.v_max:
            raise InvalidGeometryError("mid-range speed must lie below the clamp speed")
        if self.sensitivity_point <= 0 or self.sensitivity_secant <= 0:
            raise InsensitiveDesignError("design has no usable sensitivity")


def _speed_at_deflection(design: SensorDesign, phi: float) -> float:
    spring = design.spring
    moment = spring.torsional_stiffness * (math.sin(phi) if spring.model == "sine" else phi)
    return math.sqrt(moment / moment_coefficient(design, 0.0))


def _count_magnitude(design: SensorDesign, speed: float) -> float:
    result = forward(design, FlowState(speed, 0.0, design.fluid_density))
    return result.reading.magnitude_xy


def metrics(design: SensorDesign, mid_angle_deg: float = MID_ANGLE_DEG) -> DesignMetrics:
    """Compute the three figures of merit for a design."""
    phi_mid = math.radians(mid_angle_deg)
    if not 0 < phi_mid < design.spring.max_deflection:
        raise InvalidGeometryError("mid-range angle must lie below the stop angle")
    v_max = clamp_speed(design, 0.0)
    v_mid = _speed_at_deflection(design, phi_mid)

    # point sensitivity: chain rule through moment, deflection and field
    c = moment_coefficient(design, 0.0)
    dm_dv = 2.0 * c * v_mid
    k = design.spring.torsional_stiffness
    dphi_dm = 1.0 / (k * math.cos(phi_mid)) if design.spring.model == "sine" else 1.0 / k
    _, dg_dphi = tilt_response(design.magnet, design.hall, phi_mid)
    point = design.hall.sensitivity * dg_dphi * dphi_dm * dm_dv / 1000.0

    hi = min(SECANT_SPAN[1], v_max)
    lo = min(SECANT_SPAN[0], 0.5 * hi)
    secant = (_count_magnitude(design, hi) - _count_magnitude(design, lo)) / ((hi - lo) * 1000.0)
    return DesignMetrics(v_mid, v_max, point, secant)


# sweepable parameter name -> (units, setter)
_PARAMETERS = {
    "diameter": "m",
    "d_im": "m",
    "k_theta": "N*m/rad",
    "d_ms": "m",
    "b_r": "T",
    "preset": "name",
}


def _apply_parameter(design: SensorDesign, name: str, value) -> SensorDesign:
    if name == "diameter":
        if design.whisker.shape is not Shape.ROD:
            raise InvalidGeometryError("diameter applies to rod drag elements only")
        whisker = replace(design.whisker, width=float(value), thickness=float(value))
        return replace(design, whisker=whisker)
    if name == "d_im":
        return replace(design, immersion=ImmersionConfig(float(value)))
    if name == "k_theta":
        return replace(design, spring=replace(design.spring, torsional_stiffness=float(value)))
    if name == "d_ms":
        return replace(design, hall=replace(design.hall, sensor_offset=float(value)))
    if name == "b_r":
        return replace(design, magnet=replace(design.magnet, remanence=float(value)))
    if name == "preset":
        return replace(design, whisker=presets_mod.preset(str(value)))
    raise UnknownParameterError(
        f"unknown sweep parameter {name!r}; known: {', '.join(_PARAMETERS)}"
    )


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in _PARAMETERS:
            raise UnknownParameterError(
                f"unknown sweep parameter {self.name!r}; known: {', '.join(_PARAMETERS)}"
            )
        if len(self.values) == 0:
            raise UnknownParameterError(f"axis {self.name!r} has no values")
        numeric = [v for v in self.values if isinstance(v, (int, float))]
        if len(numeric) == len(self.values) and len(self.values) > 1:
            diffs = [b - a for a, b in zip(self.values, self.values[1:])]
            if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
                raise UnknownParameterError(f"axis {self.name!r} values must be strictly monotone")

    @property
    def units(self) -> str:
        return _PARAMETERS[self.name]


@dataclass(frozen=True)
class SweepCell:
    i: int
    j: int
    value1: object
    value2: object
    metrics: DesignMetrics | None
    valid: bool
    reason: str = ""


@dataclass(frozen=True)
class SweepGrid:
    axis1: SweepAxis
    axis2: SweepAxis
    cells: tuple[SweepCell, ...]
    base_fingerprint: str

    def cell(self, i: int, j: int) -> SweepCell:
        return self.cells[i * len(self.axis2.values) + j]

    def __iter__(self) -> Iterator[SweepCell]:
        return iter(self.cells)

    def to_dict(self) -> dict:
        return {
            "axes": [
                {"name": self.axis1.name, "units": self.axis1.units, "values": list(self.axis1.values)},
                {"name": self.axis2.name, "units": self.axis2.units, "values": list(self.axis2.values)},
            ],
            "base_fingerprint": self.base_fingerprint,
            "cells": [
                {
                    "i": c.i,
                    "j": c.j,
                    self.axis1.name: c.value1,
                    self.axis2.name: c.value2,
                    "v_mid_mps": c.metrics.v_mid if c.metrics else None,
                    "v_max_mps": c.metrics.v_max if c.metrics else None,
                    "sensitivity_point_lsb_per_mmps": c.metrics.sensitivity_point if c.metrics else None,
                    "sensitivity_secant_lsb_per_mmps": c.metrics.sensitivity_secant if c.metrics else None,
                    "valid": c.valid,
                    "reason": c.reason,
                }
                for c in self.cells
            ],
        }


_REASONS = (
    (InvalidGeometryError, "invalid-geometry"),
    (NonMonotoneDesignError, "non-monotone"),
    (InsensitiveDesignError, "insensitive"),
)


def sweep(base: SensorDesign, axis1: SweepAxis, axis2: SweepAxis) -> SweepGrid:
    """Evaluate metrics over the dense axis1 x axis2 grid."""
    cells = []
    for i, v1 in enumerate(axis1.values):
        for j, v2 in enumerate(axis2.values):
            try:
                design = _apply_parameter(_apply_parameter(base, axis1.name, v1), axis2.name, v2)
                cell_metrics = metrics(design)
                cells.append(SweepCell(i, j, v1, v2, cell_metrics, True))
            except UnknownParameterError:
                raise
            except WhiskerflowError as exc:
                reason = next((code for typ, code in _REASONS if isinstance(exc, typ)), "invalid")
                cells.append(SweepCell(i, j, v1, v2, None, False, reason))
    return SweepGrid(axis1, axis2, tuple(cells), design_fingerprint(base))


def sweep_values(spec: str) -> tuple[float, ...]:
    """Parse comma-separated axis values; plain floats in SI units."""
    return tuple(float(tok) for tok in spec.split(",") if tok.strip())
