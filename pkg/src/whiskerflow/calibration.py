"""Least-squares calibration curves fixed at the origin.

Speed: a second-order polynomial with no intercept maps the in-plane
response magnitude x (LSB) to speed,

    v = a * x**2 + b * x

Orientation: a single slope maps the four-quadrant reading angle u
(degrees, wrapped to (-180, 180]) to the flow direction,

    theta = c * u

Both fits are ordinary least squares through the origin; goodness of fit is
the conventional R^2 about the sample mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateSamplesError
from .geometry import FlowState, normalize_angle_deg
from .sensor import SensorDesign, clamp_speed, forward, invert_orientation


def wrap_angle_deg(angle: float) -> float:
    """Wrap an angle in degrees to (-180, 180]."""
    wrapped = normalize_angle_deg(angle)
    return wrapped - 360.0 if wrapped > 180.0 else wrapped


@dataclass(frozen=True)
class CalibrationModel:
    """Fitted coefficients plus fit metadata. ``units`` records the abscissa
    of the speed curve (LSB counts)."""

    a: float
    b: float
    c: float
    r2_speed: float
    r2_orientation: float
    units: str = "lsb"
    n_speed: int = 0
    n_orientation: int = 0
    design_fingerprint: str | None = None

    def __post_init__(self):
        if self.b <= 0:
            raise DegenerateSamplesError("speed fit has non-positive initial slope")

    @property
    def vertex(self) -> float:
        """Abscissa of the quadratic's turning point (inf when a >= 0)."""
        return math.inf if self.a >= 0 else -self.b / (2.0 * self.a)

    def to_dict(self) -> dict:
        return {
            "speed": {"a": self.a, "b": self.b, "r2": self.r2_speed, "n": self.n_speed},
            "orientation": {"c": self.c, "r2": self.r2_orientation, "n": self.n_orientation},
            "units": self.units,
            "design_fingerprint": self.design_fingerprint,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CalibrationModel":
        return cls(
            a=doc["speed"]["a"],
            b=doc["speed"]["b"],
            c=doc["orientation"]["c"],
            r2_speed=doc["speed"]["r2"],
            r2_orientation=doc["orientation"]["r2"],
            units=doc.get("units", "lsb"),
            n_speed=doc["speed"].get("n", 0),
            n_orientation=doc["orientation"].get("n", 0),
            design_fingerprint=doc.get("design_fingerprint"),
        )


@dataclass(frozen=True)
class CalibratedEstimate:
    speed: float
    theta_deg: float | None
    saturated: bool = False


def _r_squared(y: np.ndarray, residuals: np.ndarray) -> float:
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot < 1e-300:
        return 1.0 if ss_res < 1e-300 else 0.0
    return 1.0 - ss_res / ss_tot


def fit_calibration(
    speed_samples: Sequence[tuple[float, float]],
    orientation_samples: Sequence[tuple[float, float]],
    design_fingerprint: str | None = None,
) -> CalibrationModel:
    """Fit the origin-fixed speed and orientation curves.

    ``speed_samples`` are (magnitude LSB, speed m/s); ``orientation_samples``
    are (reading angle deg, true direction deg) and must share an angle
    branch, nominally (-180, 180] (see ``samples_from_readings``).
    """
    if len(speed_samples) < 3:
        raise DegenerateSamplesError("need at least 3 speed samples")
    if len(orientation_samples) < 2:
        raise DegenerateSamplesError("need at least 2 orientation samples")

    x = np.array([s[0] for s in speed_samples], dtype=float)
    v = np.array([s[1] for s in speed_samples], dtype=float)
    if np.ptp(x) <= 0:
        raise DegenerateSamplesError("speed samples span a zero magnitude range")
    basis = np.stack([x * x, x], axis=1)
    coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
    r2_speed = _r_squared(v, v - basis @ coef)

    u = np.array([s[0] for s in orientation_samples], dtype=float)
    theta = np.array([s[1] for s in orientation_samples], dtype=float)
    uu = float(u @ u)
    if uu <= 0:
        raise DegenerateSamplesError("orientation samples are all at zero angle")
    c = float(u @ theta) / uu
    r2_orientation = _r_squared(theta, theta - c * u)

    return CalibrationModel(
        a=float(coef[0]),
        b=float(coef[1]),
        c=c,
        r2_speed=r2_speed,
        r2_orientation=r2_orientation,
        n_speed=len(speed_samples),
        n_orientation=len(orientation_samples),
        design_fingerprint=design_fingerprint,
    )


def samples_from_readings(
    rows: Sequence[tuple[float, float, float, float]],
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """Split (v, theta_deg, bx, by) reading rows into fit samples.

    Every row feeds the speed fit; rows with a nonzero in-plane reading also
    feed the orientation fit.
    """
    speed_samples = []
    orientation_samples = []
    for v, theta, bx, by in rows:
        speed_samples.append((math.hypot(bx, by), v))
        if bx != 0 or by != 0:
            truth = wrap_angle_deg(theta)
            u = invert_orientation(bx, by)
            # keep the reading angle on the same branch as the truth
            u = truth + wrap_angle_deg(u - truth)
            orientation_samples.append((u, truth))
    return speed_samples, orientation_samples


def synthesize_calibration_readings(
    design: SensorDesign,
    count: int = 20,
    noise_sigma_lsb: float = 0.0,
    seed: int = 0,
    orientation_count: int = 12,
) -> list[tuple[float, float, float, float]]:
    """Generate (v, theta, bx, by) rows from the forward model.

    Speed rows span the in-line range up to 95% of the clamp speed; the
    orientation rows circle the full azimuth at 70% of the local clamp
    speed. Gaussian noise (LSB) is added per axis before rounding.
    """
    rng = np.random.default_rng(seed)

    def reading(speed: float, theta: float) -> tuple[float, float]:
        result = forward(design, FlowState(speed, theta, design.fluid_density))
        counts = np.array([result.delta.dbx, result.delta.dby]) * design.hall.sensitivity
        if noise_sigma_lsb > 0:
            counts = counts + rng.normal(0.0, noise_sigma_lsb, size=2)
        limit = design.hall.max_counts
        counts = np.clip(np.rint(counts), -limit, limit)
        return float(counts[0]), float(counts[1])

    rows = []
    v_max = clamp_speed(design, 0.0)
    for v in np.linspace(v_max / count, 0.95 * v_max, count):
        bx, by = reading(float(v), 0.0)
        rows.append((float(v), 0.0, bx, by))
    for theta in np.linspace(-180.0 + 360.0 / orientation_count, 180.0, orientation_count):
        v_cal = 0.7 * clamp_speed(design, float(theta))
        bx, by = reading(v_cal, float(theta))
        rows.append((v_cal, float(theta), bx, by))
    return rows


def residual_rows(
    model: CalibrationModel,
    speed_samples: Sequence[tuple[float, float]],
    orientation_samples: Sequence[tuple[float, float]],
) -> list[dict]:
    """Per-sample fit residuals for both channels."""
    rows = []
    for x, v in speed_samples:
        fitted = model.a * x * x + model.b * x
        rows.append(
            {"channel": "speed", "abscissa": x, "truth": v, "fitted": fitted, "residual": v - fitted}
        )
    for u, theta in orientation_samples:
        fitted = model.c * u
        rows.append(
            {
                "channel": "orientation",
                "abscissa": u,
                "truth": theta,
                "fitted": fitted,
                "residual": theta - fitted,
            }
        )
    return rows


def apply_calibration(model: CalibrationModel, bx: float, by: float) -> CalibratedEstimate:
    """Map an in-plane reading to (speed, direction) with the fitted curves.

    Beyond the quadratic's turning point the curve folds over, so the speed
    is held at the vertex value and flagged.
    """
    magnitude = math.hypot(bx, by)
    if magnitude == 0.0:
        return CalibratedEstimate(0.0, None, saturated=False)
    saturated = magnitude > model.vertex
    x = min(magnitude, model.vertex)
    speed = max(0.0, model.a * x * x + model.b * x)
    u = wrap_angle_deg(invert_orientation(bx, by))
    theta = normalize_angle_deg(model.c * u)
    return CalibratedEstimate(speed, theta, saturated=saturated)
