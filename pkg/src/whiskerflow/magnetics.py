"""Cube-magnet field model and quantized 3-axis readout.

The suspension carries a uniformly magnetized cube below its rotation
center; the sensing element sits farther down the same axis. The field of
the cube at an exterior point follows the closed form for a homogeneously
magnetized rectangular prism (corner-sum of logarithm and arctangent
terms); the far field reduces to the point dipole ``m = B_r * V / mu_0``.

A deflection ``(phi, theta)`` rigidly rotates the magnet about the
suspension center, tilting its magnetization axis toward azimuth
``theta + 180``. The reported field change is the difference at the fixed
sensing point between the deflected and rest poses, in the readout frame
whose +x axis gives a positive in-line response (a deflection toward
azimuth 0 raises ``dB_x``).

Counts are ``round(dB_mT * sensitivity)``, saturating at the field range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidGeometryError, PointInsideMagnetError, PoseCollisionError
from .suspension import Deflection

MU0 = 4e-7 * math.pi


@dataclass(frozen=True)
class MagnetSpec:
    """Cube magnet: edge (m), remanence (T), and distance from the rotation
    center to the magnet center along -z (m)."""

    edge_length: float = 2e-3
    remanence: float = 1.2
    pivot_offset: float = 1.5e-3

    def __post_init__(self):
        if self.edge_length <= 0:
            raise InvalidGeometryError("magnet edge length must be positive")
        if self.remanence <= 0:
            raise InvalidGeometryError("remanence must be positive")
        if self.pivot_offset < 0.5 * self.edge_length:
            raise InvalidGeometryError("magnet center must sit clear of the rotation center")


@dataclass(frozen=True)
class HallSpec:
    """Sensing element: distance from the rotation center along -z (m),
    sensitivity (LSB/mT), full range (mT), and resolution floor (mT)."""

    sensor_offset: float = 4e-3
    sensitivity: float = 5.0
    field_range: float = 230.0
    resolution_floor: float | None = None

    def __post_init__(self):
        if self.sensor_offset <= 0:
            raise InvalidGeometryError("sensor offset must be positive")
        if self.sensitivity <= 0 or self.field_range <= 0:
            raise InvalidGeometryError("sensitivity and field range must be positive")
        floor = 1.0 / self.sensitivity
        if self.resolution_floor is None:
            object.__setattr__(self, "resolution_floor", floor)
        elif not math.isclose(self.resolution_floor, floor, rel_tol=1e-9):
            raise InvalidGeometryError("resolution floor must equal 1/sensitivity")

    def check_against(self, magnet: MagnetSpec) -> None:
        if self.sensor_offset <= magnet.pivot_offset + 0.5 * magnet.edge_length:
            raise InvalidGeometryError("sensing element must sit outside the magnet body")

    @property
    def max_counts(self) -> int:
        return int(round(self.field_range * self.sensitivity))


@dataclass(frozen=True)
class FieldDelta:
    """Field change at the sensing point relative to the rest pose, mT."""

    dbx: float
    dby: float
    dbz: float

    @property
    def magnitude_xy(self) -> float:
        return math.hypot(self.dbx, self.dby)

    def as_array(self) -> np.ndarray:
        return np.array([self.dbx, self.dby, self.dbz])


@dataclass(frozen=True)
class SensorReading:
    """Quantized 3-axis field change in LSB counts, with a stream timestamp.

    ``clipped`` marks range saturation of the readout chip, distinct from the
    mechanical stop of the suspension.
    """

    bx: int
    by: int
    bz: int
    t: float = 0.0
    clipped: bool = False

    @property
    def magnitude_xy(self) -> float:
        return math.hypot(self.bx, self.by)


def _half_edges(magnet: MagnetSpec) -> np.ndarray:
    return np.full(3, 0.5 * magnet.edge_length)


def cuboid_field_local(half_edges, remanence: float, points) -> np.ndarray:
    """Field (tesla) of a prism magnetized along +z, in the magnet frame.

    ``half_edges`` are the half side lengths (m); ``points`` is (..., 3).
    Raw physics helper: no sign restriction on ``remanence``, no
    inside-body check.
    """
    p = np.asarray(points, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    hx, hy, hz = half_edges
    X = np.stack([x + hx, x - hx], axis=-1)[..., :, None, None]
    Y = np.stack([y + hy, y - hy], axis=-1)[..., None, :, None]
    Z = np.stack([z + hz, z - hz], axis=-1)[..., None, None, :]
    s = np.array([1.0, -1.0])
    sign = s[:, None, None] * s[None, :, None] * s[None, None, :]
    r = np.sqrt(X * X + Y * Y + Z * Z)
    k = remanence / (4.0 * math.pi)
    bx = np.sum(sign * np.log(r + Y), axis=(-3, -2, -1))
    by = np.sum(sign * np.log(r + X), axis=(-3, -2, -1))
    bz = -np.sum(sign * np.arctan2(X * Y, Z * r), axis=(-3, -2, -1))
    return k * np.stack([bx, by, bz], axis=-1)


def cuboid_field_jacobian_local(half_edges, remanence: float, point) -> np.ndarray:
    """Spatial gradient dB_i/dx_j (tesla/m) of the prism field at one point."""
    x, y, z = np.asarray(point, dtype=float)
    hx, hy, hz = half_edges
    jac = np.zeros((3, 3))
    for i, X in ((0, x + hx), (1, x - hx)):
        for j, Y in ((0, y + hy), (1, y - hy)):
            for k, Z in ((0, z + hz), (1, z - hz)):
                s = -1.0 if (i + j + k) % 2 else 1.0
                r = math.sqrt(X * X + Y * Y + Z * Z)
                d = X * X * Y * Y + Z * Z * r * r
                jac[0, 0] += s * (X / r) / (r + Y)
                jac[0, 1] += s / r
                jac[0, 2] += s * (Z / r) / (r + Y)
                jac[1, 0] += s / r
                jac[1, 1] += s * (Y / r) / (r + X)
                jac[1, 2] += s * (Z / r) / (r + X)
                jac[2, 0] += -s * Z * Y * (Y * Y + Z * Z) / (r * d)
                jac[2, 1] += -s * Z * X * (X * X + Z * Z) / (r * d)
                jac[2, 2] += s * X * Y * (r * r + Z * Z) / (r * d)
    return remanence / (4.0 * math.pi) * jac


def dipole_field_local(half_edges, remanence: float, points) -> np.ndarray:
    """Point-dipole approximation (tesla) of the same prism, magnet frame."""
    p = np.asarray(points, dtype=float)
    volume = 8.0 * half_edges[0] * half_edges[1] * half_edges[2]
    moment = remanence * volume / MU0
    r = np.linalg.norm(p, axis=-1)
    mz = p[..., 2] * moment  # m . r with m along z
    pref = MU0 / (4.0 * math.pi * r**5)
    b = pref[..., None] * (3.0 * mz[..., None] * p)
    b[..., 2] -= MU0 * moment / (4.0 * math.pi * r**3)
    return b


def _check_outside(magnet: MagnetSpec, local_points) -> None:
    q = np.atleast_2d(np.asarray(local_points, dtype=float))
    half = 0.5 * magnet.edge_length
    inside = np.all(np.abs(q) < half, axis=-1)
    if np.any(inside):
        raise PointInsideMagnetError("field query point lies inside the magnet body")


def cuboid_field(magnet: MagnetSpec, points, rotation=None, center=None) -> np.ndarray:
    """Cube field (mT) at world points for an arbitrary magnet pose.

    ``rotation`` (3x3) maps magnet-frame to world-frame vectors; ``center``
    is the magnet center in world coordinates. Defaults: identity, origin.
    """
    p = np.asarray(points, dtype=float)
    if center is not None:
        p = p - np.asarray(center, dtype=float)
    if rotation is not None:
        rot = np.asarray(rotation, dtype=float)
        p = p @ rot  # R^T applied to rows
    _check_outside(magnet, p)
    b = cuboid_field_local(_half_edges(magnet), magnet.remanence, p)
    if rotation is not None:
        b = b @ rot.T
    return 1e3 * b


def dipole_field(magnet: MagnetSpec, points, rotation=None, center=None) -> np.ndarray:
    """Dipole-approximation field (mT); same pose conventions as cuboid_field."""
    p = np.asarray(points, dtype=float)
    if center is not None:
        p = p - np.asarray(center, dtype=float)
    if rotation is not None:
        rot = np.asarray(rotation, dtype=float)
        p = p @ rot
    b = dipole_field_local(_half_edges(magnet), magnet.remanence, p)
    if rotation is not None:
        b = b @ rot.T
    return 1e3 * b


def rotation_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def deflection_pose(magnet: MagnetSpec, deflection: Deflection) -> tuple[np.ndarray, np.ndarray]:
    """(rotation, center) of the magnet for a suspension deflection.

    The magnetization axis tilts by ``phi`` toward azimuth ``theta + 180``;
    the magnet spins with the azimuth so the response is exactly
    equivariant under rotations of ``theta``.
    """
    rot = rotation_z(math.radians(deflection.theta_deg) + math.pi) @ rotation_y(deflection.phi)
    center = rot @ np.array([0.0, 0.0, -magnet.pivot_offset])
    return rot, center


@lru_cache(maxsize=64)
def _rest_field(magnet: MagnetSpec, hall: HallSpec, model: str) -> tuple[float, float, float]:
    point = np.array([0.0, 0.0, -hall.sensor_offset])
    fn = cuboid_field if model == "cuboid" else dipole_field
    b = fn(magnet, point)
    return float(b[0]), float(b[1]), float(b[2])


def _check_pose_clearance(magnet: MagnetSpec, hall: HallSpec, rot, center) -> None:
    half = 0.5 * magnet.edge_length
    corners = np.array(
        [[sx * half, sy * half, sz * half] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    )
    world_z = (corners @ rot.T + center)[:, 2]
    if np.min(world_z) <= -hall.sensor_offset:
        raise PoseCollisionError("magnet pose crosses the sensing-element plane")


def field_delta(
    magnet: MagnetSpec, hall: HallSpec, deflection: Deflection, model: str = "cuboid"
) -> FieldDelta:
    """Field change (mT) at the sensing point for a suspension deflection."""
    hall.check_against(magnet)
    if model not in ("cuboid", "dipole"):
        raise ValueError(f"unknown field model {model!r}")
    if deflection.phi == 0.0:
        return FieldDelta(0.0, 0.0, 0.0)
    rot, center = deflection_pose(magnet, deflection)
    _check_pose_clearance(magnet, hall, rot, center)
    point = np.array([0.0, 0.0, -hall.sensor_offset])
    fn = cuboid_field if model == "cuboid" else dipole_field
    b = fn(magnet, point, rotation=rot, center=center)
    b0 = _rest_field(magnet, hall, model)
    return FieldDelta(float(b[0] - b0[0]), float(b[1] - b0[1]), float(b[2] - b0[2]))


def tilt_response(magnet: MagnetSpec, hall: HallSpec, phi: float) -> tuple[float, float]:
    """In-line field change g(phi) (mT) and its slope dg/dphi (mT/rad).

    Evaluated at azimuth 0, where the in-plane delta is (g, 0); the xy
    magnitude at any azimuth equals g by equivariance. The slope combines
    the analytic prism-field gradient with the pose derivative.
    """
    hall.check_against(magnet)
    p = np.array([0.0, 0.0, -hall.sensor_offset])
    d = hall.sensor_offset
    half = _half_edges(magnet)
    ry = rotation_y(phi)
    # magnet frame sensing point for pose Rz(pi) @ Ry(phi): q = Ry(-phi) p
    q = rotation_y(-phi) @ p
    q_dot = np.array([d * math.cos(phi), 0.0, d * math.sin(phi)])
    _check_outside(magnet, q)
    b_loc = cuboid_field_local(half, magnet.remanence, q)
    jac = cuboid_field_jacobian_local(half, magnet.remanence, q)
    c, s = math.cos(phi), math.sin(phi)
    ry_dot = np.array([[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]])
    w = ry @ b_loc
    w_dot = ry_dot @ b_loc + ry @ (jac @ q_dot)
    # readout frame flips x: g = -(W_x - W_x(0)) with W_x(0) = 0 on axis
    return -1e3 * float(w[0]), -1e3 * float(w_dot[0])


def quantize(delta: FieldDelta, hall: HallSpec, t: float = 0.0) -> SensorReading:
    """Round the field change to LSB counts, saturating at the field range."""
    raw = np.rint(delta.as_array() * hall.sensitivity)
    clipped = bool(np.any(np.abs(raw) > hall.max_counts))
    counts = np.clip(raw, -hall.max_counts, hall.max_counts).astype(int)
    return SensorReading(int(counts[0]), int(counts[1]), int(counts[2]), t=t, clipped=clipped)
