"""Design-configuration schema: strict JSON documents to core objects.

A design document has sections ``whisker`` (or a ``preset`` name),
``immersion``, ``spring``, ``magnet``, ``hall`` and ``fluid``. Unknown keys
are rejected. Lengths carry explicit unit suffixes: every ``*_m`` key also
accepts a ``*_mm`` twin (one or the other, not both); all other fields are
SI with the unit spelled in the key name.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .errors import ConfigError
from .geometry import ImmersionConfig, Shape, WhiskerSpec
from .magnetics import HallSpec, MagnetSpec
from .presets import DRAG_COEFFICIENT, SHEET_THICKNESS, preset
from .sensor import SensorDesign
from .suspension import SpringSpec


def _mm_to_m(data):
    """Fold ``*_mm`` keys into their ``*_m`` twins (exactly one of the pair)."""
    if not isinstance(data, dict):
        return data
    out = dict(data)
    for key in list(out):
        if key.endswith("_mm"):
            twin = key[: -len("_mm")] + "_m"
            if twin in out:
                raise ValueError(f"give only one of '{twin}' and '{key}'")
            out[twin] = out.pop(key) / 1000.0
    return out


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="before")
    @classmethod
    def _units(cls, data):
        return _mm_to_m(data)


class WhiskerSection(_Section):
    shape: Literal["rod", "plate", "cross"]
    height_m: float
    width_m: float
    thickness_m: float | None = None
    drag_coefficient: float | None = None
    stem_height_m: float = 5e-3

    def to_spec(self) -> WhiskerSpec:
        shape = Shape(self.shape)
        thickness = self.thickness_m
        if thickness is None:
            thickness = self.width_m if shape is Shape.ROD else SHEET_THICKNESS
        cd = self.drag_coefficient if self.drag_coefficient is not None else DRAG_COEFFICIENT[shape]
        return WhiskerSpec(shape, self.height_m, self.width_m, thickness, cd, self.stem_height_m)


class ImmersionSection(_Section):
    depth_m: float = 30e-3

    def to_spec(self) -> ImmersionConfig:
        return ImmersionConfig(self.depth_m)


class SpringSection(_Section):
    torsional_stiffness_nm_per_rad: float = 3.47e-3
    max_deflection_deg: float = 20.0
    deflection_model: Literal["linear", "sine"] = "linear"

    def to_spec(self) -> SpringSpec:
        return SpringSpec(
            self.torsional_stiffness_nm_per_rad,
            math.radians(self.max_deflection_deg),
            self.deflection_model,
        )


class MagnetSection(_Section):
    edge_length_m: float = 2e-3
    remanence_t: float = 1.2
    pivot_offset_m: float = 1.5e-3

    def to_spec(self) -> MagnetSpec:
        return MagnetSpec(self.edge_length_m, self.remanence_t, self.pivot_offset_m)


class HallSection(_Section):
    sensor_offset_m: float = 4e-3
    sensitivity_lsb_per_mt: float = 5.0
    field_range_mt: float = 230.0

    def to_spec(self) -> HallSpec:
        return HallSpec(self.sensor_offset_m, self.sensitivity_lsb_per_mt, self.field_range_mt)


class FluidSection(_Section):
    density_kg_per_m3: float = 1000.0


class DesignConfig(_Section):
    """Top-level design document. Exactly one of ``preset`` / ``whisker``."""

    preset: str | None = None
    whisker: WhiskerSection | None = None
    immersion: ImmersionSection = ImmersionSection()
    spring: SpringSection = SpringSection()
    magnet: MagnetSection = MagnetSection()
    hall: HallSection = HallSection()
    fluid: FluidSection = FluidSection()

    @model_validator(mode="after")
    def _one_whisker_source(self):
        if (self.preset is None) == (self.whisker is None):
            raise ValueError("give exactly one of 'preset' and 'whisker'")
        return self

    def to_design(self) -> SensorDesign:
        whisker = preset(self.preset) if self.preset is not None else self.whisker.to_spec()
        return SensorDesign(
            whisker=whisker,
            immersion=self.immersion.to_spec(),
            spring=self.spring.to_spec(),
            magnet=self.magnet.to_spec(),
            hall=self.hall.to_spec(),
            fluid_density=self.fluid.density_kg_per_m3,
        )

    def fingerprint(self) -> str:
        canonical = json.dumps(self.model_dump(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def parse_design_config(doc: dict) -> DesignConfig:
    """Validate a raw document; raises ConfigError naming the offending key."""
    try:
        return DesignConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(f"invalid design config: {_format_validation_error(exc)}") from exc


def load_design_config(path) -> DesignConfig:
    """Read and validate a design-config JSON file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    return parse_design_config(doc)


def default_config() -> DesignConfig:
    """The reference design: Rod3 at 30 mm immersion, stock everything else."""
    return DesignConfig(preset="Rod3")
