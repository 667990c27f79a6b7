"""Built-in drag-element variants: three sizes each of rod, plate and cross.

Rods are carbon-fiber cylinders 60 mm tall; plates and crosses are cut from
1.5 mm sheet. Drag coefficients per cross-section: 1.1 for the rod, 1.32 for
plate and cross.
"""

from __future__ import annotations

from .geometry import Shape, WhiskerSpec

SHEET_THICKNESS = 1.5e-3
ROD_HEIGHT = 60e-3
DRAG_COEFFICIENT = {Shape.ROD: 1.1, Shape.PLATE: 1.32, Shape.CROSS: 1.32}


def _rod(diameter: float) -> WhiskerSpec:
    return WhiskerSpec(Shape.ROD, ROD_HEIGHT, diameter, diameter, DRAG_COEFFICIENT[Shape.ROD])


def _flat(shape: Shape, height: float, width: float) -> WhiskerSpec:
    return WhiskerSpec(shape, height, width, SHEET_THICKNESS, DRAG_COEFFICIENT[shape])


PRESETS: dict[str, WhiskerSpec] = {
    "Cross1": _flat(Shape.CROSS, 30e-3, 5e-3),
    "Cross2": _flat(Shape.CROSS, 20e-3, 7.5e-3),
    "Cross3": _flat(Shape.CROSS, 15e-3, 10e-3),
    "Plate1": _flat(Shape.PLATE, 30e-3, 5e-3),
    "Plate2": _flat(Shape.PLATE, 20e-3, 7.5e-3),
    "Plate3": _flat(Shape.PLATE, 15e-3, 10e-3),
    "Rod1": _rod(1e-3),
    "Rod2": _rod(2e-3),
    "Rod3": _rod(3e-3),
}


def preset(name: str) -> WhiskerSpec:
    """Look up a built-in drag element by name (case-insensitive)."""
    for key, spec in PRESETS.items():
        if key.lower() == name.lower():
            return spec
    raise KeyError(f"unknown whisker preset {name!r}; available: {', '.join(PRESETS)}")
