from .types import ANOMALOUS, EMPTY_STRUCTURE, LongAxis, MeasurementResult
from .geometry import disk_diameters, largest_component, long_axis, mask_area
from .volume import biplane_volume, ejection_fraction
from .grading import (
    CONSIDERABLY_REDUCED,
    GRADES,
    MILDLY_REDUCED,
    NORMAL,
    GradingResult,
    grade_ef,
    normalize_grade_label,
)

__all__ = [
    "ANOMALOUS",
    "EMPTY_STRUCTURE",
    "LongAxis",
    "MeasurementResult",
    "disk_diameters",
    "largest_component",
    "long_axis",
    "mask_area",
    "biplane_volume",
    "ejection_fraction",
    "CONSIDERABLY_REDUCED",
    "GRADES",
    "MILDLY_REDUCED",
    "NORMAL",
    "GradingResult",
    "grade_ef",
    "normalize_grade_label",
]
