"""Mask geometry: areas, principal long axis, and perpendicular chords.

All routines operate on the largest connected component of the target
label. Axis finding is PCA over pixel coordinates; chords are measured by
counting target pixels along a ray perpendicular to the axis, scaled by
the physical step length of that ray (which handles anisotropic spacing).
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..errors import GeometryError
from ..tools.masks import SegmentationMask
from .types import EMPTY_STRUCTURE, LongAxis, MeasurementResult

MIN_REGION_PIXELS = 20

# 8-connectivity: diagonal neighbours belong to the same component
_CONNECTIVITY = np.ones((3, 3), dtype=int)


def mask_area(mask: SegmentationMask, target_label: int) -> MeasurementResult:
    """Pixel count times the pixel footprint, in mm²."""
    count = mask.pixel_count(target_label)
    sx, sy = mask.pixel_spacing_mm
    flags = (EMPTY_STRUCTURE,) if count == 0 else ()
    return MeasurementResult(kind="area_mm2", value=count * sx * sy, flags=flags)


def largest_component(binary: np.ndarray) -> np.ndarray:
    labeled, n = ndimage.label(binary, structure=_CONNECTIVITY)
    if n == 0:
        return np.zeros_like(binary, dtype=bool)
    sizes = ndimage.sum_labels(np.ones_like(binary, dtype=np.int64), labeled, range(1, n + 1))
    return labeled == (int(np.argmax(sizes)) + 1)


def _region_coords(mask: SegmentationMask, target_label: int) -> np.ndarray:
    """(N, 2) array of (x, y) pixel coordinates of the largest component."""
    binary = mask.labels == target_label
    if int(binary.sum()) < MIN_REGION_PIXELS:
        raise GeometryError(
            f"label {target_label} region has {int(binary.sum())} px, "
            f"need at least {MIN_REGION_PIXELS} for a reliable axis"
        )
    component = largest_component(binary)
    ys, xs = np.nonzero(component)
    return np.stack([xs, ys], axis=1).astype(np.float64)


def _principal_direction(coords: np.ndarray) -> np.ndarray:
    centered = coords - coords.mean(axis=0)
    cov = centered.T @ centered / len(coords)
    eigvals, eigvecs = np.linalg.eigh(cov)
    direction = eigvecs[:, int(np.argmax(eigvals))]
    # canonical sign: positive y, then positive x, so reruns agree bit-for-bit
    if direction[1] < 0 or (direction[1] == 0 and direction[0] < 0):
        direction = -direction
    return direction


def _chord_mm(
    mask: SegmentationMask,
    target_label: int,
    point: np.ndarray,
    perp: np.ndarray,
    max_steps: int,
) -> float:
    """Chord length through ``point`` along ``perp``: hit count x step size."""
    sx, sy = mask.pixel_spacing_mm
    step_mm = math.hypot(perp[0] * sx, perp[1] * sy)
    height, width = mask.labels.shape
    hits = 0
    for s in range(-max_steps, max_steps + 1):
        x = int(math.floor(point[0] + s * perp[0] + 0.5))
        y = int(math.floor(point[1] + s * perp[1] + 0.5))
        if 0 <= x < width and 0 <= y < height and mask.labels[y, x] == target_label:
            hits += 1
    return hits * step_mm


def long_axis(
    mask: SegmentationMask, target_label: int, n_probe_disks: int = 20
) -> LongAxis:
    """Principal axis of the target region, oriented apex first.

    The apex is the endpoint on the narrower side of the region, judged by
    the mean chord over the 10% of probe disks nearest each endpoint; a
    width tie within 1e-6 falls back to the endpoint with the smaller y.
    """
    coords = _region_coords(mask, target_label)
    direction = _principal_direction(coords)
    centroid = coords.mean(axis=0)
    projections = (coords - centroid) @ direction
    lo = centroid + direction * float(projections.min())
    hi = centroid + direction * float(projections.max())

    sx, sy = mask.pixel_spacing_mm
    length_mm = math.hypot((hi[0] - lo[0]) * sx, (hi[1] - lo[1]) * sy)
    if length_mm <= 0:
        raise GeometryError("degenerate region: zero-length principal axis")

    perp = np.array([-direction[1], direction[0]])
    max_steps = int(math.ceil(math.hypot(*mask.labels.shape))) + 1
    probe = max(1, n_probe_disks)
    near = max(1, math.ceil(probe * 0.1))
    widths = []
    for i in range(probe):
        t = (i + 0.5) / probe
        point = lo + (hi - lo) * t
        widths.append(_chord_mm(mask, target_label, point, perp, max_steps))
    width_lo = float(np.mean(widths[:near]))
    width_hi = float(np.mean(widths[-near:]))

    if abs(width_lo - width_hi) <= 1e-6:
        apex, base = (lo, hi) if lo[1] <= hi[1] else (hi, lo)
    elif width_lo < width_hi:
        apex, base = lo, hi
    else:
        apex, base = hi, lo
    return LongAxis(
        apex=(float(apex[0]), float(apex[1])),
        base_mid=(float(base[0]), float(base[1])),
        length_mm=length_mm,
    )


def disk_diameters(
    mask: SegmentationMask,
    target_label: int,
    axis: LongAxis,
    n_disks: int = 20,
) -> list[float]:
    """Perpendicular chord at the midpoint of each of n equal axis segments.

    Disks are ordered from apex to base. A disk whose ray misses the region
    contributes 0.
    """
    if n_disks < 1:
        raise GeometryError("n_disks must be >= 1")
    apex = np.array(axis.apex, dtype=np.float64)
    base = np.array(axis.base_mid, dtype=np.float64)
    span = base - apex
    norm = math.hypot(span[0], span[1])
    if norm == 0:
        raise GeometryError("axis endpoints coincide")
    direction = span / norm
    perp = np.array([-direction[1], direction[0]])
    max_steps = int(math.ceil(math.hypot(*mask.labels.shape))) + 1
    diameters = []
    for i in range(n_disks):
        t = (i + 0.5) / n_disks
        point = apex + span * t
        diameters.append(_chord_mm(mask, target_label, point, perp, max_steps))
    return diameters
