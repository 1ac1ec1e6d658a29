"""Segmentation mask payload shared by the tool layer and quantification."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError


@dataclass
class SegmentationMask:
    """8-bit label image: 0 = background, nonzero = structure labels.

    Every nonzero label present in the pixel data must be named in
    structure_map, and pixel spacing must be strictly positive.
    """

    labels: np.ndarray = field(repr=False)
    pixel_spacing_mm: tuple[float, float]
    structure_map: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.labels.ndim != 2:
            raise ContractError("mask labels must be a 2-D array")
        sx, sy = self.pixel_spacing_mm
        if sx <= 0 or sy <= 0:
            raise ContractError(f"pixel spacing must be positive, got {(sx, sy)}")
        present = set(int(v) for v in np.unique(self.labels)) - {0}
        unmapped = sorted(present - set(self.structure_map))
        if unmapped:
            raise ContractError(f"mask labels {unmapped} missing from structure_map")

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def label_for(self, structure: str) -> int | None:
        for label, name in sorted(self.structure_map.items()):
            if name == structure:
                return label
        return None

    def pixel_count(self, label: int) -> int:
        return int(np.count_nonzero(self.labels == label))
