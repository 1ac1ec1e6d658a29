"""Benchmark dataset loader.

Layout (documented so licensed real data can be converted to it):

    <root>/studies/<id>/record.json
    <root>/studies/<id>/<view>/study.json + frames + masks/

record.json carries exactly one ground-truth variant:

    {"id": "study-01", "studies": {"a2c": "a2c", "a4c": "a4c"},
     "truth": {"ef_percent": 33.5, "grade": "ConsiderablyReduced"}}

    {"id": "qa-01", "studies": {"plax": "plax"},
     "question": "Is the pericardium thickened?",
     "options": ["normal pericardium", "pericardial thickening"],
     "truth": {"answer_option": "normal pericardium",
               "anatomy_group": "pericardium"}}
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

from .. import anatomy
from ..errors import DatasetError, FixtureError
from ..quant.grading import grade_ef
from ..tools.backends import load_study


@dataclass(frozen=True)
class EfTruth:
    ef_percent: float
    grade: str


@dataclass(frozen=True)
class QaTruth:
    answer_option: str
    anatomy_group: str


@dataclass
class StudyRecord:
    id: str
    study_dirs: dict[str, Path]  # view hint -> directory
    truth: EfTruth | QaTruth
    question: str | None = None
    options: tuple[str, ...] | None = None

    @property
    def is_ef(self) -> bool:
        return isinstance(self.truth, EfTruth)

    def study_refs(self) -> tuple[str, ...]:
        return tuple(str(self.study_dirs[k]) for k in sorted(self.study_dirs))


def _parse_record(record_path: Path) -> StudyRecord:
    try:
        raw = json.loads(record_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{record_path}: invalid JSON ({exc})") from exc
    record_id = raw.get("id")
    if not record_id:
        raise DatasetError(f"{record_path}: missing record id")
    truth_raw = raw.get("truth", {})
    has_ef = "ef_percent" in truth_raw
    has_qa = "answer_option" in truth_raw
    if has_ef == has_qa:
        raise DatasetError(
            f"record {record_id}: exactly one ground-truth variant required"
        )
    if has_ef:
        ef = float(truth_raw["ef_percent"])
        grade = str(truth_raw["grade"])
        expected = grade_ef(ef).grade
        if grade != expected:
            raise DatasetError(
                f"record {record_id}: grade {grade!r} inconsistent with "
                f"EF {ef} (expected {expected!r})"
            )
        truth: EfTruth | QaTruth = EfTruth(ef_percent=ef, grade=grade)
    else:
        group = str(truth_raw["anatomy_group"])
        if not anatomy.is_valid_group(group):
            raise DatasetError(f"record {record_id}: unknown anatomy group {group!r}")
        truth = QaTruth(answer_option=str(truth_raw["answer_option"]), anatomy_group=group)

    study_dirs = {}
    for hint, rel in raw.get("studies", {}).items():
        study_dir = record_path.parent / rel
        try:
            sidecar = load_study(study_dir)
        except FixtureError as exc:
            raise DatasetError(f"record {record_id}: {exc}") from exc
        sx, sy = sidecar.pixel_spacing_mm
        if sx <= 0 or sy <= 0:
            raise DatasetError(f"record {record_id}: non-positive spacing in {study_dir}")
        study_dirs[str(hint)] = study_dir
    if not study_dirs:
        raise DatasetError(f"record {record_id}: no study directories listed")

    options = raw.get("options")
    return StudyRecord(
        id=str(record_id),
        study_dirs=study_dirs,
        truth=truth,
        question=raw.get("question"),
        options=tuple(options) if options else None,
    )


def load_dataset(root_dir: str | Path) -> list[StudyRecord]:
    """Validated records in deterministic (id-sorted) order."""
    root = Path(root_dir)
    studies_dir = root / "studies"
    if not studies_dir.is_dir():
        if root.is_dir():
            warnings.warn(f"{root} has no studies/ subdirectory; empty dataset", stacklevel=2)
            return []
        raise DatasetError(f"dataset root not found: {root}")
    records = []
    for record_path in sorted(studies_dir.glob("*/record.json")):
        records.append(_parse_record(record_path))
    if not records:
        warnings.warn(f"no records found under {studies_dir}", stacklevel=2)
    records.sort(key=lambda r: r.id)
    seen = set()
    for record in records:
        if record.id in seen:
            raise DatasetError(f"duplicate record id {record.id!r}")
        seen.add(record.id)
    return records
