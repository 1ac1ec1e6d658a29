"""Replayable trace records: canonical digests, JSON-lines output.

Records deliberately carry no wall-clock fields, so two runs over the same
fixtures and config produce byte-identical trace files.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from ..tools.masks import SegmentationMask
from ..tools.pgm import encode_pgm

TRACE_FIELDS = (
    "t", "event_kind", "step_id", "tool", "outputs_digest", "confidence",
    "posterior", "trigger",
)


def canonical_payload(value):
    """Reduce any run artifact to deterministic JSON-serializable form."""
    if isinstance(value, SegmentationMask):
        return {
            "mask_sha256": hashlib.sha256(encode_pgm(value.labels)).hexdigest(),
            "pixel_spacing_mm": [float(s) for s in value.pixel_spacing_mm],
        }
    if is_dataclass(value) and not isinstance(value, type):
        return canonical_payload(asdict(value))
    if isinstance(value, dict):
        return {str(k): canonical_payload(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [canonical_payload(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [canonical_payload(v) for v in value.tolist()]
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, bytes):
        return hashlib.sha256(value).hexdigest()
    return value


def digest(value) -> str:
    canonical = json.dumps(canonical_payload(value), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class TraceWriter:
    def __init__(self):
        self.records: list[dict] = []

    def emit(
        self,
        t: int,
        event_kind: str,
        posterior,
        step_id: int | None = None,
        tool: str | None = None,
        outputs_digest: str | None = None,
        confidence: float | None = None,
        trigger: bool = False,
    ) -> dict:
        record = {
            "t": t,
            "event_kind": event_kind,
            "step_id": step_id,
            "tool": tool,
            "outputs_digest": outputs_digest,
            "confidence": None if confidence is None else float(confidence),
            "posterior": [float(p) for p in posterior],
            "trigger": bool(trigger),
        }
        self.records.append(record)
        return record

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n"
            for r in self.records
        )

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl(), encoding="utf-8")
        return path


def read_trace(path: str | Path) -> list[dict]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(json.loads(line))
    return records
