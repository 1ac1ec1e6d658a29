"""Tool backends: study fixtures, mock handlers, and the HTTP wire adapter.

A study is a directory of PGM frames plus a ``study.json`` sidecar:

    {"view": "apical-4-chamber", "confidence": 0.97,
     "pixel_spacing_mm": [0.5, 0.5],
     "frames": {"ED": "ed.pgm", "ES": "es.pgm"},
     "structure_map": {"1": "left ventricle"},
     "segmentation_confidence": 1.0}

Ground-truth masks live under ``masks/`` co-named with their frame, which
is all the mock segmenter does: a deterministic table lookup.
"""
from __future__ import annotations

import base64
import json
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from ..errors import ContractError, FixtureError, TaxonomyError, TransportError
from .masks import SegmentationMask
from .pgm import decode_pgm, encode_pgm, pgm_dimensions, read_pgm
from .registry import BlobRef, InvocationContext, ToolDescriptor, ToolRegistry
from .schema import FieldSpec

PGM_MEDIA_TYPE = "image/x-portable-graymap"
SIDECAR_NAME = "study.json"


@dataclass
class StudySidecar:
    view: str
    confidence: float
    pixel_spacing_mm: tuple[float, float]
    frames: dict[str, str]  # phase -> relative frame path
    structure_map: dict[int, str]
    segmentation_confidence: float
    study_dir: Path

    def frame_path(self, phase: str) -> Path:
        try:
            return self.study_dir / self.frames[phase]
        except KeyError:
            raise FixtureError(
                f"study {self.study_dir} has no frame for phase {phase!r}"
            ) from None

    def mask_path(self, phase: str) -> Path:
        return self.study_dir / "masks" / self.frames[phase]


def load_study(study_dir: str | Path) -> StudySidecar:
    study_dir = Path(study_dir)
    sidecar_path = study_dir / SIDECAR_NAME
    if not sidecar_path.exists():
        raise FixtureError(f"missing study sidecar {sidecar_path}")
    try:
        raw = json.loads(sidecar_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FixtureError(f"unparseable study sidecar {sidecar_path}: {exc}") from exc
    try:
        spacing = tuple(float(v) for v in raw["pixel_spacing_mm"])
        sidecar = StudySidecar(
            view=str(raw["view"]),
            confidence=float(raw["confidence"]),
            pixel_spacing_mm=(spacing[0], spacing[1]),
            frames={str(k): str(v) for k, v in raw["frames"].items()},
            structure_map={int(k): str(v) for k, v in raw.get("structure_map", {"1": "left ventricle"}).items()},
            segmentation_confidence=float(raw.get("segmentation_confidence", 1.0)),
            study_dir=study_dir,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FixtureError(f"malformed study sidecar {sidecar_path}: {exc}") from exc
    if sidecar.pixel_spacing_mm[0] <= 0 or sidecar.pixel_spacing_mm[1] <= 0:
        raise FixtureError(f"{sidecar_path}: pixel spacing must be positive")
    return sidecar


# -- mock handlers ----------------------------------------------------------


def mock_view_handler(inputs: dict, ctx: InvocationContext):
    sidecar = load_study(inputs["study_dir"])
    return {"view": sidecar.view}, sidecar.confidence, []


def mock_segment_handler(inputs: dict, ctx: InvocationContext):
    study = load_study(inputs["study_dir"])
    phase = inputs["phase"]
    target = inputs["target"]
    frame_path = study.frame_path(phase)
    if not frame_path.exists():
        raise FixtureError(f"missing frame {frame_path}")
    mask_path = study.mask_path(phase)
    if not mask_path.exists():
        raise FixtureError(f"missing ground-truth mask {mask_path}")
    labels = read_pgm(mask_path)
    mask = SegmentationMask(
        labels=labels,
        pixel_spacing_mm=study.pixel_spacing_mm,
        structure_map=dict(study.structure_map),
    )
    blob = BlobRef.from_bytes(encode_pgm(labels), PGM_MEDIA_TYPE, path=str(mask_path))
    label = mask.label_for(target)
    empty = label is None or mask.pixel_count(label) == 0
    confidence = 0.0 if empty else study.segmentation_confidence
    return {"mask": mask, "empty_structure": empty}, confidence, [blob]


# -- wire protocol ----------------------------------------------------------


def make_wire_handler(
    base_url: str,
    tool_name: str,
    timeout_s: float = 5.0,
    retries: int = 2,
    backoff_s: float = 0.1,
    session: requests.Session | None = None,
):
    """POST {base_url}/invoke with {tool, invocation_id, inputs}.

    Retries on transport failures and non-200 responses with exponential
    backoff; the attempt count is surfaced through the invocation context
    so the registry log records it.
    """
    http = session or requests.Session()
    url = base_url.rstrip("/") + "/invoke"

    def handler(inputs: dict, ctx: InvocationContext):
        body = {"tool": tool_name, "invocation_id": ctx.invocation_id, "inputs": inputs}
        last_error: str | None = None
        attempts = retries + 1
        for attempt in range(attempts):
            ctx.attempts = attempt + 1
            try:
                resp = http.post(url, json=body, timeout=timeout_s)
            except requests.RequestException as exc:
                last_error = str(exc)
            else:
                if resp.status_code == 200:
                    return _decode_wire_response(resp, tool_name)
                last_error = f"HTTP {resp.status_code}"
            if attempt < attempts - 1:
                time.sleep(backoff_s * (2 ** attempt))
        raise TransportError(
            f"tool {tool_name!r} backend failed after {attempts} attempts: {last_error}",
            backend=base_url,
            attempts=attempts,
        )

    return handler


def _decode_wire_response(resp, tool_name: str):
    try:
        payload = resp.json()
    except ValueError as exc:
        raise ContractError(f"tool {tool_name!r} backend returned non-JSON body") from exc
    if not isinstance(payload, dict) or "outputs" not in payload or "confidence" not in payload:
        raise ContractError(
            f"tool {tool_name!r} backend response missing outputs/confidence"
        )
    outputs = payload["outputs"]
    if not isinstance(outputs, dict):
        raise ContractError(f"tool {tool_name!r} backend outputs is not an object")
    confidence = payload["confidence"]
    if not isinstance(confidence, (int, float)) or isinstance(confidence, bool):
        raise ContractError(f"tool {tool_name!r} backend confidence is not numeric")
    artifacts = []
    for raw in payload.get("artifacts", []):
        try:
            data = base64.b64decode(raw["bytes_b64"])
            artifacts.append(BlobRef.from_bytes(data, str(raw.get("media_type", ""))))
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError(
                f"tool {tool_name!r} backend artifact malformed: {exc}"
            ) from exc
    return outputs, float(confidence), artifacts


# -- fabric-level operations -------------------------------------------------


def classify_view(
    registry: ToolRegistry,
    tool_name: str,
    study_dir: str | Path,
    taxonomy: tuple[str, ...],
):
    """Run the view-identification tool and enforce the taxonomy."""
    result = registry.invoke(tool_name, {"study_dir": str(study_dir)})
    view = result.outputs["view"]
    if view not in taxonomy:
        raise TaxonomyError(f"classifier returned unknown view {view!r}")
    return result


def segment_structure(
    registry: ToolRegistry,
    tool_name: str,
    study_dir: str | Path,
    phase: str,
    target: str,
):
    """Run the segmentation tool; decode wire masks; check frame dimensions."""
    result = registry.invoke(
        tool_name, {"study_dir": str(study_dir), "phase": phase, "target": target}
    )
    study = load_study(study_dir)
    if "mask" not in result.outputs:
        # wire backends return the mask as a PGM artifact
        if not result.artifacts:
            raise ContractError(f"tool {tool_name!r} returned no mask payload")
        labels = decode_pgm(result.artifacts[0].data)
        mask = SegmentationMask(
            labels=labels,
            pixel_spacing_mm=study.pixel_spacing_mm,
            structure_map=dict(study.structure_map),
        )
        label = mask.label_for(target)
        empty = label is None or mask.pixel_count(label) == 0
        result.outputs = {"mask": mask, "empty_structure": empty}
        if empty:
            result.confidence = 0.0
    mask = result.outputs["mask"]
    frame_path = study.frame_path(phase)
    if frame_path.exists():
        width, height = pgm_dimensions(frame_path)
        if (mask.width, mask.height) != (width, height):
            raise ContractError(
                f"mask dimensions {mask.width}x{mask.height} do not match "
                f"frame {width}x{height}"
            )
    return result


# -- default registration ----------------------------------------------------

VIEW_TOOL = "echo.view_classifier"
SEGMENT_TOOL = "echo.segmenter"


def register_perception_tools(
    registry: ToolRegistry,
    tool_url: str | None = None,
    timeout_s: float = 5.0,
    retries: int = 2,
    backoff_s: float = 0.1,
) -> None:
    """Register the perceptual and operational layers (mock or wire)."""
    backend = "wire" if tool_url else "mock"
    view_handler = (
        make_wire_handler(tool_url, VIEW_TOOL, timeout_s, retries, backoff_s)
        if tool_url
        else mock_view_handler
    )
    registry.register(
        ToolDescriptor(
            name=VIEW_TOOL,
            layer="perceptual",
            input_schema=(FieldSpec("study_dir", "string"),),
            output_schema=(FieldSpec("view", "string"),),
            backend=backend,
        ),
        view_handler,
    )
    segment_handler = (
        make_wire_handler(tool_url, SEGMENT_TOOL, timeout_s, retries, backoff_s)
        if tool_url
        else mock_segment_handler
    )
    registry.register(
        ToolDescriptor(
            name=SEGMENT_TOOL,
            layer="operational",
            input_schema=(
                FieldSpec("study_dir", "string"),
                FieldSpec("phase", "string"),
                FieldSpec("target", "string"),
            ),
            output_schema=(
                FieldSpec("mask", "mask", required=False),
                FieldSpec("empty_structure", "boolean", required=False),
            ),
            backend=backend,
        ),
        segment_handler,
    )
