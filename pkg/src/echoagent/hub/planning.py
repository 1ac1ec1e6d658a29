"""Deterministic compilation of a repository entry into tool-mapped steps.

Sections compile mechanically: view mentions become view-identification
steps, structure mentions become per-view per-phase segmentation steps,
measurement phrases become quantification steps wired to the segmentation
outputs. Diagnostic criteria define hypotheses, not steps. Tool selection
matches layer, anatomy applicability, and the output field the step needs;
ambiguity resolves to the lexicographically-first tool with a warning.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .. import anatomy
from ..errors import PlanningError
from ..kb.summarize import RepositoryEntry
from ..tools.registry import ToolRegistry
from ..tools.views import find_views_in_text

ED = "ED"
ES = "ES"

_VOLUME_WORDS = ("volume", "method of disks", "disk summation")
_EF_WORDS = ("ejection fraction",)
_AREA_WORDS = ("area",)
_DIMENSION_WORDS = ("diameter", "dimension")


@dataclass
class ActionStep:
    step_id: int
    goal: str
    tool_name: str
    inputs: dict
    origin: str = "planned"  # planned | subgoal
    parent_step_id: int | None = None


@dataclass
class Plan:
    steps: list[ActionStep] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    views: list[str] = field(default_factory=list)
    structures: list[str] = field(default_factory=list)


def _find_tool(registry: ToolRegistry, layer: str, anatomy_name: str | None,
               required_output: str, capability: str, warnings: list[str]) -> str:
    descriptor, warning = registry.find(layer, anatomy_name, required_output)
    if descriptor is None:
        raise PlanningError(
            f"no registered {layer} tool provides {required_output!r} "
            f"(needed for {capability})"
        )
    if warning:
        warnings.append(warning)
    return descriptor.name


def _structures_in(items: list[str], fallback: str) -> list[str]:
    ordered: list[str] = []
    for item in items:
        lowered = item.lower()
        mentions = []
        for group in anatomy.ANATOMY_GROUPS:
            positions = [lowered.find(kw) for kw in group.keywords if kw in lowered]
            if positions:
                mentions.append((min(positions), group.canonical_name))
        for _, name in sorted(mentions):
            if name not in ordered:
                ordered.append(name)
    if not ordered and items:
        ordered = [fallback]
    return ordered


def plan_steps(
    entry: RepositoryEntry,
    query,
    registry: ToolRegistry,
    taxonomy: tuple[str, ...],
    n_disks: int = 20,
) -> Plan:
    plan = Plan()
    view_items = entry.section_items("views_to_acquire")
    segment_items = entry.section_items("structures_to_segment")
    measure_items = entry.section_items("measurements")

    if not view_items and not segment_items and not measure_items:
        plan.warnings.append(
            f"repository entry for {entry.anatomy!r} offers no guidance; empty plan"
        )
        return plan

    for item in view_items:
        for view in find_views_in_text(item, taxonomy):
            if view not in plan.views:
                plan.views.append(view)
    plan.structures = _structures_in(segment_items, entry.anatomy)

    need_volumes = any(w in item.lower() for item in measure_items for w in _VOLUME_WORDS)
    need_ef = any(w in item.lower() for item in measure_items for w in _EF_WORDS)
    phases = [ED, ES] if (need_volumes or need_ef) else [ED]

    next_id = 0

    def add(goal: str, tool_name: str, inputs: dict) -> None:
        nonlocal next_id
        plan.steps.append(ActionStep(next_id, goal, tool_name, inputs))
        next_id += 1

    if plan.views and query.study_refs:
        classify_tool = _find_tool(
            registry, "perceptual", entry.anatomy, "view", "view identification",
            plan.warnings,
        )
        for ref in query.study_refs:
            add(
                f"identify the echocardiographic view of {ref}",
                classify_tool,
                {"op": "classify_view", "study_dir": str(ref)},
            )

    if plan.structures and plan.views:
        for structure in plan.structures:
            segment_tool = _find_tool(
                registry, "operational", structure, "mask", "structure segmentation",
                plan.warnings,
            )
            for view in plan.views:
                for phase in phases:
                    add(
                        f"segment {structure} on {view} at {phase}",
                        segment_tool,
                        {"op": "segment", "structure": structure, "view": view, "phase": phase},
                    )
    elif plan.structures and not plan.views:
        plan.warnings.append("structures to segment but no views to acquire; skipping segmentation")

    measured: set[tuple] = set()
    for item in measure_items:
        lowered = item.lower()
        targets = [s for s in _structures_in([item], entry.anatomy) if s in plan.structures]
        if not targets:
            targets = [entry.anatomy]
        for structure in targets:
            if any(w in lowered for w in _VOLUME_WORDS) or any(w in lowered for w in _EF_WORDS):
                volume_tool = _find_tool(
                    registry, "functional", structure, "volume_ml", "disk-summation volume",
                    plan.warnings,
                )
                for phase in (ED, ES):
                    key = ("volume", structure, phase)
                    if key not in measured:
                        measured.add(key)
                        add(
                            f"compute biplane {structure} volume at {phase}",
                            volume_tool,
                            {"op": "volume", "structure": structure, "phase": phase,
                             "n_disks": n_disks},
                        )
            if any(w in lowered for w in _EF_WORDS) and ("ef", structure) not in measured:
                measured.add(("ef", structure))
                ef_tool = _find_tool(
                    registry, "functional", structure, "ef_percent", "ejection fraction",
                    plan.warnings,
                )
                add(
                    f"compute {structure} ejection fraction",
                    ef_tool,
                    {"op": "ef", "structure": structure},
                )
                grade_tool = _find_tool(
                    registry, "functional", structure, "grade", "ejection fraction grading",
                    plan.warnings,
                )
                add(
                    f"grade {structure} ejection fraction",
                    grade_tool,
                    {"op": "grade", "structure": structure},
                )
            if any(w in lowered for w in _AREA_WORDS) and ("area", structure) not in measured:
                measured.add(("area", structure))
                area_tool = _find_tool(
                    registry, "functional", structure, "area_mm2", "cross-sectional area",
                    plan.warnings,
                )
                view = plan.views[0] if plan.views else None
                add(
                    f"measure {structure} area",
                    area_tool,
                    {"op": "area", "structure": structure, "view": view, "phase": ED},
                )
            if any(w in lowered for w in _DIMENSION_WORDS) and ("dimension", structure) not in measured:
                measured.add(("dimension", structure))
                dim_tool = _find_tool(
                    registry, "functional", structure, "dimension_mm", "linear dimension",
                    plan.warnings,
                )
                view = plan.views[0] if plan.views else None
                add(
                    f"measure {structure} long-axis dimension",
                    dim_tool,
                    {"op": "dimension", "structure": structure, "view": view, "phase": ED},
                )
    return plan
