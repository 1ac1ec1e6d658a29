"""The orchestration loop: resolve, plan, execute, score, adapt, conclude.

One hub instance owns one mutable graph and runs its loop sequentially;
the knowledge base and registry it reads are immutable, so any number of
hubs can run in parallel over them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..config import EngineConfig
from ..errors import EchoAgentError, GraphError, ResolutionError
from ..kb.index import KnowledgeBase, empty_entry
from ..kb.summarize import RepositoryEntry
from ..quant.grading import normalize_grade_label
from ..tools import backends
from ..tools.registry import ToolRegistry
from ..tools.views import ALTERNATE_VIEW, DEFAULT_TAXONOMY
from .graph import ReasoningGraph
from .hypotheses import (
    HypothesisSet,
    ThresholdRule,
    hypothesis_labels,
    labels_match,
    normalized_entropy,
    parse_criteria,
    update_posteriors,
)
from .planning import ED, ES, ActionStep, plan_steps
from .trace import TraceWriter, digest


@dataclass(frozen=True)
class DiagnosticQuery:
    text: str
    study_refs: tuple[str, ...]
    options: tuple[str, ...] | None = None  # set => multiple-choice mode

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("query text is empty")
        if not self.study_refs:
            raise ValueError("query needs at least one study reference")
        if self.options is not None and len(self.options) < 2:
            raise ValueError("multiple-choice query needs at least two options")

    @property
    def answer_mode(self) -> str:
        return "multiple_choice" if self.options else "free_conclusion"


@dataclass
class Conclusion:
    answer: str
    posterior: dict[str, float]
    low_consistency: bool
    anatomy: str
    graph: ReasoningGraph
    trace_records: list[dict]
    trace_path: str | None
    executed_steps: int
    subgoal_steps: int
    ef_percent: float | None = None
    grade: str | None = None
    warnings: list[str] = field(default_factory=list)


@dataclass
class _StepOutcome:
    confidence: float
    payload: dict
    op: str
    anomalous: bool = False
    failed: bool = False
    view: str | None = None


class ReasoningHub:
    def __init__(
        self,
        kb: KnowledgeBase,
        registry: ToolRegistry,
        config: EngineConfig | None = None,
        taxonomy: tuple[str, ...] = DEFAULT_TAXONOMY,
    ):
        self.kb = kb
        self.registry = registry
        self.config = config or EngineConfig()
        self.taxonomy = taxonomy

    # -- knowledge resolution -------------------------------------------------

    def resolve_repository(self, query: DiagnosticQuery) -> tuple[str, RepositoryEntry, float]:
        """Nearest primitive by cosine; its dominant anatomy tag picks the entry."""
        if len(self.kb) == 0:
            raise ResolutionError("knowledge base is empty; query unresolvable")
        query_vec = self.kb.encoder.embed(query.text)
        sims = self.kb.all_similarities(query_vec)
        ranked = sorted(sims.items(), key=lambda kv: (-kv[1], kv[0]))
        best_id, best_sim = ranked[0]
        if best_sim < self.config.s_min:
            raise ResolutionError(
                f"no primitive within s_min={self.config.s_min} of the query "
                f"(best similarity {best_sim:.4f})",
                nearest=self._nearest_anatomies(sims),
            )
        winner = None
        for pid, _ in ranked:
            if self.kb.primitives[pid].anatomy_tags:
                winner = self.kb.primitives[pid]
                break
        if winner is None:
            raise ResolutionError(
                "no anatomy-tagged primitive matches the query",
                nearest=self._nearest_anatomies(sims),
            )
        from ..anatomy import dominant_group

        anatomy_name = dominant_group(winner.text, winner.anatomy_tags)
        entry = self.kb.entries.get(anatomy_name) or empty_entry(anatomy_name, self.config.k)
        return anatomy_name, entry, best_sim

    def _nearest_anatomies(self, sims: dict[str, float]) -> tuple[str, ...]:
        best: dict[str, float] = {}
        for name, ids in self.kb.index.by_group.items():
            group_sims = [sims[pid] for pid in ids if pid in sims]
            if group_sims:
                best[name] = max(group_sims)
        ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
        return tuple(name for name, _ in ranked[:3])

    # -- main loop --------------------------------------------------------------

    def run(self, query: DiagnosticQuery, trace_path: str | Path | None = None) -> Conclusion:
        cfg = self.config
        trace = TraceWriter()
        anatomy_name, entry, similarity = self.resolve_repository(query)

        rules = parse_criteria(entry.section_items("diagnostic_criteria"))
        labels = hypothesis_labels(query.options, rules, entry.section_items("diagnostic_criteria"))
        hyp = HypothesisSet.uniform(labels)
        posterior = hyp.prior.copy()

        graph = ReasoningGraph()
        hypothesis_nodes = {label: graph.add_concept(label) for label in labels}
        anchors = {str(ref): graph.add_anchor({"study_ref": str(ref)}) for ref in query.study_refs}

        trace.emit(
            t=0, event_kind="resolve", posterior=posterior,
            outputs_digest=digest({"anatomy": anatomy_name, "similarity": similarity}),
            confidence=similarity,
        )

        plan = plan_steps(entry, query, self.registry, self.taxonomy, cfg.n_disks)
        trace.emit(
            t=0, event_kind="plan", posterior=posterior,
            outputs_digest=digest({
                "steps": [(s.step_id, s.tool_name, s.goal) for s in plan.steps],
                "warnings": plan.warnings,
                "hypotheses": list(labels),
            }),
        )

        state = _RunState(graph=graph, anchors=anchors, rules=rules,
                          hypothesis_nodes=hypothesis_nodes, labels=labels)
        queue: deque[ActionStep] = deque(plan.steps)
        pending_planned = sum(1 for s in plan.steps if s.origin == "planned")
        next_step_id = len(plan.steps)
        triggers_by_parent: dict[int, int] = {}
        executed = 0
        subgoal_steps = 0

        while queue and executed < cfg.d_max:
            step = queue.popleft()
            executed += 1
            if step.origin == "planned":
                pending_planned -= 1
            else:
                subgoal_steps += 1
            outcome = self._execute_step(step, state, executed)
            posterior, degenerate = update_posteriors(
                graph, hypothesis_nodes, labels, hyp.prior, cfg.beta, cfg.gamma
            )
            total = float(posterior.sum())
            if abs(total - 1.0) > 1e-9 or np.any(posterior < 0):
                raise GraphError(f"posterior left the simplex (sum={total!r})")
            fired, recipes = self._adaptive_trigger(step, outcome, posterior)
            if fired and recipes:
                used = triggers_by_parent.get(step.step_id, 0)
                if used < cfg.r_max:
                    triggers_by_parent[step.step_id] = used + 1
                    staged = []
                    for goal, tool_name, inputs in recipes:
                        staged.append(ActionStep(
                            step_id=next_step_id, goal=goal, tool_name=tool_name,
                            inputs=inputs, origin="subgoal", parent_step_id=step.step_id,
                        ))
                        next_step_id += 1
                    queue.extendleft(reversed(staged))
            trace.emit(
                t=executed,
                event_kind="step" if step.origin == "planned" else "subgoal_step",
                step_id=step.step_id,
                tool=step.tool_name,
                outputs_digest=digest(outcome.payload),
                confidence=outcome.confidence,
                posterior=posterior,
                trigger=fired,
            )
            if float(posterior.max()) >= cfg.p_stop and pending_planned == 0:
                break

        answer_index = int(np.argmax(posterior))
        answer = labels[answer_index]
        low_consistency = float(posterior.max()) < cfg.p_stop
        if not plan.steps:
            low_consistency = True
        trace.emit(
            t=executed, event_kind="final", posterior=posterior,
            outputs_digest=digest({"answer": answer, "low_consistency": low_consistency}),
        )

        written = None
        if trace_path is not None:
            written = str(trace.write(trace_path))
        return Conclusion(
            answer=answer,
            posterior={label: float(p) for label, p in zip(labels, posterior)},
            low_consistency=low_consistency,
            anatomy=anatomy_name,
            graph=graph,
            trace_records=trace.records,
            trace_path=written,
            executed_steps=executed,
            subgoal_steps=subgoal_steps,
            ef_percent=state.ef_value,
            grade=state.grade_value,
            warnings=list(plan.warnings),
        )

    # -- step execution ---------------------------------------------------------

    def _execute_step(self, step: ActionStep, state: "_RunState", t: int) -> _StepOutcome:
        op = step.inputs.get("op", "")
        try:
            if op == "classify_view":
                return self._do_classify(step, state, t)
            if op == "segment":
                return self._do_segment(step, state, t)
            if op == "volume":
                return self._do_volume(step, state, t)
            if op == "ef":
                return self._do_ef(step, state, t)
            if op == "grade":
                return self._do_grade(step, state, t)
            if op == "area":
                return self._do_area(step, state, t)
            if op == "dimension":
                return self._do_dimension(step, state, t)
            return state.fail(step, t, f"unknown step op {op!r}")
        except EchoAgentError as exc:
            return state.fail(step, t, str(exc))

    def _do_classify(self, step, state, t):
        study_dir = step.inputs["study_dir"]
        result = backends.classify_view(self.registry, step.tool_name, study_dir, self.taxonomy)
        view = result.outputs["view"]
        payload = {"view": view, "study_ref": study_dir,
                   "invocation_id": result.invocation_id}
        node = state.graph.add_evidence(
            payload, result.confidence, t,
            causes=[(state.anchors[study_dir], "generates")],
        )
        state.study_of_view[view] = study_dir
        state.classify_node[view] = node
        return _StepOutcome(result.confidence, payload, "classify_view", view=view)

    def _do_segment(self, step, state, t):
        view = step.inputs["view"]
        phase = step.inputs["phase"]
        structure = step.inputs["structure"]
        study_dir = state.study_of_view.get(view)
        if study_dir is None:
            return state.fail(step, t, f"no study classified as view {view!r}")
        result = backends.segment_structure(
            self.registry, step.tool_name, study_dir, phase, structure
        )
        mask = result.outputs["mask"]
        empty = bool(result.outputs.get("empty_structure", False))
        payload = {
            "structure": structure, "view": view, "phase": phase,
            "empty_structure": empty, "mask": mask,
            "invocation_id": result.invocation_id,
        }
        causes = [(state.anchors[study_dir], "generates")]
        if view in state.classify_node:
            causes.append((state.classify_node[view], "derives"))
        node = state.graph.add_evidence(payload, result.confidence, t, causes=causes)
        state.masks[(view, phase, structure)] = (node, mask, result.confidence)
        return _StepOutcome(result.confidence, payload, "segment", view=view)

    def _do_volume(self, step, state, t):
        from ..tools.views import A2C, A4C

        phase = step.inputs["phase"]
        structure = step.inputs["structure"]
        pair = []
        for view in (A2C, A4C):
            got = state.masks.get((view, phase, structure))
            if got is None:
                return state.fail(
                    step, t, f"missing {view} mask of {structure} at {phase}"
                )
            pair.append(got)
        (node_a2c, mask_a2c, _), (node_a4c, mask_a4c, _) = pair
        label = mask_a2c.label_for(structure)
        if label is None:
            return state.fail(step, t, f"structure {structure!r} not in mask label map")
        result = self.registry.invoke(step.tool_name, {
            "mask_a2c": mask_a2c, "mask_a4c": mask_a4c,
            "target_label": label, "n_disks": step.inputs.get("n_disks", self.config.n_disks),
        })
        value = float(result.outputs["volume_ml"])
        payload = {"volume_ml": value, "structure": structure, "phase": phase,
                   "invocation_id": result.invocation_id}
        node = state.graph.add_evidence(
            payload, result.confidence, t,
            causes=[(node_a2c, "derives"), (node_a4c, "derives")],
        )
        state.volumes[(structure, phase)] = (node, value, result.confidence)
        self._link_criteria(state, node, "volume_ml", value, result.confidence)
        return _StepOutcome(result.confidence, payload, "volume")

    def _do_ef(self, step, state, t):
        structure = step.inputs["structure"]
        edv = state.volumes.get((structure, ED))
        esv = state.volumes.get((structure, ES))
        if edv is None or esv is None:
            missing = ED if edv is None else ES
            return state.fail(step, t, f"missing {structure} volume at {missing}")
        result = self.registry.invoke(
            step.tool_name, {"edv_ml": edv[1], "esv_ml": esv[1]}
        )
        value = float(result.outputs["ef_percent"])
        anomalous = bool(result.outputs["anomalous"])
        payload = {"ef_percent": value, "anomalous": anomalous, "structure": structure,
                   "invocation_id": result.invocation_id}
        node = state.graph.add_evidence(
            payload, result.confidence, t,
            causes=[(edv[0], "derives"), (esv[0], "derives")],
        )
        state.ef_node[structure] = node
        state.ef_value = value
        state.ef_anomalous = anomalous
        if not anomalous:
            self._link_criteria(state, node, "ef_percent", value, result.confidence)
        return _StepOutcome(result.confidence, payload, "ef", anomalous=anomalous)

    def _do_grade(self, step, state, t):
        structure = step.inputs["structure"]
        if state.ef_value is None or structure not in state.ef_node:
            return state.fail(step, t, f"no ejection fraction available for {structure}")
        if state.ef_anomalous:
            return state.fail(step, t, "ejection fraction flagged anomalous; grading withheld")
        result = self.registry.invoke(step.tool_name, {"ef_percent": state.ef_value})
        grade = result.outputs["grade"]
        payload = {"grade": grade, "structure": structure,
                   "invocation_id": result.invocation_id}
        node = state.graph.add_evidence(
            payload, result.confidence, t,
            causes=[(state.ef_node[structure], "derives")],
        )
        state.grade_value = grade
        # categorical evidence: endorse the same-named hypothesis, refute other grades
        for label in state.labels:
            label_grade = normalize_grade_label(label)
            if label_grade is None:
                continue
            kind = "supports" if label_grade == grade else "contradicts"
            state.graph.add_edge(node, state.hypothesis_nodes[label], kind, result.confidence)
        return _StepOutcome(result.confidence, payload, "grade")

    def _do_area(self, step, state, t):
        structure = step.inputs["structure"]
        view = step.inputs.get("view")
        phase = step.inputs.get("phase", ED)
        got = state.masks.get((view, phase, structure)) if view else None
        if got is None:
            # first available mask of the structure, in deterministic key order
            candidates = sorted(
                (key for key in state.masks if key[2] == structure and key[1] == phase),
            )
            if not candidates:
                return state.fail(step, t, f"no mask available for {structure} at {phase}")
            got = state.masks[candidates[0]]
        node_mask, mask, _ = got
        label = mask.label_for(structure)
        if label is None:
            return state.fail(step, t, f"structure {structure!r} not in mask label map")
        result = self.registry.invoke(
            step.tool_name, {"mask": mask, "target_label": label}
        )
        value = float(result.outputs["area_mm2"])
        empty = bool(result.outputs["empty_structure"])
        payload = {"area_mm2": value, "structure": structure, "empty_structure": empty,
                   "invocation_id": result.invocation_id}
        node = state.graph.add_evidence(
            payload, result.confidence, t, causes=[(node_mask, "derives")]
        )
        if not empty:
            self._link_criteria(state, node, "area_mm2", value, result.confidence)
        return _StepOutcome(result.confidence, payload, "area")

    def _do_dimension(self, step, state, t):
        structure = step.inputs["structure"]
        view = step.inputs.get("view")
        phase = step.inputs.get("phase", ED)
        got = state.masks.get((view, phase, structure)) if view else None
        if got is None:
            return state.fail(step, t, f"no mask available for {structure} at {phase}")
        node_mask, mask, _ = got
        label = mask.label_for(structure)
        if label is None:
            return state.fail(step, t, f"structure {structure!r} not in mask label map")
        result = self.registry.invoke(
            step.tool_name, {"mask": mask, "target_label": label}
        )
        value = float(result.outputs["dimension_mm"])
        payload = {"dimension_mm": value, "structure": structure,
                   "invocation_id": result.invocation_id}
        node = state.graph.add_evidence(
            payload, result.confidence, t, causes=[(node_mask, "derives")]
        )
        self._link_criteria(state, node, "dimension_mm", value, result.confidence)
        return _StepOutcome(result.confidence, payload, "dimension")

    def _link_criteria(self, state, evidence_node: str, metric: str, value: float,
                       confidence: float) -> None:
        """Compare numeric evidence against the entry's threshold rules and
        wire supports/contradicts edges into the hypothesis concepts."""
        for rule in state.rules:
            if rule.metric != metric:
                continue
            for label in state.labels:
                if not labels_match(rule.label, label):
                    continue
                kind = "supports" if rule.satisfied(value) else "contradicts"
                state.graph.add_edge(
                    evidence_node, state.hypothesis_nodes[label], kind, confidence
                )

    # -- adaptation ---------------------------------------------------------------

    def _adaptive_trigger(self, step: ActionStep, outcome: _StepOutcome,
                          posterior: np.ndarray) -> tuple[bool, list[tuple[str, str, dict]]]:
        """Fixed recipe table; returns (fired, [(goal, tool, inputs), ...])."""
        cfg = self.config
        fired = False
        recipes: list[tuple[str, str, dict]] = []
        if outcome.confidence < cfg.c_min:
            fired = True
            if outcome.op == "segment":
                alternate = ALTERNATE_VIEW.get(step.inputs.get("view", ""))
                if alternate:
                    recipes.append((
                        f"re-measure {step.inputs['structure']} from the alternate view {alternate}",
                        step.tool_name,
                        {"op": "segment", "structure": step.inputs["structure"],
                         "view": alternate, "phase": step.inputs["phase"]},
                    ))
        if outcome.op == "ef" and outcome.anomalous:
            fired = True
            volume_tool, _ = self.registry.find(
                "functional", step.inputs.get("structure"), "volume_ml"
            )
            if volume_tool is not None:
                for phase in (ED, ES):
                    recipes.append((
                        f"re-run {step.inputs['structure']} volume at {phase}",
                        volume_tool.name,
                        {"op": "volume", "structure": step.inputs["structure"],
                         "phase": phase, "n_disks": cfg.n_disks},
                    ))
        if normalized_entropy(posterior) > cfg.e_max:
            fired = True
        return fired, recipes


@dataclass
class _RunState:
    graph: ReasoningGraph
    anchors: dict[str, str]
    rules: list[ThresholdRule]
    hypothesis_nodes: dict[str, str]
    labels: tuple[str, ...]
    study_of_view: dict[str, str] = field(default_factory=dict)
    classify_node: dict[str, str] = field(default_factory=dict)
    masks: dict[tuple, tuple] = field(default_factory=dict)
    volumes: dict[tuple, tuple] = field(default_factory=dict)
    ef_node: dict[str, str] = field(default_factory=dict)
    ef_value: float | None = None
    ef_anomalous: bool = False
    grade_value: str | None = None

    def fail(self, step: ActionStep, t: int, message: str) -> _StepOutcome:
        """Record a failed attempt as zero-confidence evidence."""
        payload = {"failure": message, "goal": step.goal}
        causes = [(anchor, "generates") for anchor in self.anchors.values()]
        self.graph.add_evidence(payload, 0.0, t, causes=causes)
        return _StepOutcome(0.0, payload, step.inputs.get("op", ""), failed=True)
