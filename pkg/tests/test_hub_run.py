import json
import shutil

import pytest

from oracles import brute_force_topk

from echoagent.config import EngineConfig
from echoagent.errors import ResolutionError
from echoagent.hub.engine import DiagnosticQuery, ReasoningHub
from echoagent.hub.graph import CAUSAL_KINDS
from echoagent.kb.index import KnowledgeBase

EF_QUESTION = "Is the ejection fraction normal?"


def study_refs(dataset, study_id):
    root = dataset / "studies" / study_id
    return tuple(str(p) for p in sorted(root.iterdir()) if (p / "study.json").exists())


def run_study(kb, registry, dataset, study_id, trace_path=None, config=None):
    hub = ReasoningHub(kb, registry, config or EngineConfig())
    query = DiagnosticQuery(EF_QUESTION, study_refs=study_refs(dataset, study_id))
    return hub.run(query, trace_path=trace_path)


def test_resolution_self_retrieval(kb, registry):
    primitive = kb.primitives["lv-grading#0"]
    hub = ReasoningHub(kb, registry)
    query = DiagnosticQuery(primitive.text, study_refs=("x",))
    anatomy_name, entry, similarity = hub.resolve_repository(query)
    assert anatomy_name == "left ventricle"
    assert similarity == pytest.approx(1.0, abs=1e-9)
    assert entry.anatomy == "left ventricle"


def test_ef_question_resolves_to_left_ventricle_by_brute_force(kb, registry):
    hub = ReasoningHub(kb, registry)
    anatomy_name, _, _ = hub.resolve_repository(
        DiagnosticQuery(EF_QUESTION, study_refs=("x",))
    )
    # independent oracle: full cosine scan, winner's tags must include the pick
    items = [(pid, kb.primitives[pid].embedding) for pid in kb.index.all_ids]
    query_vec = kb.encoder.embed(EF_QUESTION)
    [(winner_id, _)] = brute_force_topk(items, query_vec, 1)
    assert anatomy_name in kb.primitives[winner_id].anatomy_tags
    assert anatomy_name == "left ventricle"


def test_empty_knowledge_base_is_unresolvable(registry):
    hub = ReasoningHub(KnowledgeBase(embedding_dim=16), registry)
    with pytest.raises(ResolutionError):
        hub.resolve_repository(DiagnosticQuery("anything", study_refs=("x",)))


def test_gibberish_query_reports_three_nearest_anatomies(kb, registry):
    hub = ReasoningHub(kb, registry, EngineConfig(s_min=0.99))
    with pytest.raises(ResolutionError) as err:
        hub.resolve_repository(DiagnosticQuery("zqxj wvut plomb", study_refs=("x",)))
    assert len(err.value.nearest) == 3


def test_clean_fixture_run_concludes_confidently(kb, registry, ef_dataset, tmp_path):
    record = json.loads(
        (ef_dataset / "studies" / "study-11" / "record.json").read_text()
    )
    conclusion = run_study(kb, registry, ef_dataset, "study-11", tmp_path / "t.jsonl")
    assert conclusion.answer == "ConsiderablyReduced"
    assert conclusion.answer == record["truth"]["grade"]
    assert max(conclusion.posterior.values()) >= 0.9
    assert conclusion.subgoal_steps == 0
    assert not conclusion.low_consistency
    assert conclusion.ef_percent == pytest.approx(record["truth"]["ef_percent"])
    assert conclusion.executed_steps <= EngineConfig().d_max


def test_missing_view_fixture_forces_subgoals_and_terminates(kb, registry, ef_dataset, tmp_path):
    broken_root = tmp_path / "broken"
    shutil.copytree(ef_dataset / "studies" / "study-11", broken_root / "studies" / "study-11")
    shutil.rmtree(broken_root / "studies" / "study-11" / "a4c" / "masks")
    conclusion = run_study(kb, registry, broken_root, "study-11", tmp_path / "b.jsonl")
    assert conclusion.subgoal_steps >= 1
    assert conclusion.executed_steps <= EngineConfig().d_max
    kinds = [r["event_kind"] for r in conclusion.trace_records]
    assert "subgoal_step" in kinds
    assert conclusion.low_consistency


def test_subgoal_step_ids_are_monotone_and_follow_their_parents(kb, registry, ef_dataset, tmp_path):
    broken_root = tmp_path / "broken"
    shutil.copytree(ef_dataset / "studies" / "study-10", broken_root / "studies" / "study-10")
    shutil.rmtree(broken_root / "studies" / "study-10" / "a2c" / "masks")
    conclusion = run_study(kb, registry, broken_root, "study-10", tmp_path / "m.jsonl")
    step_records = [
        r for r in conclusion.trace_records if r["event_kind"] in ("step", "subgoal_step")
    ]
    executed_order = [r["step_id"] for r in step_records]
    executed_at = {step_id: i for i, step_id in enumerate(executed_order)}
    planned_max = max(
        r["step_id"] for r in step_records if r["event_kind"] == "step"
    )
    for record in step_records:
        if record["event_kind"] == "subgoal_step":
            assert record["step_id"] > planned_max  # fresh monotone ids
    assert len(set(executed_order)) == len(executed_order)


def test_every_step_hits_the_hard_cap_when_all_segmentations_are_noisy(
    kb, registry, ef_dataset, tmp_path
):
    noisy_root = tmp_path / "allnoisy"
    shutil.copytree(ef_dataset / "studies" / "study-02", noisy_root / "studies" / "study-02")
    for view in ("a2c", "a4c"):
        sidecar_path = noisy_root / "studies" / "study-02" / view / "study.json"
        sidecar = json.loads(sidecar_path.read_text())
        sidecar["segmentation_confidence"] = 0.2
        sidecar_path.write_text(json.dumps(sidecar))
    config = EngineConfig()
    conclusion = run_study(kb, registry, noisy_root, "study-02", tmp_path / "h.jsonl",
                           config=config)
    # endless re-measurement chain is cut by the executed-step cap
    assert conclusion.executed_steps == config.d_max


def test_evidence_payloads_carry_invocation_provenance(kb, registry, ef_dataset, tmp_path):
    conclusion = run_study(kb, registry, ef_dataset, "study-06", tmp_path / "i.jsonl")
    evidence_payloads = [
        node.payload for node in conclusion.graph.nodes.values()
        if node.kind == "evidence"
    ]
    assert evidence_payloads
    for payload in evidence_payloads:
        assert "invocation_id" in payload or "failure" in payload


def test_restoring_the_fixture_removes_all_subgoals(kb, registry, ef_dataset, tmp_path):
    conclusion = run_study(kb, registry, ef_dataset, "study-11", tmp_path / "c.jsonl")
    kinds = [r["event_kind"] for r in conclusion.trace_records]
    assert "subgoal_step" not in kinds


def test_low_confidence_segmentation_requests_alternate_view(kb, registry, ef_dataset, tmp_path):
    noisy_root = tmp_path / "noisy"
    shutil.copytree(ef_dataset / "studies" / "study-01", noisy_root / "studies" / "study-01")
    sidecar_path = noisy_root / "studies" / "study-01" / "a2c" / "study.json"
    sidecar = json.loads(sidecar_path.read_text())
    sidecar["segmentation_confidence"] = 0.3
    sidecar_path.write_text(json.dumps(sidecar))
    conclusion = run_study(kb, registry, noisy_root, "study-01", tmp_path / "n.jsonl")
    assert conclusion.subgoal_steps >= 1
    subgoal_records = [
        r for r in conclusion.trace_records if r["event_kind"] == "subgoal_step"
    ]
    assert all(r["tool"] == "echo.segmenter" for r in subgoal_records)


def test_dmax_zero_concludes_immediately_from_the_prior(kb, registry, ef_dataset, tmp_path):
    conclusion = run_study(
        kb, registry, ef_dataset, "study-01", tmp_path / "z.jsonl",
        config=EngineConfig(d_max=0),
    )
    assert conclusion.executed_steps == 0
    assert conclusion.low_consistency
    assert conclusion.answer == "Normal"  # first hypothesis on a flat prior
    assert all(
        p == pytest.approx(1 / 3) for p in conclusion.posterior.values()
    )


def test_trace_replay_is_byte_identical(kb, ef_dataset, tmp_path):
    from echoagent.hub.toolkit import build_default_registry

    paths = []
    for i in range(2):
        path = tmp_path / f"run{i}.jsonl"
        run_study(kb, build_default_registry(), ef_dataset, "study-07", path)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_posterior_snapshots_normalized_at_every_step(kb, registry, ef_dataset, tmp_path):
    conclusion = run_study(kb, registry, ef_dataset, "study-03", tmp_path / "p.jsonl")
    for record in conclusion.trace_records:
        posterior = record["posterior"]
        assert abs(sum(posterior) - 1.0) <= 1e-9
        assert all(p >= 0 for p in posterior)


def test_graph_causality_holds_after_the_run(kb, registry, ef_dataset, tmp_path):
    conclusion = run_study(kb, registry, ef_dataset, "study-05", tmp_path / "g.jsonl")
    graph = conclusion.graph
    assert graph.checks_run > 0
    anchored = {n for n, node in graph.nodes.items() if node.kind == "raw_anchor"}
    changed = True
    while changed:
        changed = False
        for edge in graph.edges:
            if edge.kind in CAUSAL_KINDS and edge.src in anchored and edge.dst not in anchored:
                anchored.add(edge.dst)
                changed = True
    for node_id, node in graph.nodes.items():
        if node.kind == "evidence":
            assert node_id in anchored


def test_evidence_chain_has_two_derive_hops_from_mask_to_ef(kb, registry, ef_dataset, tmp_path):
    conclusion = run_study(kb, registry, ef_dataset, "study-02", tmp_path / "d.jsonl")
    graph = conclusion.graph
    ef_nodes = [
        n for n, node in graph.nodes.items()
        if node.kind == "evidence" and isinstance(node.payload, dict)
        and "ef_percent" in node.payload
    ]
    assert len(ef_nodes) == 1
    volume_parents = graph.causal_parents(ef_nodes[0])
    assert len(volume_parents) == 2
    for parent in volume_parents:
        mask_parents = graph.causal_parents(parent)
        assert any(
            "mask" in str(graph.nodes[gp].payload) for gp in mask_parents
        )


def test_anomalous_ef_triggers_volume_reruns(kb, registry, tmp_path, ef_dataset):
    # swap ED and ES masks so ESV > EDV and the computed EF is negative
    swapped_root = tmp_path / "swapped"
    shutil.copytree(ef_dataset / "studies" / "study-09", swapped_root / "studies" / "study-09")
    for view in ("a2c", "a4c"):
        masks = swapped_root / "studies" / "study-09" / view / "masks"
        ed, es = masks / "ed.pgm", masks / "es.pgm"
        tmp = masks / "tmp.pgm"
        ed.rename(tmp)
        es.rename(ed)
        tmp.rename(es)
    conclusion = run_study(kb, registry, swapped_root, "study-09", tmp_path / "a.jsonl")
    rerun_volumes = [
        r for r in conclusion.trace_records
        if r["event_kind"] == "subgoal_step" and r["tool"] == "quant.biplane_volume"
    ]
    assert len(rerun_volumes) == 2
    assert conclusion.executed_steps <= EngineConfig().d_max


def test_multiple_choice_answers_come_from_the_options(kb, registry, qa_dataset, tmp_path):
    for study_id, expected in (
        ("qa-01", "normal pericardium"),
        ("qa-02", "pericardial thickening"),
        ("qa-03", "normal left atrium"),
        ("qa-04", "left atrial enlargement"),
    ):
        record = json.loads(
            (qa_dataset / "studies" / study_id / "record.json").read_text()
        )
        hub = ReasoningHub(kb, registry)
        query = DiagnosticQuery(
            record["question"],
            study_refs=study_refs(qa_dataset, study_id),
            options=tuple(record["options"]),
        )
        conclusion = hub.run(query, trace_path=tmp_path / f"{study_id}.jsonl")
        assert conclusion.answer == expected
        assert conclusion.answer in record["options"]
        assert max(conclusion.posterior.values()) >= 0.9
