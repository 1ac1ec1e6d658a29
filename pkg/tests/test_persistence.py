import json

import numpy as np
import pytest

from echoagent.errors import IndexLoadError
from echoagent.kb.index import KnowledgeBase, _checksum


def _reseal(doc: dict) -> dict:
    doc = dict(doc)
    doc.pop("checksum", None)
    doc["checksum"] = _checksum(doc)
    return doc


@pytest.fixture()
def saved_kb(kb, tmp_path):
    path = tmp_path / "kb.json"
    kb.save(path)
    return path


def test_save_load_roundtrip_is_lossless(kb, saved_kb):
    loaded = KnowledgeBase.load(saved_kb)
    assert set(loaded.primitives) == set(kb.primitives)
    for pid, primitive in kb.primitives.items():
        clone = loaded.primitives[pid]
        assert clone.text == primitive.text
        assert clone.anatomy_tags == primitive.anatomy_tags
        assert np.array_equal(clone.embedding, primitive.embedding)
    assert loaded.entries == kb.entries
    assert loaded.index.by_group == kb.index.by_group


def test_roundtrip_of_the_file_bytes(saved_kb, tmp_path):
    loaded = KnowledgeBase.load(saved_kb)
    again = tmp_path / "again.json"
    loaded.save(again)
    assert again.read_bytes() == saved_kb.read_bytes()


def test_bad_embedding_norm_rejected_naming_the_id(saved_kb):
    doc = json.loads(saved_kb.read_text())
    doc["primitives"][0]["embedding"] = [0.5] + [0.0] * (doc["d_e"] - 1)
    offender = doc["primitives"][0]["id"]
    saved_kb.write_text(json.dumps(_reseal(doc)))
    with pytest.raises(IndexLoadError, match=offender):
        KnowledgeBase.load(saved_kb)


def test_dangling_supporting_id_rejected(saved_kb):
    doc = json.loads(saved_kb.read_text())
    doc["entries"][0]["supporting_primitive_ids"] = ["ghost#99"]
    saved_kb.write_text(json.dumps(_reseal(doc)))
    with pytest.raises(IndexLoadError, match="ghost#99"):
        KnowledgeBase.load(saved_kb)


def test_checksum_tamper_rejected(saved_kb):
    doc = json.loads(saved_kb.read_text())
    doc["primitives"][0]["text"] = "tampered text"
    # deliberately do NOT recompute the checksum
    saved_kb.write_text(json.dumps(doc))
    with pytest.raises(IndexLoadError, match="checksum"):
        KnowledgeBase.load(saved_kb)


def test_version_mismatch_rejected(saved_kb):
    doc = json.loads(saved_kb.read_text())
    doc["version"] = 999
    saved_kb.write_text(json.dumps(_reseal(doc)))
    with pytest.raises(IndexLoadError, match="version"):
        KnowledgeBase.load(saved_kb)


def test_duplicate_primitive_id_rejected(saved_kb):
    doc = json.loads(saved_kb.read_text())
    doc["primitives"].append(dict(doc["primitives"][0]))
    saved_kb.write_text(json.dumps(_reseal(doc)))
    with pytest.raises(IndexLoadError, match="duplicate"):
        KnowledgeBase.load(saved_kb)
