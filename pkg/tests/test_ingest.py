import pytest

from echoagent.errors import IngestError
from echoagent.kb.chunking import ingest_document, load_corpus


def test_empty_document_yields_no_primitives():
    assert ingest_document("", "doc") == []
    assert ingest_document("   \n\n  ", "doc") == []


def test_three_short_nonmergeable_paragraphs_yield_three_chunks():
    # each paragraph is ~47 chars; any pairwise merge exceeds the 80-char cap
    paragraphs = [
        "Alpha bravo charlie delta echo foxtrot golfers.",
        "Hotel india juliet kilo lima mike november oscar.",
        "Papa quebec romeo sierra tango uniform victor what.",
    ]
    doc = "\n\n".join(paragraphs)
    primitives = ingest_document(doc, "source", max_chunk_chars=80)
    assert [p.id for p in primitives] == ["source#0", "source#1", "source#2"]
    assert [p.text for p in primitives] == paragraphs


def test_adjacent_paragraphs_merge_up_to_the_cap():
    doc = "one two.\n\nthree four.\n\nfive six."
    merged = ingest_document(doc, "s", max_chunk_chars=800)
    assert len(merged) == 1
    assert merged[0].text == doc


def test_chunk_length_invariant_holds_for_oversize_paragraphs():
    sentence = "This sentence is about forty characters. "
    doc = sentence * 40  # one huge paragraph
    primitives = ingest_document(doc, "big", max_chunk_chars=200)
    assert len(primitives) > 1
    for p in primitives:
        assert 0 < len(p.text) <= 200


def test_keyword_auto_tagging():
    [p] = ingest_document("left ventricular ejection fraction is low.", "doc")
    assert "left ventricle" in p.anatomy_tags


def test_explicit_tags_union_with_keyword_tags():
    [p] = ingest_document(
        "left ventricular function.", "doc", explicit_tags={"pericardium"}
    )
    assert p.anatomy_tags >= {"left ventricle", "pericardium"}


def test_unknown_explicit_tag_rejected():
    with pytest.raises(IngestError):
        ingest_document("text here.", "doc", explicit_tags={"gallbladder"})


def test_source_span_offsets_recover_the_chunk():
    doc = "first paragraph here.\n\nsecond paragraph follows."
    primitives = ingest_document(doc, "doc", max_chunk_chars=30)
    for p in primitives:
        assert doc[p.source.start : p.source.end].strip() == p.text


def test_corpus_loader_reads_sidecar_tags(tmp_path):
    (tmp_path / "notes.txt").write_text("general text with no keywords.\n")
    (tmp_path / "notes.tags").write_text("pericardium\n")
    [p] = load_corpus(tmp_path)
    assert p.anatomy_tags == {"pericardium"}


def test_corpus_loader_names_undecodable_byte_offset(tmp_path):
    (tmp_path / "bad.txt").write_bytes(b"fine until \xff\xfe here")
    with pytest.raises(IngestError, match="offset 11"):
        load_corpus(tmp_path)


def test_corpus_loader_requires_directory(tmp_path):
    with pytest.raises(IngestError):
        load_corpus(tmp_path / "missing")
