"""Corpus ingestion: documents in, anatomy-tagged knowledge primitives out.

Chunking policy: split at blank-line paragraph boundaries, then greedily
merge adjacent paragraphs while the merged text stays within
``max_chunk_chars``. A single paragraph longer than the limit is split at
sentence boundaries (hard character split only as a last resort), so the
length invariant holds unconditionally.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import anatomy
from ..errors import IngestError

_PARAGRAPH_RE = re.compile(r"\n\s*\n")
_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")


@dataclass(frozen=True)
class SourceSpan:
    doc: str
    start: int
    end: int


@dataclass
class KnowledgePrimitive:
    id: str
    text: str
    source: SourceSpan
    anatomy_tags: frozenset[str] = frozenset()
    embedding: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"primitive {self.id} has empty text")
        bad = sorted(t for t in self.anatomy_tags if not anatomy.is_valid_group(t))
        if bad:
            raise ValueError(f"primitive {self.id} carries unknown anatomy tags: {bad}")


def _paragraph_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    cursor = 0
    for match in _PARAGRAPH_RE.finditer(text):
        spans.append((cursor, match.start()))
        cursor = match.end()
    spans.append((cursor, len(text)))
    return [(s, e) for s, e in spans if text[s:e].strip()]


def _split_oversize(text: str, start: int, limit: int) -> list[tuple[int, int]]:
    """Spans of an over-long paragraph, each at most ``limit`` chars."""
    pieces: list[tuple[int, int]] = []
    cursor = 0
    for sentence in _SENTENCE_RE.split(text):
        begin = text.index(sentence, cursor)
        end = begin + len(sentence)
        cursor = end
        while len(sentence) > limit:  # pathological single sentence
            pieces.append((start + begin, start + begin + limit))
            begin += limit
            sentence = text[begin:end]
        if sentence:
            pieces.append((start + begin, start + end))
    # greedy re-merge of sentence pieces up to the limit
    merged: list[tuple[int, int]] = []
    for s, e in pieces:
        if merged and (e - merged[-1][0]) <= limit:
            merged[-1] = (merged[-1][0], e)
        else:
            merged.append((s, e))
    return merged


def ingest_document(
    doc_text: str,
    source_id: str,
    explicit_tags: frozenset[str] | set[str] | None = None,
    max_chunk_chars: int = 800,
) -> list[KnowledgePrimitive]:
    """Decompose one document into unembedded primitives.

    Empty input yields an empty list. Ids are ``source_id#ordinal`` and are
    stable for a given document and chunking config.
    """
    if not doc_text.strip():
        return []
    explicit = frozenset(explicit_tags or ())
    for tag in sorted(explicit):
        if not anatomy.is_valid_group(tag):
            raise IngestError(f"{source_id}: unknown explicit anatomy tag {tag!r}")

    chunks: list[tuple[int, int]] = []
    for start, end in _paragraph_spans(doc_text):
        para_len = len(doc_text[start:end])
        if para_len > max_chunk_chars:
            chunks.extend(_split_oversize(doc_text[start:end], start, max_chunk_chars))
            continue
        if chunks:
            prev_start, prev_end = chunks[-1]
            if (end - prev_start) <= max_chunk_chars:
                chunks[-1] = (prev_start, end)
                continue
        chunks.append((start, end))

    primitives = []
    for ordinal, (start, end) in enumerate(chunks):
        text = doc_text[start:end].strip()
        primitives.append(
            KnowledgePrimitive(
                id=f"{source_id}#{ordinal}",
                text=text,
                source=SourceSpan(doc=source_id, start=start, end=end),
                anatomy_tags=anatomy.match_text(text) | explicit,
            )
        )
    return primitives


def load_corpus(
    corpus_dir: str | Path, max_chunk_chars: int = 800
) -> list[KnowledgePrimitive]:
    """Ingest every .txt/.md file under a directory, in sorted name order.

    A sidecar ``<name>.tags`` file (anatomy names, one per line) supplies
    explicit tags for its document. Undecodable bytes fail loudly with the
    offending file and byte offset.
    """
    root = Path(corpus_dir)
    if not root.is_dir():
        raise IngestError(f"corpus directory not found: {root}")
    primitives: list[KnowledgePrimitive] = []
    for path in sorted(root.iterdir()):
        if path.suffix.lower() not in (".txt", ".md"):
            continue
        raw = path.read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(
                f"{path.name}: undecodable byte at offset {exc.start}"
            ) from exc
        explicit: set[str] = set()
        sidecar = path.with_suffix(".tags")
        if sidecar.exists():
            for line in sidecar.read_text(encoding="utf-8").splitlines():
                name = line.strip()
                if not name:
                    continue
                if not anatomy.is_valid_group(name):
                    raise IngestError(f"{sidecar.name}: unknown anatomy tag {name!r}")
                explicit.add(name)
        primitives.extend(
            ingest_document(text, path.stem, explicit, max_chunk_chars)
        )
    return primitives
