"""Anatomy-indexed knowledge base: exact cosine retrieval and persistence.

Corpora are desk-scale, so retrieval is an exact scan over unit-norm
embeddings (dot product == cosine). Ranking ties break by ascending
primitive id, making every ranking and every saved index byte-reproducible.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import anatomy
from ..errors import IndexLoadError
from .chunking import KnowledgePrimitive, SourceSpan
from .encoder import HashedBowEncoder
from .summarize import NO_GUIDANCE, SECTION_NAMES, RepositoryEntry

INDEX_FORMAT_VERSION = 1
NORM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RetrievalHit:
    primitive_id: str
    similarity: float


@dataclass
class RetrievalResult:
    hits: list[RetrievalHit]
    no_knowledge: bool = False

    def ids(self) -> list[str]:
        return [h.primitive_id for h in self.hits]


@dataclass
class AnatomyIndex:
    """Per-group sorted id lists plus the global sorted id list."""

    by_group: dict[str, list[str]] = field(default_factory=dict)
    all_ids: list[str] = field(default_factory=list)

    @classmethod
    def from_primitives(cls, primitives: dict[str, KnowledgePrimitive]) -> "AnatomyIndex":
        by_group: dict[str, list[str]] = {name: [] for name in anatomy.ANATOMY_NAMES}
        all_ids = sorted(primitives)
        for pid in all_ids:
            for tag in primitives[pid].anatomy_tags:
                by_group[tag].append(pid)
        for ids in by_group.values():
            ids.sort()
        return cls(by_group=by_group, all_ids=all_ids)

    def check_membership(self, primitives: dict[str, KnowledgePrimitive]) -> None:
        """Membership biconditional: id in group list iff group in its tags."""
        for name in anatomy.ANATOMY_NAMES:
            listed = set(self.by_group.get(name, ()))
            tagged = {pid for pid, p in primitives.items() if name in p.anatomy_tags}
            if listed != tagged:
                offending = sorted(listed.symmetric_difference(tagged))[0]
                raise IndexLoadError(
                    f"index membership violated for group {name!r} at primitive {offending!r}"
                )


class KnowledgeBase:
    """Immutable-after-build store of embedded primitives and entries."""

    def __init__(self, encoder=None, embedding_dim: int | None = None):
        self.encoder = encoder if encoder is not None else HashedBowEncoder(256)
        self.embedding_dim = embedding_dim or self.encoder.dim
        self.primitives: dict[str, KnowledgePrimitive] = {}
        self.entries: dict[str, RepositoryEntry] = {}
        self.index = AnatomyIndex()
        self._matrix = np.zeros((0, self.embedding_dim), dtype=np.float64)
        self._row_of: dict[str, int] = {}

    # -- construction ------------------------------------------------------

    def add_primitives(self, primitives: list[KnowledgePrimitive]) -> None:
        for p in primitives:
            if p.id in self.primitives:
                raise IndexLoadError(f"duplicate primitive id {p.id!r}")
            if p.embedding is None:
                p.embedding = self.encoder.embed(p.text)
            self._check_norm(p)
            self.primitives[p.id] = p
        self._rebuild_index()

    def _check_norm(self, p: KnowledgePrimitive) -> None:
        norm = float(np.linalg.norm(p.embedding))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise IndexLoadError(
                f"primitive {p.id!r} embedding norm {norm:.6g} not unit"
            )
        if p.embedding.shape != (self.embedding_dim,):
            raise IndexLoadError(
                f"primitive {p.id!r} embedding dim {p.embedding.shape} != {self.embedding_dim}"
            )

    def _rebuild_index(self) -> None:
        self.index = AnatomyIndex.from_primitives(self.primitives)
        self.index.check_membership(self.primitives)
        ids = self.index.all_ids
        self._row_of = {pid: i for i, pid in enumerate(ids)}
        if ids:
            self._matrix = np.vstack([self.primitives[pid].embedding for pid in ids])
        else:
            self._matrix = np.zeros((0, self.embedding_dim), dtype=np.float64)

    def __len__(self) -> int:
        return len(self.primitives)

    # -- retrieval ---------------------------------------------------------

    def retrieve_topk(
        self, query_text: str, anatomy_name: str | None = None, k: int = 8
    ) -> RetrievalResult:
        return self.retrieve_topk_vector(self.encoder.embed(query_text), anatomy_name, k)

    def retrieve_topk_vector(
        self, query_vec: np.ndarray, anatomy_name: str | None = None, k: int = 8
    ) -> RetrievalResult:
        if k < 1:
            raise ValueError("k must be a positive integer")
        if anatomy_name is not None:
            anatomy.group_by_name(anatomy_name)  # raises on unknown group
            candidate_ids = self.index.by_group.get(anatomy_name, [])
            if not candidate_ids:
                return RetrievalResult(hits=[], no_knowledge=True)
        else:
            candidate_ids = self.index.all_ids
        if not candidate_ids:
            return RetrievalResult(hits=[], no_knowledge=anatomy_name is not None)
        sims = self._matrix @ np.asarray(query_vec, dtype=np.float64)
        ranked = sorted(
            candidate_ids, key=lambda pid: (-sims[self._row_of[pid]], pid)
        )[: min(k, len(candidate_ids))]
        return RetrievalResult(
            hits=[RetrievalHit(pid, float(sims[self._row_of[pid]])) for pid in ranked]
        )

    def all_similarities(self, query_vec: np.ndarray) -> dict[str, float]:
        sims = self._matrix @ np.asarray(query_vec, dtype=np.float64)
        return {pid: float(sims[row]) for pid, row in self._row_of.items()}

    # -- persistence -------------------------------------------------------

    def to_document(self) -> dict:
        primitives = []
        for pid in self.index.all_ids:
            p = self.primitives[pid]
            primitives.append(
                {
                    "id": p.id,
                    "text": p.text,
                    "source": {"doc": p.source.doc, "start": p.source.start, "end": p.source.end},
                    "tags": sorted(p.anatomy_tags),
                    "embedding": [float(x) for x in p.embedding],
                }
            )
        entries = [self.entries[name].to_json() for name in sorted(self.entries)]
        doc = {
            "version": INDEX_FORMAT_VERSION,
            "d_e": self.embedding_dim,
            "encoder_id": self.encoder.encoder_id if self.encoder else "unknown",
            "primitives": primitives,
            "entries": entries,
        }
        doc["checksum"] = _checksum(doc)
        return doc

    def save(self, path: str | Path) -> None:
        doc = self.to_document()
        Path(path).write_text(
            json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path, encoder=None) -> "KnowledgeBase":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IndexLoadError(f"cannot read knowledge index {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise IndexLoadError("knowledge index must be a JSON object")
        version = doc.get("version")
        if version != INDEX_FORMAT_VERSION:
            raise IndexLoadError(
                f"index version mismatch: file has {version!r}, expected {INDEX_FORMAT_VERSION}"
            )
        stored_checksum = doc.get("checksum")
        if stored_checksum != _checksum({k: v for k, v in doc.items() if k != "checksum"}):
            raise IndexLoadError("index checksum mismatch: file corrupted or edited")

        dim = int(doc["d_e"])
        if encoder is None:
            if doc.get("encoder_id") == f"hashed-bow-{dim}":
                encoder = HashedBowEncoder(dim)
        kb = cls(encoder=encoder, embedding_dim=dim)
        loaded: list[KnowledgePrimitive] = []
        for raw in doc.get("primitives", []):
            src = raw.get("source", {})
            try:
                p = KnowledgePrimitive(
                    id=raw["id"],
                    text=raw["text"],
                    source=SourceSpan(src.get("doc", ""), int(src.get("start", 0)), int(src.get("end", 0))),
                    anatomy_tags=frozenset(raw.get("tags", [])),
                    embedding=np.asarray(raw["embedding"], dtype=np.float64),
                )
            except (KeyError, ValueError) as exc:
                raise IndexLoadError(f"invalid primitive record {raw.get('id')!r}: {exc}") from exc
            loaded.append(p)
        kb.add_primitives(loaded)

        for raw in doc.get("entries", []):
            entry = RepositoryEntry.from_json(raw)
            for pid in entry.supporting_primitive_ids:
                if pid not in kb.primitives:
                    raise IndexLoadError(
                        f"entry {entry.anatomy!r} references missing primitive {pid!r}"
                    )
            kb.entries[entry.anatomy] = entry
        return kb


def _checksum(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def empty_entry(anatomy_name: str, k: int) -> RepositoryEntry:
    return RepositoryEntry(
        anatomy=anatomy_name,
        sections={name: [NO_GUIDANCE] for name in SECTION_NAMES},
        supporting_primitive_ids=[],
        created_from_k=k,
    )
