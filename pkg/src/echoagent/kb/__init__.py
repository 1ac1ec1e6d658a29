from .chunking import KnowledgePrimitive, SourceSpan, ingest_document, load_corpus
from .encoder import HashedBowEncoder, HttpEncoder
from .index import KnowledgeBase, RetrievalHit, RetrievalResult
from .summarize import (
    NO_GUIDANCE,
    SECTION_NAMES,
    RepositoryEntry,
    build_repository_entry,
    build_all_entries,
)

__all__ = [
    "KnowledgePrimitive",
    "SourceSpan",
    "ingest_document",
    "load_corpus",
    "HashedBowEncoder",
    "HttpEncoder",
    "KnowledgeBase",
    "RetrievalHit",
    "RetrievalResult",
    "NO_GUIDANCE",
    "SECTION_NAMES",
    "RepositoryEntry",
    "build_repository_entry",
    "build_all_entries",
]
