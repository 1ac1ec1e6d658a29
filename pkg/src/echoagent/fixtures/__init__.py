from .corpus import CORPUS_DOCS, write_corpus
from .studies import (
    EF_STUDY_SPECS,
    QA_STUDY_SPECS,
    generate_dataset,
    generate_ef_dataset,
    generate_qa_dataset,
)

__all__ = [
    "CORPUS_DOCS",
    "write_corpus",
    "EF_STUDY_SPECS",
    "QA_STUDY_SPECS",
    "generate_dataset",
    "generate_ef_dataset",
    "generate_qa_dataset",
]
