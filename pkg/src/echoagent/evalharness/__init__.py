from .dataset import EfTruth, QaTruth, StudyRecord, load_dataset
from .metrics import auroc, gmean, overall_accuracy, ovr_accuracy
from .benchmark import (
    BenchmarkReport,
    RecordResult,
    fixture_digest,
    run_benchmark,
    write_report,
)

__all__ = [
    "EfTruth",
    "QaTruth",
    "StudyRecord",
    "load_dataset",
    "auroc",
    "gmean",
    "overall_accuracy",
    "ovr_accuracy",
    "BenchmarkReport",
    "RecordResult",
    "fixture_digest",
    "run_benchmark",
    "write_report",
]
