"""Batch-dynamic query maintenance by synchronous relational rounds."""

from .core import (
    BatchChange,
    ChangeScript,
    DenseRelation,
    Query,
    RelationStore,
    RoundMeter,
    apply_change,
    parse_script,
    run_rounds,
)
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "BatchChange",
    "ChangeScript",
    "DenseRelation",
    "Query",
    "RelationStore",
    "RoundMeter",
    "apply_change",
    "parse_script",
    "run_rounds",
]

__version__ = "0.1.0"
