"""Iterative exploration of the design space."""

from .dataset import Dataset, SampleLogRow
from .loop import (
    EXPAND_STREAM,
    FOREST_STREAM,
    WARMUP_STREAM,
    Candidate,
    ExplorationState,
    expand,
    run,
    select_peripheral,
    step,
    train_forest,
    warm_up,
)
from .records import CallbackSink, IterationRecord, MemorySink, NewPoint, RecordSink

__all__ = [
    "EXPAND_STREAM",
    "FOREST_STREAM",
    "WARMUP_STREAM",
    "CallbackSink",
    "Candidate",
    "Dataset",
    "ExplorationState",
    "IterationRecord",
    "MemorySink",
    "NewPoint",
    "RecordSink",
    "SampleLogRow",
    "expand",
    "run",
    "select_peripheral",
    "step",
    "train_forest",
    "warm_up",
]
