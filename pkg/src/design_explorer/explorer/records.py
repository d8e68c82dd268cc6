"""Per-iteration records and the sinks that receive them."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from ..geometry import Coords
from ..trees.forest import ForestStats


@dataclass(frozen=True, slots=True)
class NewPoint:
    id: int
    coords: Coords
    parent_id: int


@dataclass
class IterationRecord:
    """What one exploration step did.

    Attributes
    ----------
    iteration : int
        1-based iteration index (0 is the warm-up).
    peripheral_ids : list[int]
        The peripheral set P in rank order.
    new_points : list[NewPoint]
        Admitted points with their parent peripheral id.
    dropped : int
        Peripheral points whose candidate was dropped after exhausting retries.
    forest_stats : ForestStats
        Forest size and mean model complexity after the refresh.
    elapsed : float
        Wall time of the step in seconds.
    evaluations : dict[int, float]
        Values returned by the evaluation callback, if any.
    """

    iteration: int
    peripheral_ids: list[int]
    new_points: list[NewPoint]
    dropped: int
    forest_stats: ForestStats
    elapsed: float
    evaluations: dict[int, float] = field(default_factory=dict)

    @property
    def admitted(self) -> int:
        return len(self.new_points)

    def to_dict(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "peripheral_ids": list(self.peripheral_ids),
            "new_points": [
                {"id": p.id, "coords": list(p.coords), "parent_id": p.parent_id}
                for p in self.new_points
            ],
            "admitted": self.admitted,
            "dropped": self.dropped,
            "forest_stats": {
                "num_trees": self.forest_stats.num_trees,
                "mean_complexity": self.forest_stats.mean_complexity,
            },
            "elapsed_seconds": self.elapsed,
            "evaluations": {str(k): v for k, v in self.evaluations.items()},
        }


class RecordSink(ABC):
    """Receiver of iteration records."""

    @abstractmethod
    def emit(self, record: IterationRecord) -> None:
        """Handle one record."""
        pass

    def close(self) -> None:  # noqa: B027
        """Release resources (default no-op)."""
        pass


class MemorySink(RecordSink):
    """In-memory record sink."""

    def __init__(self):
        self.records: list[IterationRecord] = []

    def emit(self, record: IterationRecord) -> None:
        self.records.append(record)


class CallbackSink(RecordSink):
    """Forward each record to a callable."""

    def __init__(self, callback: Callable[[IterationRecord], None]):
        self.callback = callback

    def emit(self, record: IterationRecord) -> None:
        self.callback(record)
