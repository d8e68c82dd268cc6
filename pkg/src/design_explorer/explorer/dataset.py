"""The explored dataset D."""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import UnknownPointIdError
from ..geometry import Coords, Point, check_dimension

# points appended since the last index rebuild are scanned linearly
_REINDEX_THRESHOLD = 64


@dataclass(frozen=True, slots=True)
class SampleLogRow:
    """One admitted point as written to the sample log.

    ``parent_id`` and ``score_at_selection`` are -1 for warm-up points.
    """

    id: int
    iteration: int
    parent_id: int
    coords: Coords
    score_at_selection: float


class Dataset:
    """Ordered points with dense ids and iteration stamps.

    Ids run ``0..n-1`` in admission order. Collision checks use a KD-tree over the
    stored coordinates; admission itself does not check, so callers test
    :meth:`collides` first.

    Parameters
    ----------
    dimension : int
        Dimension of every point.
    collision_tolerance : float, default=0.0
        Minimum L2 distance between two admitted points.
    """

    def __init__(self, dimension: int, collision_tolerance: float = 0.0):
        self.dimension = dimension
        self.collision_tolerance = collision_tolerance
        self.points: list[Point] = []
        self.iteration_of: dict[int, int] = {}
        self.parent_of: dict[int, int] = {}
        self.score_of: dict[int, float] = {}
        self._index: cKDTree | None = None
        self._indexed = 0

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def point(self, point_id: int) -> Point:
        if not 0 <= point_id < len(self.points):
            raise UnknownPointIdError(point_id)
        return self.points[point_id]

    @property
    def next_id(self) -> int:
        return len(self.points)

    @property
    def last_iteration(self) -> int:
        return max(self.iteration_of.values(), default=0)

    def coords(self) -> np.ndarray:
        """``(n, m)`` array of all coordinates."""
        if not self.points:
            return np.empty((0, self.dimension))
        return np.array([p.coords for p in self.points], dtype=float)

    def add(
        self,
        coords: Sequence[float],
        iteration: int,
        parent_id: int = -1,
        score: float = -1.0,
    ) -> Point:
        """Append a point under the next id and return it."""
        check_dimension(self.dimension, coords)
        point = Point(tuple(coords), self.next_id)
        self.points.append(point)
        self.iteration_of[point.id] = iteration
        self.parent_of[point.id] = parent_id
        self.score_of[point.id] = score
        return point

    def nearest_distance(self, coords: Sequence[float]) -> float:
        """L2 distance from ``coords`` to the closest stored point (inf if empty)."""
        if len(self.points) - self._indexed > _REINDEX_THRESHOLD:
            self._reindex()
        best = math.inf
        if self._index is not None:
            best, _ = self._index.query(coords)
        for point in self.points[self._indexed :]:
            best = min(best, math.dist(coords, point.coords))
        return float(best)

    def collides(
        self, coords: Sequence[float], pending: Sequence[Sequence[float]] = ()
    ) -> bool:
        """True if ``coords`` is closer than the tolerance to a stored or pending point."""
        tolerance = self.collision_tolerance
        if tolerance <= 0:
            return False
        if any(math.dist(coords, other) < tolerance for other in pending):
            return True
        return self.nearest_distance(coords) < tolerance

    def points_of_iteration(self, iteration: int) -> list[Point]:
        return [p for p in self.points if self.iteration_of[p.id] == iteration]

    def rows(self) -> list[SampleLogRow]:
        return [
            SampleLogRow(
                id=p.id,
                iteration=self.iteration_of[p.id],
                parent_id=self.parent_of[p.id],
                coords=p.coords,
                score_at_selection=self.score_of[p.id],
            )
            for p in self.points
        ]

    def _reindex(self) -> None:
        self._index = cKDTree(self.coords())
        self._indexed = len(self.points)
