"""Robust random cut forest: the trained model of the explored space."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from ..errors import DuplicateIdError, EmptyInputError
from ..geometry import Point, check_dimension
from ..rng import RngStream
from ..utils.logger import get_logger
from .rrct import RRCTree

logger = get_logger(__name__)

DEFAULT_NUM_TREES = 50

# per-tree sub-stream keys below (generation, tree_index)
_SUBSAMPLE_KEY = 0
_RESERVOIR_KEY = 2


class UpdateMode(Enum):
    """How a forest absorbs new points."""

    STREAMING = "streaming"
    RETRAIN = "retrain"


@dataclass(frozen=True, slots=True)
class ScoredPoint:
    """A candidate with its mean displacement and its periphery rank.

    Attributes
    ----------
    point_id : int
        Candidate id (its list position when the candidate carries no id).
    score : float
        Mean displacement across trees.
    rank : int
        0 for the most peripheral candidate of the scoring pass.
    depth : float
        Mean depth of the leaf holding the candidate once it is in the tree;
        ranks ascend with it.
    """

    point_id: int
    score: float
    rank: int
    depth: float


@dataclass(frozen=True, slots=True)
class ForestStats:
    num_trees: int
    mean_complexity: float


class Forest:
    """Ensemble of robust random cut trees.

    Use :meth:`train` to build one. Every tree draws from its own sub-stream of
    ``base_rng``, so results do not depend on the order in which trees are built or
    queried.

    Parameters
    ----------
    trees : list[RRCTree]
        Member trees, all of the same dimension.
    base_rng : RngStream
        Root stream; tree ``i`` of generation ``g`` owns ``base_rng.substream(g, i)``.
    points : dict[int, Point]
        Every point the forest has been trained on or updated with.
    subsample_size : int | None, default=None
        Per-tree sample size; None means every tree holds every point.
    generation : int, default=0
        Number of full retrains so far.
    """

    def __init__(
        self,
        trees: list[RRCTree],
        base_rng: RngStream,
        points: dict[int, Point],
        subsample_size: int | None = None,
        generation: int = 0,
    ):
        if not trees:
            raise ValueError("A forest needs at least one tree")
        self.trees = trees
        self.base_rng = base_rng
        self.subsample_size = subsample_size
        self.generation = generation
        self._points = points
        self._reservoirs = [
            base_rng.substream(generation, i, _RESERVOIR_KEY).generator()
            for i in range(len(trees))
        ]

    @classmethod
    def train(
        cls,
        dataset: Any,
        num_trees: int = DEFAULT_NUM_TREES,
        subsample_size: int | None = None,
        rng: RngStream | None = None,
        generation: int = 0,
    ) -> Forest:
        """Train a forest on a dataset.

        Parameters
        ----------
        dataset : Dataset | Sequence[Point]
            Points with ids (anything exposing ``.points`` is unwrapped).
        num_trees : int, default=50
            Number of trees.
        subsample_size : int | None, default=None
            If set, each tree holds an independent uniform sample without
            replacement of ``min(subsample_size, n)`` points.
        rng : RngStream | None, default=None
            Root stream; defaults to ``RngStream(0)``.

        Raises
        ------
        EmptyInputError
            If the dataset holds no points.
        """
        points = _with_ids(getattr(dataset, "points", dataset))
        if not points:
            raise EmptyInputError("Cannot train a forest on an empty dataset")
        if num_trees < 1:
            raise ValueError(f"num_trees must be positive, got {num_trees}")
        if subsample_size is not None and subsample_size < 1:
            raise ValueError(f"subsample_size must be positive, got {subsample_size}")
        rng = rng or RngStream(0)
        dimension = points[0].dimension
        for point in points:
            check_dimension(dimension, point.coords)

        registry: dict[int, Point] = {}
        for point in points:
            if point.id in registry:
                raise DuplicateIdError(f"Point id {point.id} appears twice")
            registry[point.id] = point

        trees = []
        for i in range(num_trees):
            members = points
            if subsample_size is not None and subsample_size < len(points):
                chooser = rng.substream(generation, i, _SUBSAMPLE_KEY).generator()
                picked = chooser.choice(len(points), size=subsample_size, replace=False)
                members = [points[k] for k in picked]
            trees.append(RRCTree.build(members, rng.substream(generation, i)))

        logger.info(
            "forest_trained",
            num_trees=num_trees,
            points=len(points),
            subsample_size=subsample_size,
            generation=generation,
        )
        return cls(trees, rng, registry, subsample_size, generation)

    # ------------------------------------------------------------- accessors

    @property
    def num_trees(self) -> int:
        return len(self.trees)

    @property
    def dimension(self) -> int:
        return self.trees[0].dimension

    @property
    def num_points(self) -> int:
        return len(self._points)

    def stats(self) -> ForestStats:
        complexities = [tree.model_complexity() for tree in self.trees]
        return ForestStats(self.num_trees, float(np.mean(complexities)))

    # --------------------------------------------------------------- scoring

    def score(self, candidates: Sequence[Point]) -> list[ScoredPoint]:
        """Score candidates by mean displacement and rank them by periphery.

        Ranks follow the mean depth of the leaf that holds the candidate once it is
        in a tree: peripheral points are isolated close to the root. For a stored
        point that is its leaf depth, which is also its displacement. A new point
        is placed by a simulated insertion; it lands at depth ``D + 1`` and
        displaces ``S + D + 1``, so far points get small depths and large scores.
        Ties go to the smaller id. With subsampled trees the means run over the
        trees holding the candidate, or over all trees when none does.
        """
        for candidate in candidates:
            check_dimension(self.dimension, candidate.coords)
        depth_maps = [tree.leaf_depths() for tree in self.trees]

        ranked: list[tuple[float, int, float]] = []
        for position, candidate in enumerate(candidates):
            pid = candidate.id
            held = [
                depths[pid]
                for tree, depths in zip(self.trees, depth_maps, strict=True)
                if pid is not None
                and pid in depths
                and tree.leaves[pid].point == candidate.coords
            ]
            if held:
                depth = value = float(np.mean(held))
            else:
                placements = [tree.placement(candidate) for tree in self.trees]
                value = float(np.mean([p.displacement for p in placements]))
                depth = float(np.mean([p.depth for p in placements]))
            ranked.append((depth, position if pid is None else pid, value))

        ranked.sort()
        return [
            ScoredPoint(point_id=pid, score=value, rank=rank, depth=depth)
            for rank, (depth, pid, value) in enumerate(ranked)
        ]

    def mean_tree_distance(self, ids: Sequence[int]) -> np.ndarray:
        """Tree distance matrix for ``ids`` averaged over all trees."""
        total = np.zeros((len(ids), len(ids)), dtype=float)
        for tree in self.trees:
            total += tree.tree_distance_matrix(ids)
        return total / self.num_trees

    # ---------------------------------------------------------------- update

    def update(
        self,
        new_points: Iterable[Point | tuple[int, Point]],
        mode: UpdateMode = UpdateMode.STREAMING,
    ) -> Forest:
        """Absorb new points in place and return the forest.

        ``STREAMING`` inserts each point into every tree; subsampled trees at
        capacity keep a uniform reservoir sample of everything seen.
        ``RETRAIN`` rebuilds all trees on the union, as :meth:`train` would, under
        the next generation of sub-streams.

        Raises
        ------
        DimensionMismatchError
            If a point has the wrong dimension.
        DuplicateIdError
            If an id is already known to the forest or repeats in the batch.
        """
        batch = _with_ids(
            [
                item[1].with_id(item[0]) if isinstance(item, tuple) else item
                for item in new_points
            ],
            start=len(self._points),
        )
        if not batch:
            return self
        seen_ids: set[int] = set()
        for point in batch:
            check_dimension(self.dimension, point.coords)
            if point.id in self._points or point.id in seen_ids:
                raise DuplicateIdError(f"Point id {point.id} is already in the forest")
            seen_ids.add(point.id)

        if mode is UpdateMode.RETRAIN:
            for point in batch:
                self._points[point.id] = point
            retrained = Forest.train(
                list(self._points.values()),
                self.num_trees,
                self.subsample_size,
                self.base_rng,
                generation=self.generation + 1,
            )
            self.trees = retrained.trees
            self.generation = retrained.generation
            self._reservoirs = retrained._reservoirs
            return self

        for point in batch:
            self._points[point.id] = point
            seen = len(self._points)
            for tree, reservoir in zip(self.trees, self._reservoirs, strict=True):
                if self.subsample_size is None or len(tree) < self.subsample_size:
                    tree.insert(point.coords, point.id)
                    continue
                slot = int(reservoir.integers(seen))
                if slot < self.subsample_size:
                    residents = sorted(tree.ids)
                    tree.delete(residents[int(reservoir.integers(len(residents)))])
                    tree.insert(point.coords, point.id)
        logger.debug("forest_updated", added=len(batch), points=len(self._points))
        return self

    # --------------------------------------------------------- serialization

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_trees": self.num_trees,
            "dimension": self.dimension,
            "seed": self.base_rng.seed,
            "stream_id": self.base_rng.stream_id,
            "subsample_size": self.subsample_size,
            "generation": self.generation,
            "trees": [tree.to_dict() for tree in self.trees],
        }

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode(
            "utf-8"
        )


def _with_ids(points: Iterable[Point], start: int = 0) -> list[Point]:
    """Give id-less points ids counting up from ``start`` by list position."""
    return [
        point if point.id is not None else point.with_id(start + position)
        for position, point in enumerate(points)
    ]


def train(
    dataset: Any,
    num_trees: int = DEFAULT_NUM_TREES,
    subsample_size: int | None = None,
    rng: RngStream | None = None,
) -> Forest:
    """Functional alias of :meth:`Forest.train`."""
    return Forest.train(dataset, num_trees, subsample_size, rng)


def score(forest: Forest, candidates: Sequence[Point]) -> list[ScoredPoint]:
    return forest.score(candidates)


def update(
    forest: Forest,
    new_points: Iterable[Point | tuple[int, Point]],
    mode: UpdateMode = UpdateMode.STREAMING,
) -> Forest:
    return forest.update(new_points, mode)
