"""The exploration loop: warm-up, peripheral selection, expansion, refresh."""

from __future__ import annotations

import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from typing import NamedTuple

from ..config.schema import ExplorerConfig, StoppingRule
from ..errors import CollisionExhaustedError, EmptyInputError, KTooLargeError
from ..geometry import Point, sample_in_hyperball, sample_uniform_box
from ..rng import RngStream
from ..trees.forest import Forest, ScoredPoint
from ..utils.logger import get_logger
from .dataset import Dataset
from .records import IterationRecord, NewPoint, RecordSink

logger = get_logger(__name__)

# top-level stream ids under the run seed
WARMUP_STREAM = 0
FOREST_STREAM = 1
EXPAND_STREAM = 2

Evaluator = Callable[[Point], float]


class Candidate(NamedTuple):
    """A new point proposed by :func:`expand`."""

    point: Point
    parent_id: int
    parent_score: float


@dataclass
class ExplorationState:
    """Dataset, forest and the index of the last completed iteration."""

    dataset: Dataset
    forest: Forest
    iteration: int = 0
    warmup_rejections: int = 0

    def __iter__(self) -> Iterator[Dataset | Forest]:
        yield self.dataset
        yield self.forest


def train_forest(dataset: Dataset, config: ExplorerConfig) -> Forest:
    return Forest.train(
        dataset,
        num_trees=config.num_trees,
        subsample_size=config.subsample_size,
        rng=RngStream(config.seed, FOREST_STREAM),
    )


def warm_up(config: ExplorerConfig) -> ExplorationState:
    """Draw the warm-up batch uniformly and train the first forest.

    Each point is redrawn while it collides with an earlier one, at most
    ``config.max_retries`` times.

    Raises
    ------
    CollisionExhaustedError
        If a point cannot be placed within the retry budget.
    """
    dataset = Dataset(config.dimension, config.collision_tolerance)
    gen = RngStream(config.seed, WARMUP_STREAM).generator()
    region = config.warmup_region
    rejections = 0
    for _ in range(config.warmup_size):
        for _attempt in range(config.max_retries + 1):
            point = sample_uniform_box(region, gen)
            if not dataset.collides(point.coords):
                dataset.add(point.coords, iteration=0)
                break
            rejections += 1
        else:
            raise CollisionExhaustedError(
                f"Could not place warm-up point {len(dataset)} after "
                f"{config.max_retries} retries; the warm-up region is too small "
                f"for collision_tolerance={config.collision_tolerance}"
            )

    forest = train_forest(dataset, config)
    logger.info(
        "warm_up_complete", points=len(dataset), rejections=rejections, trees=forest.num_trees
    )
    return ExplorationState(dataset, forest, 0, rejections)


def select_peripheral(forest: Forest, dataset: Dataset, k: int) -> list[ScoredPoint]:
    """Top ``k`` dataset points by periphery rank: the set P.

    Raises
    ------
    KTooLargeError
        If ``k`` exceeds the dataset size.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > len(dataset):
        raise KTooLargeError(f"Requested {k} peripheral points from {len(dataset)}")
    return forest.score(dataset.points)[:k]


def expand(
    peripheral: list[ScoredPoint],
    dataset: Dataset,
    config: ExplorerConfig,
    rng: RngStream,
) -> list[Candidate]:
    """Draw one admissible candidate from the ε-ball around each peripheral point.

    Candidates outside the domain are clamped or redrawn according to the clip
    mode. Candidates closer than the collision tolerance to the dataset or to an
    earlier candidate of this batch are redrawn; after ``config.max_retries``
    redraws the peripheral point is skipped. Each ball draws from its own
    sub-stream keyed by the peripheral id.
    """
    if not peripheral:
        raise EmptyInputError("expand needs at least one peripheral point")
    accepted: list[Candidate] = []
    pending: list[tuple[float, ...]] = []
    for scored in peripheral:
        center = dataset.point(scored.point_id).coords
        gen = rng.substream(scored.point_id).generator()
        for _attempt in range(config.max_retries + 1):
            drawn = sample_in_hyperball(center, config.epsilon, gen)
            coords = config.bounds.apply(drawn.coords)
            if coords is None or dataset.collides(coords, pending):
                continue
            pending.append(coords)
            accepted.append(Candidate(Point(coords), scored.point_id, scored.score))
            break
    return accepted


def step(
    state: ExplorationState,
    config: ExplorerConfig,
    evaluate: Evaluator | None = None,
    max_new: int | None = None,
) -> tuple[ExplorationState, IterationRecord]:
    """Run one iteration in place and return the state with its record.

    Selects ``min(batch_size, n, max_new)`` peripheral points, expands them, admits
    the candidates under the next iteration stamp and refreshes the forest per
    ``config.update_mode``.
    """
    started = time.perf_counter()
    dataset, forest = state.dataset, state.forest
    iteration = state.iteration + 1

    k = min(config.batch_size, len(dataset))
    if max_new is not None:
        k = min(k, max_new)
    peripheral = select_peripheral(forest, dataset, k)
    candidates = expand(
        peripheral, dataset, config, RngStream(config.seed, EXPAND_STREAM).substream(iteration)
    )

    admitted = [
        dataset.add(c.point.coords, iteration, c.parent_id, c.parent_score)
        for c in candidates
    ]
    evaluations = {}
    if evaluate is not None:
        for point in admitted:
            evaluations[point.id] = float(evaluate(point))
    forest.update(admitted, config.update_mode)

    state.iteration = iteration
    record = IterationRecord(
        iteration=iteration,
        peripheral_ids=[s.point_id for s in peripheral],
        new_points=[
            NewPoint(p.id, p.coords, c.parent_id)
            for p, c in zip(admitted, candidates, strict=True)
        ],
        dropped=len(peripheral) - len(admitted),
        forest_stats=forest.stats(),
        elapsed=time.perf_counter() - started,
        evaluations=evaluations,
    )
    logger.info(
        "iteration_complete",
        iteration=iteration,
        admitted=record.admitted,
        dropped=record.dropped,
        points=len(dataset),
        elapsed=round(record.elapsed, 4),
    )
    return state, record


def run(
    config: ExplorerConfig,
    stop: StoppingRule | None = None,
    sink: RecordSink | None = None,
    evaluate: Evaluator | None = None,
) -> tuple[Dataset, list[IterationRecord]]:
    """Warm up, then step until ``max_iterations`` or a stopping rule fires.

    Parameters
    ----------
    config : ExplorerConfig
        Loop hyper-parameters.
    stop : StoppingRule | None, default=None
        Point and wall-clock budgets; defaults to ``config.stop``.
    sink : RecordSink | None, default=None
        Receives every record as soon as its iteration completes.
    evaluate : Callable[[Point], float] | None, default=None
        Called on every admitted point; results are recorded, never used for
        selection.
    """
    stop = stop or config.stop
    started = time.perf_counter()
    state = warm_up(config)
    records: list[IterationRecord] = []

    for _ in range(config.max_iterations):
        remaining = None
        if stop.max_points is not None:
            remaining = stop.max_points - len(state.dataset)
            if remaining <= 0:
                logger.info("stop_point_budget", points=len(state.dataset))
                break
        if stop.max_seconds is not None and time.perf_counter() - started >= stop.max_seconds:
            logger.info("stop_wall_clock", seconds=stop.max_seconds)
            break
        state, record = step(state, config, evaluate, max_new=remaining)
        records.append(record)
        if sink is not None:
            sink.emit(record)

    return state.dataset, records
