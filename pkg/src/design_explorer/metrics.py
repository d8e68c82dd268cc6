"""Space-filling metrics for sample sets: spacing, separation and grid coverage."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from .explorer.dataset import SampleLogRow
from .geometry import BoundingBox, bounding_box


@dataclass(frozen=True, slots=True)
class Coverage:
    occupied: int
    total: int

    @property
    def fraction(self) -> float:
        return self.occupied / self.total


@dataclass(frozen=True, slots=True)
class IterationGrowth:
    iteration: int
    added: int
    total: int
    separation: float | None  # mean NN distance to all earlier points


@dataclass
class SampleReport:
    """Summary statistics of a sample log."""

    n: int
    dimension: int
    min_nn_distance: float | None
    mean_nn_distance: float | None
    coverage: Coverage
    bins: int
    growth: list[IterationGrowth] = field(default_factory=list)


def nearest_neighbor_distances(coords: np.ndarray) -> np.ndarray:
    """Distance from each point to its nearest other point (empty for n < 2)."""
    coords = np.asarray(coords, dtype=float)
    if len(coords) < 2:
        return np.empty(0)
    distances, _ = cKDTree(coords).query(coords, k=2)
    return distances[:, 1]


def min_pairwise_distance(coords: np.ndarray) -> float | None:
    distances = nearest_neighbor_distances(coords)
    return float(distances.min()) if distances.size else None


def separation(new: np.ndarray, reference: np.ndarray) -> float | None:
    """Mean distance from each new point to its nearest reference point."""
    new = np.asarray(new, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if len(new) == 0 or len(reference) == 0:
        return None
    distances, _ = cKDTree(reference).query(new)
    return float(np.mean(distances))


def default_bins(dimension: int) -> int:
    """32 bins per axis in 2-D, 8 otherwise."""
    return 32 if dimension == 2 else 8


def grid_cells(coords: np.ndarray, box: BoundingBox, bins: int) -> np.ndarray:
    """Integer cell index of every point on a ``bins``-per-axis grid over ``box``."""
    coords = np.asarray(coords, dtype=float)
    lo = np.asarray(box.min)
    width = np.asarray(box.ranges)
    scaled = np.divide(
        coords - lo, width, out=np.zeros_like(coords), where=width > 0
    )
    return np.clip(np.floor(scaled * bins).astype(np.int64), 0, bins - 1)


def grid_coverage(
    coords: np.ndarray, box: BoundingBox, bins: int | None = None
) -> Coverage:
    """Number of occupied grid cells out of ``bins ** m``."""
    coords = np.asarray(coords, dtype=float)
    dimension = coords.shape[1] if coords.ndim == 2 else box.dimension
    bins = bins or default_bins(dimension)
    total = bins**dimension
    if len(coords) == 0:
        return Coverage(0, total)
    cells = grid_cells(coords, box, bins)
    return Coverage(len(np.unique(cells, axis=0)), total)


def coverage_by_iteration(
    coords: np.ndarray, iterations: Sequence[int], box: BoundingBox, bins: int | None = None
) -> list[tuple[int, int, Coverage]]:
    """Cumulative ``(iteration, n, coverage)`` after each iteration."""
    coords = np.asarray(coords, dtype=float)
    stamps = np.asarray(iterations)
    return [
        (int(t), int((stamps <= t).sum()), grid_coverage(coords[stamps <= t], box, bins))
        for t in np.unique(stamps)
    ]


def build_report(rows: Sequence[SampleLogRow], box: BoundingBox | None = None) -> SampleReport:
    """Compute spacing, coverage and per-iteration growth for a sample log.

    The coverage grid spans ``box`` when given, else the bounding box of the samples.
    """
    coords = np.array([r.coords for r in rows], dtype=float)
    frame = pd.DataFrame({"iteration": [r.iteration for r in rows]})
    dimension = coords.shape[1]
    box = box or bounding_box(coords.tolist())
    bins = default_bins(dimension)

    nn = nearest_neighbor_distances(coords)
    counts = frame.groupby("iteration").size().sort_index()
    stamps = frame["iteration"].to_numpy()
    growth = []
    running = 0
    for iteration, added in counts.items():
        sep = None
        if iteration > 0:
            sep = separation(coords[stamps == iteration], coords[stamps < iteration])
        running += int(added)
        growth.append(IterationGrowth(int(iteration), int(added), running, sep))

    return SampleReport(
        n=len(rows),
        dimension=dimension,
        min_nn_distance=float(nn.min()) if nn.size else None,
        mean_nn_distance=float(nn.mean()) if nn.size else None,
        coverage=grid_coverage(coords, box, bins),
        bins=bins,
        growth=growth,
    )


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6g}"


def format_report(report: SampleReport) -> str:
    lines = [
        f"samples: {report.n}",
        f"dimension: {report.dimension}",
        f"min_nn_distance: {_fmt(report.min_nn_distance)}",
        f"mean_nn_distance: {_fmt(report.mean_nn_distance)}",
        f"grid: {report.bins}^{report.dimension}",
        f"occupied_cells: {report.coverage.occupied}",
        f"coverage: {report.coverage.fraction:.6g}",
        "",
        "iteration,added,total,separation",
    ]
    lines.extend(
        f"{g.iteration},{g.added},{g.total},{_fmt(g.separation)}" for g in report.growth
    )
    return "\n".join(lines)
