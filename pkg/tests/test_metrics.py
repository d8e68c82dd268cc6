import numpy as np
import pytest

from design_explorer.explorer import SampleLogRow
from design_explorer.geometry import BoundingBox
from design_explorer.metrics import (
    build_report,
    coverage_by_iteration,
    default_bins,
    format_report,
    grid_coverage,
    min_pairwise_distance,
    nearest_neighbor_distances,
    separation,
)

UNIT = BoundingBox((0.0, 0.0), (1.0, 1.0))


def test_nearest_neighbor_distances():
    coords = np.array([(0.0, 0.0), (3.0, 4.0), (0.0, 1.0)])
    assert nearest_neighbor_distances(coords) == pytest.approx([1.0, np.hypot(3, 3), 1.0])
    assert min_pairwise_distance(coords) == 1.0


def test_undefined_for_single_point():
    assert nearest_neighbor_distances(np.array([(0.5, 0.5)])).size == 0
    assert min_pairwise_distance(np.array([(0.5, 0.5)])) is None


def test_separation():
    assert separation(np.array([(0.0, 2.0), (3.0, 0.0)]), np.array([(0.0, 0.0)])) == 2.5
    assert separation(np.empty((0, 2)), np.array([(0.0, 0.0)])) is None


def test_default_bins():
    assert default_bins(2) == 32
    assert default_bins(3) == 8


def test_grid_coverage():
    coverage = grid_coverage(np.array([(0.0, 0.0), (1.0, 1.0), (0.01, 0.01)]), UNIT)
    assert coverage.total == 1024
    assert coverage.occupied == 2
    assert grid_coverage(np.random.default_rng(0).random((50, 3)), BoundingBox((0,) * 3, (1,) * 3)).total == 512


def test_coverage_is_cumulative():
    coords = np.random.default_rng(1).random((300, 2))
    iterations = np.repeat([0, 1, 2], 100)
    steps = coverage_by_iteration(coords, iterations, UNIT)
    assert [t for t, _, _ in steps] == [0, 1, 2]
    assert [n for _, n, _ in steps] == [100, 200, 300]
    occupied = [c.occupied for _, _, c in steps]
    assert occupied == sorted(occupied)


def test_report_single_point():
    report = build_report([SampleLogRow(0, 0, -1, (0.3, 0.7), -1.0)])
    assert report.coverage.occupied == 1
    assert report.min_nn_distance is None
    text = format_report(report)
    assert "min_nn_distance: n/a" in text
    assert "0,1,1,n/a" in text


def test_report_growth():
    rows = [
        SampleLogRow(0, 0, -1, (0.0, 0.0), -1.0),
        SampleLogRow(1, 0, -1, (1.0, 0.0), -1.0),
        SampleLogRow(2, 1, 0, (0.0, 0.5), 1.0),
        SampleLogRow(3, 2, 2, (0.0, 1.5), 1.0),
    ]
    report = build_report(rows, BoundingBox((0.0, 0.0), (2.0, 2.0)))
    assert [(g.iteration, g.added, g.total) for g in report.growth] == [(0, 2, 2), (1, 1, 3), (2, 1, 4)]
    assert report.growth[0].separation is None
    assert report.growth[1].separation == 0.5
    assert report.growth[2].separation == 1.0
    assert report.min_nn_distance == 0.5
