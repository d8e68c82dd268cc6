"""Shared fixtures."""

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from design_explorer.config.schema import ExplorerConfig
from design_explorer.geometry import Point

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def points_strategy(dimension: int, min_size: int = 1, max_size: int = 40):
    """Lists of coordinate tuples; small integer grids make duplicates likely."""
    coord = st.one_of(finite, st.integers(-3, 3).map(float))
    return st.lists(
        st.tuples(*[coord] * dimension), min_size=min_size, max_size=max_size
    )


@pytest.fixture
def small_config() -> ExplorerConfig:
    """Fast 2-D loop configuration."""
    return ExplorerConfig(
        epsilon=0.1,
        batch_size=10,
        warmup_size=30,
        num_trees=8,
        max_iterations=3,
        seed=7,
    )


@pytest.fixture
def gaussian_cluster():
    """200 points from a unit 2-D Gaussian plus one point at 10 sigma (id 200)."""

    def make(seed: int, n: int = 200) -> list[Point]:
        gen = np.random.default_rng(seed)
        points = [Point(tuple(xy), i) for i, xy in enumerate(gen.standard_normal((n, 2)).tolist())]
        points.append(Point((10.0, 0.0), n))
        return points

    return make


@pytest.fixture
def write_config(tmp_path: Path):
    """Write a JSON config file and return its path."""

    def write(data: dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data, indent=2), encoding="utf-8")
        return path

    return write
