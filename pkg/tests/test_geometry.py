import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import finite, points_strategy
from design_explorer.errors import (
    DimensionMismatchError,
    EmptyInputError,
    InvalidBoxError,
    InvalidPointError,
    NonPositiveEpsilonError,
)
from design_explorer.geometry import (
    BoundingBox,
    ClipMode,
    DomainBounds,
    Point,
    bounding_box,
    lp_distance,
    sample_in_hyperball,
    sample_uniform_box,
)
from design_explorer.rng import RngStream, coordinate_key


class TestPoint:
    def test_coords_are_floats(self):
        assert Point([1, 2]).coords == (1.0, 2.0)

    @pytest.mark.parametrize("coords", [(), (1.0, math.nan), (math.inf,)])
    def test_invalid_coords(self, coords):
        with pytest.raises(InvalidPointError):
            Point(coords)

    def test_negative_id(self):
        with pytest.raises(InvalidPointError):
            Point((0.0,), -1)


class TestBoundingBox:
    def test_min_above_max(self):
        with pytest.raises(InvalidBoxError):
            BoundingBox((0.0, 1.0), (1.0, 0.5))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            BoundingBox((0.0,), (1.0, 1.0))

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            bounding_box([])

    def test_single_point_is_degenerate(self):
        box = bounding_box([Point((2.0, 3.0))])
        assert box.min == box.max == (2.0, 3.0)
        assert box.ranges == (0.0, 0.0)

    def test_mixed_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            bounding_box([(0.0, 0.0), (1.0,)])

    @given(points_strategy(3))
    def test_box_is_tight(self, points):
        box = bounding_box(points)
        assert all(box.contains(p) for p in points)
        for i in range(3):
            assert box.min[i] == min(p[i] for p in points)
            assert box.max[i] == max(p[i] for p in points)

    def test_extend_and_clamp(self):
        box = BoundingBox((0.0, 0.0), (1.0, 1.0))
        assert box.extend((2.0, -1.0)) == BoundingBox((0.0, -1.0), (2.0, 1.0))
        assert box.clamp((1.5, 0.25)) == (1.0, 0.25)


class TestDomainBounds:
    def test_needs_positive_width(self):
        with pytest.raises(InvalidBoxError):
            DomainBounds(BoundingBox((0.0, 0.0), (0.0, 1.0)))

    def test_clip_and_reject(self):
        box = BoundingBox((0.0, 0.0), (1.0, 1.0))
        assert DomainBounds(box, ClipMode.CLIP).apply((1.2, 0.5)) == (1.0, 0.5)
        assert DomainBounds(box, ClipMode.REJECT).apply((1.2, 0.5)) is None
        assert DomainBounds(box, ClipMode.REJECT).apply((0.2, 0.5)) == (0.2, 0.5)


class TestLpDistance:
    def test_norms(self):
        a, b = Point((0.0, 0.0)), Point((3.0, 4.0))
        assert lp_distance(a, b) == 5.0
        assert lp_distance(a, b, p=1) == 7.0
        assert lp_distance(a, b, p=math.inf) == 4.0
        assert lp_distance(a, b, p=3) == pytest.approx((27 + 64) ** (1 / 3))

    def test_p_below_one(self):
        with pytest.raises(ValueError):
            lp_distance((0.0,), (1.0,), p=0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            lp_distance((0.0,), (1.0, 2.0))

    @given(st.tuples(finite, finite), st.tuples(finite, finite))
    def test_symmetric(self, a, b):
        assert lp_distance(a, b) == lp_distance(b, a)

    @pytest.mark.parametrize("p", [1, 2, math.inf])
    @settings(max_examples=200)
    @given(
        a=st.tuples(finite, finite, finite),
        b=st.tuples(finite, finite, finite),
        c=st.tuples(finite, finite, finite),
    )
    def test_triangle_inequality(self, p, a, b, c):
        d_ab, d_bc = lp_distance(a, b, p=p), lp_distance(b, c, p=p)
        assert lp_distance(a, c, p=p) <= d_ab + d_bc + 1e-9 * (1 + d_ab + d_bc)

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [1, 2, math.inf])
    def test_triangle_inequality_fuzz(self, p):
        gen = np.random.default_rng(10)
        for a, b, c in gen.uniform(-1e3, 1e3, size=(10_000, 3, 4)).tolist():
            d_ab, d_bc = lp_distance(a, b, p=p), lp_distance(b, c, p=p)
            assert lp_distance(a, c, p=p) <= d_ab + d_bc + 1e-9 * (1 + d_ab + d_bc)


class TestSampling:
    @given(
        st.tuples(finite, finite, finite),
        st.floats(min_value=1e-6, max_value=100.0),
        st.integers(0, 2**32),
    )
    def test_hyperball_stays_inside(self, center, epsilon, seed):
        point = sample_in_hyperball(center, epsilon, RngStream(seed))
        assert math.dist(point.coords, center) <= epsilon

    @pytest.mark.parametrize("epsilon", [0.0, -1.0])
    def test_hyperball_needs_positive_radius(self, epsilon):
        with pytest.raises(NonPositiveEpsilonError):
            sample_in_hyperball((0.0, 0.0), epsilon, RngStream(0))

    def test_same_stream_same_draw(self):
        stream = RngStream(42, 3, (1, 2))
        assert sample_in_hyperball((0.0, 0.0), 1.0, stream) == sample_in_hyperball(
            (0.0, 0.0), 1.0, stream
        )

    @pytest.mark.parametrize("dimension", [1, 2])
    def test_hyperball_radius_distribution(self, dimension):
        # (r / eps) ** m is uniform on [0, 1] for a uniform ball
        gen = RngStream(11).generator()
        center = (0.5,) * dimension
        radii = np.array(
            [
                math.dist(sample_in_hyperball(center, 2.0, gen).coords, center) / 2.0
                for _ in range(4000)
            ]
        )
        assert stats.kstest(radii**dimension, "uniform").pvalue > 1e-3

    def test_hyperball_direction_is_symmetric(self):
        gen = RngStream(5).generator()
        draws = np.array([sample_in_hyperball((0.0, 0.0), 1.0, gen).coords for _ in range(4000)])
        assert abs(draws.mean(axis=0)).max() < 0.05

    def test_uniform_box(self):
        box = BoundingBox((-1.0, 2.0), (1.0, 6.0))
        gen = RngStream(3).generator()
        draws = np.array([sample_uniform_box(box, gen).coords for _ in range(10_000)])
        assert all(box.contains(d) for d in draws)
        # standard error of the mean is width / sqrt(12 n)
        assert draws[:, 0].mean() == pytest.approx(0.0, abs=5 * 2 / math.sqrt(12e4))
        assert draws[:, 1].mean() == pytest.approx(4.0, abs=5 * 4 / math.sqrt(12e4))
        assert stats.kstest(draws[:, 1], "uniform", args=(2.0, 4.0)).pvalue > 1e-3


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(9, 1, (4,)).generator().random(5)
        b = RngStream(9, 1, (4,)).generator().random(5)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        base = RngStream(9)
        draws = {
            tuple(s.generator().random(3))
            for s in (base, base.with_stream(1), base.substream(0), base.substream(1))
        }
        assert len(draws) == 4

    def test_seed_range(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(2**64)

    def test_coordinate_key(self):
        key = coordinate_key((0.1, 0.2))
        assert key == coordinate_key([0.1, 0.2])
        assert 0 <= key < 2**63
        assert key != coordinate_key((0.2, 0.1))


@settings(max_examples=50)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=20))
def test_point_with_id_keeps_coords(coords):
    for i, c in enumerate(coords):
        assert Point(c).with_id(i) == Point(c, i)
