"""Points, boxes, distances and seeded sampling primitives.

All types here are immutable values and all operations are pure, apart from the
state of the ``numpy.random.Generator`` passed in.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    InvalidBoxError,
    InvalidPointError,
    NonPositiveEpsilonError,
)
from .rng import RngStream, as_generator

Coords = tuple[float, ...]


@dataclass(frozen=True, slots=True)
class Point:
    """A coordinate vector in the design space.

    Parameters
    ----------
    coords : tuple[float, ...]
        Non-empty vector of finite coordinates.
    id : int | None, default=None
        Unique non-negative id, assigned when the point enters a dataset.
    """

    coords: Coords
    id: int | None = None

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise InvalidPointError("Point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise InvalidPointError(f"Point coordinates must be finite, got {coords}")
        if self.id is not None and self.id < 0:
            raise InvalidPointError(f"Point id must be non-negative, got {self.id}")
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def with_id(self, point_id: int) -> Point:
        return Point(self.coords, point_id)


def coords_of(point: Point | Sequence[float]) -> Coords:
    """Coordinates of a point or a raw sequence."""
    if isinstance(point, Point):
        return point.coords
    return tuple(float(c) for c in point)


def check_dimension(expected: int, coords: Sequence[float]) -> None:
    if len(coords) != expected:
        raise DimensionMismatchError(expected, len(coords))


@dataclass(frozen=True, slots=True)
class BoundingBox:
    """Axis-aligned box with ``min[i] <= max[i]`` in every dimension."""

    min: Coords
    max: Coords

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min)
        hi = tuple(float(v) for v in self.max)
        if not lo:
            raise InvalidBoxError("BoundingBox needs at least one dimension")
        if len(lo) != len(hi):
            raise DimensionMismatchError(len(lo), len(hi))
        if any(a > b for a, b in zip(lo, hi, strict=True)):
            raise InvalidBoxError(f"BoundingBox min {lo} exceeds max {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def dimension(self) -> int:
        return len(self.min)

    @property
    def ranges(self) -> Coords:
        """Per-dimension extents ``r_i = max_i - min_i``."""
        return tuple(b - a for a, b in zip(self.min, self.max, strict=True))

    def contains(self, coords: Sequence[float]) -> bool:
        return all(
            a <= c <= b for a, c, b in zip(self.min, coords, self.max, strict=True)
        )

    def extend(self, coords: Sequence[float]) -> BoundingBox:
        """Smallest box holding this box and ``coords``."""
        return BoundingBox(
            tuple(map(min, self.min, coords)), tuple(map(max, self.max, coords))
        )

    def union(self, other: BoundingBox) -> BoundingBox:
        return BoundingBox(
            tuple(map(min, self.min, other.min)), tuple(map(max, self.max, other.max))
        )

    def clamp(self, coords: Sequence[float]) -> Coords:
        """Project ``coords`` onto the box componentwise."""
        return tuple(
            min(max(c, a), b) for a, c, b in zip(self.min, coords, self.max, strict=True)
        )

    def to_dict(self) -> dict[str, list[float]]:
        return {"min": list(self.min), "max": list(self.max)}


class ClipMode(Enum):
    """What to do with a candidate that falls outside the domain."""

    CLIP = "clip"
    REJECT = "reject"


@dataclass(frozen=True, slots=True)
class DomainBounds:
    """The legal design space.

    Parameters
    ----------
    box : BoundingBox
        Domain box; every dimension must have positive width.
    clip_mode : ClipMode, default=ClipMode.CLIP
        ``CLIP`` clamps out-of-domain candidates onto the box, ``REJECT`` discards them.
    """

    box: BoundingBox
    clip_mode: ClipMode = ClipMode.CLIP

    def __post_init__(self):
        if any(r <= 0 for r in self.box.ranges):
            raise InvalidBoxError(
                f"Domain bounds need min < max in every dimension, got {self.box}"
            )
        if not isinstance(self.clip_mode, ClipMode):
            object.__setattr__(self, "clip_mode", ClipMode(self.clip_mode))

    @property
    def dimension(self) -> int:
        return self.box.dimension

    def apply(self, coords: Sequence[float]) -> Coords | None:
        """Return admissible coordinates, or None when a rejected candidate is outside."""
        if self.box.contains(coords):
            return tuple(coords)
        if self.clip_mode is ClipMode.CLIP:
            return self.box.clamp(coords)
        return None


def bounding_box(points: Iterable[Point | Sequence[float]]) -> BoundingBox:
    """Tight componentwise min/max box of a non-empty point set.

    Raises
    ------
    EmptyInputError
        If ``points`` is empty.
    DimensionMismatchError
        If the points do not share one dimension.
    """
    iterator = iter(points)
    try:
        first = coords_of(next(iterator))
    except StopIteration:
        raise EmptyInputError("bounding_box needs at least one point") from None
    lo = list(first)
    hi = list(first)
    for point in iterator:
        coords = coords_of(point)
        check_dimension(len(first), coords)
        for i, c in enumerate(coords):
            if c < lo[i]:
                lo[i] = c
            elif c > hi[i]:
                hi[i] = c
    return BoundingBox(tuple(lo), tuple(hi))


def lp_distance(
    a: Point | Sequence[float], b: Point | Sequence[float], p: float = 2.0
) -> float:
    """Minkowski distance of order ``p`` (``math.inf`` for the max norm)."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    xa, xb = coords_of(a), coords_of(b)
    check_dimension(len(xa), xb)
    diffs = [abs(x - y) for x, y in zip(xa, xb, strict=True)]
    if p == 1:
        return math.fsum(diffs)
    if p == 2:
        return math.dist(xa, xb)
    if math.isinf(p):
        return max(diffs)
    return math.fsum(d**p for d in diffs) ** (1.0 / p)


def sample_in_hyperball(
    center: Point | Sequence[float],
    epsilon: float,
    rng: RngStream | np.random.Generator,
) -> Point:
    """Draw one point uniformly from the L2 ball of radius ``epsilon``.

    The direction is a normalised Gaussian vector and the radius is
    ``epsilon * U ** (1 / m)``, which is uniform over the ball volume.
    """
    if not epsilon > 0:
        raise NonPositiveEpsilonError(f"epsilon must be positive, got {epsilon}")
    origin = np.asarray(coords_of(center), dtype=float)
    m = origin.size
    gen = as_generator(rng)
    while True:
        direction = gen.standard_normal(m)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            continue
        radius = epsilon * gen.random() ** (1.0 / m)
        candidate = tuple((origin + direction * (radius / norm)).tolist())
        # rounding near the surface can leave the ball by an ulp
        if math.dist(candidate, origin.tolist()) <= epsilon:
            return Point(candidate)


def sample_uniform_box(
    box: BoundingBox, rng: RngStream | np.random.Generator
) -> Point:
    """Draw one point with i.i.d. uniform coordinates inside ``box``."""
    gen = as_generator(rng)
    coords = gen.uniform(np.asarray(box.min), np.asarray(box.max))
    return Point(tuple(coords.tolist()))
