"""Robust random cut tree.

A binary tree of axis-aligned random cuts over a point set. At every split the cut
dimension is drawn with probability proportional to the range of the points in that
dimension and the cut value is uniform over that range. Points with ``x[d] <= cut``
go left. Exact duplicates share one leaf and are counted by its multiplicity.

The tree supports streaming insertion and deletion, and exposes the two quantities
the explorer reads from it: displacement (change of model complexity caused by one
more point) and tree distance (leaf count of the lowest common ancestor).
"""

from __future__ import annotations

import json
from collections.abc import Iterator, Sequence
from typing import Any, NamedTuple, NewType

import numpy as np

from ..errors import (
    DuplicateIdError,
    EmptyInputError,
    SamePointError,
    UnknownPointIdError,
)
from ..geometry import BoundingBox, Coords, Point, check_dimension, coords_of
from ..rng import RngStream, as_generator, coordinate_key
from ..utils.logger import get_logger

logger = get_logger(__name__)

ModelComplexity = NewType("ModelComplexity", int)

# sub-stream of a tree's stream reserved for displacement queries
QUERY_STREAM = 1


class Placement(NamedTuple):
    """Where a candidate would sit if it were inserted.

    ``depth`` is the depth of the leaf holding the candidate afterwards and
    ``displacement`` the resulting increase of model complexity.
    """

    displacement: int
    depth: int


class Leaf:
    """Leaf holding one distinct point and the ids stored at it."""

    __slots__ = ("point", "ids", "parent")

    def __init__(self, point: Coords, ids: list[int], parent: Branch | None = None):
        self.point = point
        self.ids = ids
        self.parent = parent

    @property
    def multiplicity(self) -> int:
        return len(self.ids)

    @property
    def count(self) -> int:
        return len(self.ids)

    @property
    def lo(self) -> Coords:
        return self.point

    @property
    def hi(self) -> Coords:
        return self.point

    def __repr__(self) -> str:
        return f"Leaf(ids={self.ids}, point={self.point})"


class Branch:
    """Internal cut node; ``box`` is the tight box of the leaves below it."""

    __slots__ = ("cut_dimension", "cut_value", "box", "count", "left", "right", "parent")

    def __init__(
        self,
        cut_dimension: int,
        cut_value: float,
        box: BoundingBox,
        count: int,
        parent: Branch | None = None,
    ):
        self.cut_dimension = cut_dimension
        self.cut_value = cut_value
        self.box = box
        self.count = count
        self.left: Node | None = None
        self.right: Node | None = None
        self.parent = parent

    @property
    def lo(self) -> Coords:
        return self.box.min

    @property
    def hi(self) -> Coords:
        return self.box.max

    def __repr__(self) -> str:
        return (
            f"Branch(dim={self.cut_dimension}, cut={self.cut_value}, count={self.count})"
        )


Node = Leaf | Branch


def draw_cut(
    lo: Sequence[float], hi: Sequence[float], gen: np.random.Generator
) -> tuple[int, float]:
    """Draw a cut over the box ``[lo, hi]`` from a single uniform variate.

    The dimension is chosen with probability ``r_i / sum(r)`` and the value is
    uniform in ``[lo[d], hi[d])``. The box must have positive total range.
    """
    ranges = [b - a for a, b in zip(lo, hi, strict=True)]
    target = gen.random() * sum(ranges)
    acc = 0.0
    for dim, span in enumerate(ranges):
        if span > 0 and target < acc + span:
            return dim, lo[dim] + (target - acc)
        acc += span
    # rounding put target past the last boundary
    dim = max(i for i, span in enumerate(ranges) if span > 0)
    return dim, lo[dim]


class RRCTree:
    """One robust random cut tree over points identified by integer ids.

    Parameters
    ----------
    dimension : int
        Dimension ``m`` of every stored point.
    rng : RngStream
        Stream owned by this tree. Insertions without an explicit stream draw from
        a generator seeded by it; displacement queries use sub-streams of it.

    Attributes
    ----------
    root : Leaf | Branch | None
        Root node, or None for an empty tree.
    leaves : dict[int, Leaf]
        Index from point id to the leaf storing it.
    """

    def __init__(self, dimension: int, rng: RngStream):
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.rng = rng
        self.root: Node | None = None
        self.leaves: dict[int, Leaf] = {}
        self._by_coords: dict[Coords, Leaf] = {}
        self._gen = rng.generator()

    # ------------------------------------------------------------------ build

    @classmethod
    def build(
        cls,
        points: Sequence[Point | Sequence[float]],
        rng: RngStream,
        ids: Sequence[int] | None = None,
    ) -> RRCTree:
        """Build a tree over ``points`` by recursive random cuts.

        Parameters
        ----------
        points : Sequence[Point | Sequence[float]]
            Non-empty point list; duplicates collapse into one leaf.
        rng : RngStream
            Stream owned by the tree; the build consumes its generator.
        ids : Sequence[int] | None, default=None
            Point ids. Defaults to ``Point.id`` when set, else the list position.

        Raises
        ------
        EmptyInputError
            If ``points`` is empty.
        DimensionMismatchError
            If the points have different dimensions.
        """
        if len(points) == 0:
            raise EmptyInputError("Cannot build a tree from an empty point list")
        if ids is not None and len(ids) != len(points):
            raise ValueError(f"Got {len(ids)} ids for {len(points)} points")

        first = coords_of(points[0])
        tree = cls(len(first), rng)
        for position, point in enumerate(points):
            coords = coords_of(point)
            check_dimension(tree.dimension, coords)
            if ids is not None:
                point_id = int(ids[position])
            elif isinstance(point, Point) and point.id is not None:
                point_id = point.id
            else:
                point_id = position
            if point_id in tree.leaves:
                raise DuplicateIdError(f"Point id {point_id} appears twice")
            leaf = tree._by_coords.get(coords)
            if leaf is None:
                leaf = Leaf(coords, [])
                tree._by_coords[coords] = leaf
            leaf.ids.append(point_id)
            tree.leaves[point_id] = leaf

        distinct = list(tree._by_coords.values())
        table = np.array([leaf.point for leaf in distinct], dtype=float)
        weights = np.array([leaf.count for leaf in distinct], dtype=np.int64)
        gen = tree._gen

        # explicit stack: (indices into `distinct`, parent, goes_left)
        stack: list[tuple[np.ndarray, Branch | None, bool]] = [
            (np.arange(len(distinct)), None, True)
        ]
        while stack:
            index, parent, goes_left = stack.pop()
            if index.size == 1:
                node: Node = distinct[int(index[0])]
                node.parent = parent
            else:
                block = table[index]
                lo = block.min(axis=0)
                hi = block.max(axis=0)
                lo_t, hi_t = tuple(lo.tolist()), tuple(hi.tolist())
                while True:
                    dim, cut = draw_cut(lo_t, hi_t, gen)
                    mask = block[:, dim] <= cut
                    if not mask.all():
                        break
                node = Branch(
                    dim,
                    cut,
                    BoundingBox(lo_t, hi_t),
                    int(weights[index].sum()),
                    parent,
                )
                stack.append((index[~mask], node, False))
                stack.append((index[mask], node, True))
            if parent is None:
                tree.root = node
            elif goes_left:
                parent.left = node
            else:
                parent.right = node

        logger.debug(
            "tree_built", leaves=len(distinct), points=len(points), dimension=tree.dimension
        )
        return tree

    # ------------------------------------------------------------- accessors

    def __len__(self) -> int:
        """Number of stored ids, counting multiplicity."""
        return self.root.count if self.root is not None else 0

    def __contains__(self, point_id: object) -> bool:
        return point_id in self.leaves

    @property
    def leaf_count(self) -> int:
        """Number of distinct leaves."""
        return len(self._by_coords)

    @property
    def ids(self) -> list[int]:
        return list(self.leaves)

    def point_of(self, point_id: int) -> Coords:
        return self._leaf(point_id).point

    def depth(self, point_id: int) -> int:
        node: Node = self._leaf(point_id)
        depth = 0
        while node.parent is not None:
            node = node.parent
            depth += 1
        return depth

    def iter_leaves(self) -> Iterator[tuple[Leaf, int]]:
        """Yield ``(leaf, depth)`` for every leaf, depth-first."""
        if self.root is None:
            return
        stack: list[tuple[Node, int]] = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            if isinstance(node, Leaf):
                yield node, depth
            else:
                stack.append((node.right, depth + 1))
                stack.append((node.left, depth + 1))

    def leaf_depths(self) -> dict[int, int]:
        """Depth of every stored id, root depth 0."""
        return {pid: depth for leaf, depth in self.iter_leaves() for pid in leaf.ids}

    def model_complexity(self) -> ModelComplexity:
        """Sum over leaves of ``depth * multiplicity``; 0 for an empty tree."""
        return ModelComplexity(
            sum(depth * leaf.count for leaf, depth in self.iter_leaves())
        )

    # --------------------------------------------------------- insert/delete

    def insert(
        self,
        point: Point | Sequence[float],
        point_id: int,
        rng: RngStream | np.random.Generator | None = None,
    ) -> RRCTree:
        """Insert one point in place and return the tree.

        An exact duplicate of a stored point bumps that leaf's multiplicity.
        Otherwise the point descends from the root; at each node a candidate cut is
        drawn over the node box extended by the point, and the point is split off
        above the node as soon as the cut separates it.

        Raises
        ------
        DimensionMismatchError
            If the point dimension differs from the tree's.
        DuplicateIdError
            If ``point_id`` is already stored.
        """
        coords = coords_of(point)
        check_dimension(self.dimension, coords)
        if point_id in self.leaves:
            raise DuplicateIdError(f"Point id {point_id} is already in the tree")

        existing = self._by_coords.get(coords)
        if existing is not None:
            existing.ids.append(point_id)
            self.leaves[point_id] = existing
            self._bump_counts(existing.parent, 1)
            return self

        leaf = Leaf(coords, [point_id])
        self.leaves[point_id] = leaf
        self._by_coords[coords] = leaf
        if self.root is None:
            self.root = leaf
            return self

        gen = self._gen if rng is None else as_generator(rng)
        node, _, dim, cut = self._locate(coords, gen)
        parent = node.parent
        branch = Branch(
            dim,
            cut,
            BoundingBox(tuple(map(min, node.lo, coords)), tuple(map(max, node.hi, coords))),
            node.count + 1,
            parent,
        )
        if coords[dim] <= cut:
            branch.left, branch.right = leaf, node
        else:
            branch.left, branch.right = node, leaf
        leaf.parent = branch
        node.parent = branch
        self._replace_child(parent, node, branch)

        ancestor = parent
        while ancestor is not None:
            ancestor.count += 1
            if not ancestor.box.contains(coords):
                ancestor.box = ancestor.box.extend(coords)
            ancestor = ancestor.parent
        return self

    def delete(self, point_id: int) -> RRCTree:
        """Remove one id in place and return the tree.

        A leaf with multiplicity above one loses one count; otherwise the leaf is
        removed and its parent branch is replaced by the sibling subtree. Boxes on
        the path to the root are recomputed tight.

        Raises
        ------
        UnknownPointIdError
            If ``point_id`` is not stored.
        """
        leaf = self._leaf(point_id)
        del self.leaves[point_id]
        if leaf.multiplicity > 1:
            leaf.ids.remove(point_id)
            self._bump_counts(leaf.parent, -1)
            return self

        del self._by_coords[leaf.point]
        parent = leaf.parent
        if parent is None:
            self.root = None
            return self

        sibling = parent.right if parent.left is leaf else parent.left
        grandparent = parent.parent
        sibling.parent = grandparent
        self._replace_child(grandparent, parent, sibling)

        ancestor = grandparent
        while ancestor is not None:
            ancestor.count -= 1
            ancestor.box = BoundingBox(
                tuple(map(min, ancestor.left.lo, ancestor.right.lo)),
                tuple(map(max, ancestor.left.hi, ancestor.right.hi)),
            )
            ancestor = ancestor.parent
        return self

    # --------------------------------------------------------------- scoring

    def displacement(
        self,
        candidate: Point | Sequence[float],
        rng: RngStream | np.random.Generator | None = None,
    ) -> int:
        """Increase of model complexity if ``candidate`` were inserted."""
        return self.placement(candidate, rng).displacement

    def placement(
        self,
        candidate: Point | Sequence[float],
        rng: RngStream | np.random.Generator | None = None,
    ) -> Placement:
        """Simulate inserting ``candidate`` and report its leaf depth and displacement.

        The insertion is simulated without touching the tree. Without an explicit
        stream, the draws come from a sub-stream of the tree's stream keyed by the
        candidate coordinates, so repeated or reordered queries agree.

        A candidate that duplicates a stored point at depth ``d`` displaces exactly
        ``d``. Otherwise the candidate splits off above a subtree holding ``S`` ids
        at depth ``D``: those ids move one level down and the new leaf sits at
        depth ``D + 1``, so the displacement is ``S + D + 1``.
        """
        coords = coords_of(candidate)
        check_dimension(self.dimension, coords)
        if self.root is None:
            return Placement(0, 0)
        existing = self._by_coords.get(coords)
        if existing is not None:
            depth = self.depth(existing.ids[0])
            return Placement(depth, depth)
        if rng is None:
            gen = self.rng.substream(QUERY_STREAM, coordinate_key(coords)).generator()
        else:
            gen = as_generator(rng)
        node, depth, _, _ = self._locate(coords, gen)
        return Placement(node.count + depth + 1, depth + 1)

    def tree_distance(self, id_a: int, id_b: int) -> int:
        """Leaf count of the lowest common ancestor of two stored ids.

        Raises
        ------
        UnknownPointIdError
            If either id is not stored.
        SamePointError
            If both ids live in the same leaf.
        """
        leaf_a, leaf_b = self._leaf(id_a), self._leaf(id_b)
        if leaf_a is leaf_b:
            raise SamePointError(f"Ids {id_a} and {id_b} share one leaf")
        ancestors = set()
        node: Node | None = leaf_a
        while node is not None:
            ancestors.add(id(node))
            node = node.parent
        node = leaf_b
        while id(node) not in ancestors:
            node = node.parent
        return node.count

    def tree_distance_matrix(self, ids: Sequence[int]) -> np.ndarray:
        """Pairwise tree distances for ``ids`` in one traversal.

        Entry ``[i, j]`` is the leaf count of the lowest common ancestor of
        ``ids[i]`` and ``ids[j]``; ids sharing a leaf get that leaf's count and the
        diagonal is zero.
        """
        position = {pid: k for k, pid in enumerate(ids)}
        for pid in ids:
            self._leaf(pid)
        matrix = np.zeros((len(ids), len(ids)), dtype=np.int64)
        if self.root is None:
            return matrix

        below: dict[int, list[int]] = {}
        stack: list[tuple[Node, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if isinstance(node, Leaf):
                members = [position[pid] for pid in node.ids if pid in position]
                if len(members) > 1:
                    matrix[np.ix_(members, members)] = node.count
                below[id(node)] = members
            elif not expanded:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
            else:
                left = below.pop(id(node.left))
                right = below.pop(id(node.right))
                if left and right:
                    matrix[np.ix_(left, right)] = node.count
                    matrix[np.ix_(right, left)] = node.count
                below[id(node)] = left + right
        np.fill_diagonal(matrix, 0)
        return matrix

    # ---------------------------------------------------------------- checks

    def audit(self) -> None:
        """Re-derive every structural invariant and raise AssertionError on the first violation."""
        if self.root is None:
            assert not self.leaves and not self._by_coords, "empty tree with index entries"
            return
        assert self.root.parent is None, "root has a parent"
        seen: dict[int, Leaf] = {}
        distinct = 0
        stack: list[tuple[Node, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if isinstance(node, Leaf):
                assert node.ids, "leaf without ids"
                assert len(node.point) == self.dimension, "leaf dimension mismatch"
                assert self._by_coords.get(node.point) is node, "coordinate index stale"
                for pid in node.ids:
                    assert pid not in seen, f"id {pid} stored twice"
                    seen[pid] = node
                distinct += 1
                continue
            if not expanded:
                assert node.left is not None and node.right is not None, "branch missing a child"
                assert node.left.parent is node, "left child parent link broken"
                assert node.right.parent is node, "right child parent link broken"
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
                continue
            left, right = node.left, node.right
            dim = node.cut_dimension
            assert 0 <= dim < self.dimension, "cut dimension out of range"
            assert left.hi[dim] <= node.cut_value, "left subtree crosses the cut"
            assert right.lo[dim] > node.cut_value, "right subtree crosses the cut"
            assert node.count == left.count + right.count, "subtree count is wrong"
            tight = (
                tuple(map(min, left.lo, right.lo)),
                tuple(map(max, left.hi, right.hi)),
            )
            assert (node.box.min, node.box.max) == tight, "branch box is not tight"
        assert seen.keys() == self.leaves.keys(), "id index disagrees with leaves"
        assert all(self.leaves[pid] is leaf for pid, leaf in seen.items()), "id index stale"
        assert distinct == len(self._by_coords), "coordinate index has extra entries"

    # --------------------------------------------------------- serialization

    def to_dict(self) -> dict[str, Any]:
        """Canonical nested record of the tree."""
        return {
            "dimension": self.dimension,
            "leaf_count": self.leaf_count,
            "size": len(self),
            "root": None if self.root is None else _node_to_dict(self.root),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    # --------------------------------------------------------------- helpers

    def _leaf(self, point_id: int) -> Leaf:
        try:
            return self.leaves[point_id]
        except KeyError:
            raise UnknownPointIdError(point_id) from None

    def _locate(
        self, coords: Coords, gen: np.random.Generator
    ) -> tuple[Node, int, int, float]:
        """Find where a new distinct point splits off: ``(node, depth, dim, cut)``."""
        node = self.root
        depth = 0
        while True:
            lo, hi = node.lo, node.hi
            dim, cut = draw_cut(
                tuple(map(min, lo, coords)), tuple(map(max, hi, coords)), gen
            )
            x = coords[dim]
            if x <= cut < lo[dim] or hi[dim] <= cut < x:
                return node, depth, dim, cut
            if isinstance(node, Leaf):
                continue
            node = node.left if coords[node.cut_dimension] <= node.cut_value else node.right
            depth += 1

    def _replace_child(self, parent: Branch | None, old: Node, new: Node) -> None:
        if parent is None:
            self.root = new
        elif parent.left is old:
            parent.left = new
        else:
            parent.right = new

    @staticmethod
    def _bump_counts(node: Branch | None, delta: int) -> None:
        while node is not None:
            node.count += delta
            node = node.parent


def _node_to_dict(node: Node) -> dict[str, Any]:
    if isinstance(node, Leaf):
        return {
            "type": "leaf",
            "ids": sorted(node.ids),
            "multiplicity": node.multiplicity,
            "point": list(node.point),
        }
    return {
        "type": "branch",
        "cut_dimension": node.cut_dimension,
        "cut_value": node.cut_value,
        "box": node.box.to_dict(),
        "count": node.count,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def build(points: Sequence[Point], rng: RngStream) -> RRCTree:
    """Functional alias of :meth:`RRCTree.build`."""
    return RRCTree.build(points, rng)


def insert(tree: RRCTree, point: Point | Sequence[float], point_id: int) -> RRCTree:
    return tree.insert(point, point_id)


def delete(tree: RRCTree, point_id: int) -> RRCTree:
    return tree.delete(point_id)


def model_complexity(tree: RRCTree) -> ModelComplexity:
    return tree.model_complexity()


def displacement(tree: RRCTree, candidate: Point | Sequence[float]) -> int:
    return tree.displacement(candidate)


def tree_distance(tree: RRCTree, id_a: int, id_b: int) -> int:
    return tree.tree_distance(id_a, id_b)


__all__ = [
    "Branch",
    "Leaf",
    "ModelComplexity",
    "Placement",
    "RRCTree",
    "build",
    "delete",
    "displacement",
    "draw_cut",
    "insert",
    "model_complexity",
    "tree_distance",
]
