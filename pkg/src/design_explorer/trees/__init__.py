"""Robust random cut trees and forests."""

from .forest import DEFAULT_NUM_TREES, Forest, ForestStats, ScoredPoint, UpdateMode
from .rrct import Branch, Leaf, ModelComplexity, Placement, RRCTree

__all__ = [
    "DEFAULT_NUM_TREES",
    "Branch",
    "Forest",
    "ForestStats",
    "Leaf",
    "ModelComplexity",
    "Placement",
    "RRCTree",
    "ScoredPoint",
    "UpdateMode",
]
