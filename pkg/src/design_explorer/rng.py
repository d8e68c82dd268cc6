"""Seeded random streams.

Every random draw in the package comes from a :class:`RngStream`. A stream is an
immutable ``(seed, stream_id, path)`` triple that maps to a fresh
``numpy.random.Generator`` backed by PCG64. Streams with different ids or paths are
statistically independent, and the same triple yields the same sequence on every
platform.
"""

from __future__ import annotations

import hashlib
import struct
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True, slots=True)
class RngStream:
    """Reproducible source of random generators.

    Parameters
    ----------
    seed : int
        64-bit unsigned seed shared by every stream of one run.
    stream_id : int
        Non-negative id separating independent consumers (trees, warm-up, expansion).
    path : tuple[int, ...], default=()
        Sub-stream keys appended by :meth:`substream`.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed <= _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be non-negative, got {self.stream_id}")
        if any(key < 0 for key in self.path):
            raise ValueError(f"sub-stream keys must be non-negative, got {self.path}")

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        sequence = np.random.SeedSequence(
            self.seed, spawn_key=(self.stream_id, *self.path)
        )
        return np.random.Generator(np.random.PCG64(sequence))

    def substream(self, *keys: int) -> RngStream:
        """Derive an independent child stream."""
        return RngStream(self.seed, self.stream_id, self.path + tuple(int(k) for k in keys))

    def with_stream(self, stream_id: int) -> RngStream:
        """Same seed, different top-level stream."""
        return RngStream(self.seed, stream_id)


def as_generator(rng: RngStream | np.random.Generator) -> np.random.Generator:
    """Accept either a stream (fresh generator) or a live generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def coordinate_key(coords: Sequence[float]) -> int:
    """Stable non-negative 63-bit key for a coordinate vector."""
    packed = struct.pack(f"<{len(coords)}d", *coords)
    digest = hashlib.blake2b(packed, digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1
