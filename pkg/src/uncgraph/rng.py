"""Seeded random streams.

Every randomized routine takes an ``rng`` argument that may be an ``int``
seed, an :class:`RngStream`, a ``numpy.random.Generator`` or ``None``.
Parallel work derives child streams from one master seed so results do not
depend on scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "check_random_state", "spawn"]


@dataclass(frozen=True)
class RngStream:
    """A (master seed, stream id) pair naming an independent PCG64 stream."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream: int) -> "RngStream":
        # children live in a disjoint id range so (seed, k) never collides
        return RngStream(self.seed, (self.stream + 1) * 1_000_003 + int(stream))


def check_random_state(rng=None) -> np.random.Generator:
    """Turn ``rng`` into a ``numpy.random.Generator``."""
    if rng is None:
        return np.random.default_rng()
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")


def spawn(rng, n: int) -> list[np.random.Generator]:
    """Derive ``n`` independent generators from ``rng``.

    Identical input state always yields identical children.
    """
    if isinstance(rng, RngStream):
        return [rng.child(i).generator() for i in range(n)]
    if isinstance(rng, (int, np.integer)):
        base = RngStream(int(rng))
        return [base.child(i).generator() for i in range(n)]
    gen = check_random_state(rng)
    seeds = gen.integers(0, 2**63 - 1, size=n)
    return [np.random.default_rng(int(s)) for s in seeds]
