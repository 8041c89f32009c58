"""Friend-of-friend potential edges for one subgraph."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph
from ..rng import check_random_state

__all__ = ["AugmentedSubgraph", "add_potential_edges"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentedSubgraph:
    """A subgraph together with the non-edges proposed for it.

    Attributes
    ----------
    graph : Graph
        The subgraph with local ids ``0..n-1``.
    potential : ndarray of shape (n_s, 2)
        Added node pairs ``u < v``, each at distance 2 in ``graph``.
    node_ids : ndarray
        Map from local id to the id in the parent graph.
    requested : int
        Number of potential edges asked for.
    """

    graph: Graph
    potential: np.ndarray
    node_ids: np.ndarray = field(repr=False)
    requested: int = 0

    @property
    def n_s(self) -> int:
        return len(self.potential)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def degrees(self) -> np.ndarray:
        return self.graph.degrees

    def all_pairs(self) -> np.ndarray:
        """Existing edges first, then potential edges."""
        return np.concatenate([self.graph.edges, self.potential]).astype(np.int64)


def add_potential_edges(sub: Graph, n_s: int, rng=None, *, node_ids=None,
                        max_stall: int = 20) -> AugmentedSubgraph:
    """Sample ``n_s`` distinct non-adjacent pairs at distance 2 in ``sub``.

    A uniform random node ``w`` is drawn, then two distinct random neighbors
    ``u, v`` of ``w``; the pair is kept if ``(u, v)`` is neither an edge nor
    already chosen. Draws are batched, and sampling stops early when
    ``max_stall`` consecutive batches add nothing (fewer pairs exist than
    requested, or they are very hard to hit).
    """
    n_s = int(n_s)
    if n_s < 0:
        raise ValueError("n_s must be non-negative")
    gen = check_random_state(rng)
    n = sub.n
    if node_ids is None:
        node_ids = np.arange(n, dtype=np.int64)
    deg = sub.degrees
    chosen = np.empty(0, dtype=np.int64)
    if n_s == 0 or n == 0 or (deg >= 2).sum() == 0:
        if n_s:
            logger.warning("subgraph has no distance-2 pairs; added 0 of %d potential edges", n_s)
        return AugmentedSubgraph(sub, np.empty((0, 2), dtype=np.int64), node_ids, n_s)
    existing = sub.edge_keys
    stall = 0
    while len(chosen) < n_s and stall < max_stall:
        need = n_s - len(chosen)
        # at least n draws per batch so that rare hubs, which hold most of the
        # remaining pairs, are reached before a batch counts as stalled
        batch = max(64, 2 * need, n)
        w = gen.integers(0, n, size=batch)
        dw = deg[w]
        ok = dw >= 2
        w, dw = w[ok], dw[ok]
        i = (gen.random(len(w)) * dw).astype(np.int64)
        j = (gen.random(len(w)) * (dw - 1)).astype(np.int64)
        j = j + (j >= i)
        a = sub.indices[sub.indptr[w] + i]
        b = sub.indices[sub.indptr[w] + j]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = lo * n + hi
        keys = keys[lo != hi]
        keys = keys[~np.isin(keys, existing, assume_unique=False)]
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)]
        keys = keys[~np.isin(keys, chosen)]
        if len(keys) == 0:
            stall += 1
            continue
        stall = 0
        chosen = np.concatenate([chosen, keys[:need]])
    if len(chosen) < n_s:
        logger.warning("added %d of %d potential edges (distance-2 pairs exhausted or rare)",
                       len(chosen), n_s)
    chosen = np.sort(chosen)
    pot = np.column_stack([chosen // n, chosen % n]) if len(chosen) else np.empty((0, 2), np.int64)
    return AugmentedSubgraph(sub, pot, node_ids, n_s)
