"""Mixture of the true graph with an anonymized one, and the Partition combinator."""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..exceptions import ParameterError
from ..graph import Graph, UncertainGraph
from ..rng import RngStream, spawn

__all__ = ["mixture", "partition_combinator"]


def _as_uncertain(g) -> UncertainGraph:
    return g if isinstance(g, UncertainGraph) else g.to_uncertain()


def mixture(g0: Graph, g, p_mix: float) -> UncertainGraph:
    """``(1 - p) A(G0) + p A(G)``.

    For a simple ``g`` this gives 1 on shared edges, ``1 - p`` on edges only in
    ``g0`` and ``p`` on edges only in ``g``. A multigraph ``g`` (selfloops,
    parallel edges) yields a relaxed uncertain adjacency.
    """
    if not 0.0 <= p_mix <= 1.0:
        raise ParameterError(f"p_mix={p_mix} must lie in [0, 1]")
    if g0.n != g.n:
        raise ValueError(f"node counts differ: {g0.n} vs {g.n}")
    M = (1.0 - p_mix) * _as_uncertain(g0).to_matrix() + p_mix * _as_uncertain(g).to_matrix()
    relaxed = (isinstance(g, Graph) and not g.simple) or getattr(g, "allows_selfloops", False)
    out = UncertainGraph.from_matrix(M, allows_selfloops=None)
    if relaxed and not out.allows_selfloops:
        out = UncertainGraph(out.n, out.u, out.v, out.p, allows_selfloops=True)
    return out


def partition_combinator(g0: Graph, inner: Callable, s: int, rng=None, *,
                         partition=None) -> UncertainGraph:
    """Run ``inner(subgraph, rng)`` on each of ``s`` parts and union the results.

    ``inner`` may return a :class:`Graph` or an :class:`UncertainGraph` on the
    subgraph's local ids. Edges between parts are copied with probability 1.
    With ``s == 1`` this is ``inner(g0, rng)`` with the very same ``rng``.
    """
    from ..maxvar.partition import PartitionPlan, partition_graph

    s = int(s)
    if s < 1:
        raise ParameterError("s must be >= 1")
    if s == 1 and partition is None:
        return _as_uncertain(inner(g0, rng))
    if isinstance(rng, (int, np.integer)):
        rng = RngStream(int(rng))
    gens = spawn(rng, s + 1)
    if partition is None:
        plan = partition_graph(g0, s, gens[0])
    elif isinstance(partition, PartitionPlan):
        plan = partition
    else:
        plan = PartitionPlan.from_assignment(g0, partition, s)
    us, vs, ps = [], [], []
    relaxed = False
    for k in range(plan.n_parts):
        sub, ids = g0.subgraph(plan.members(k))
        out = _as_uncertain(inner(sub, gens[k + 1]))
        relaxed |= out.allows_selfloops
        us.append(ids[out.u])
        vs.append(ids[out.v])
        ps.append(np.asarray(out.p))
    cut = plan.cut_edges
    us.append(cut[:, 0])
    vs.append(cut[:, 1])
    ps.append(np.ones(len(cut)))
    return UncertainGraph(g0.n, np.concatenate(us), np.concatenate(vs), np.concatenate(ps),
                          allows_selfloops=relaxed)
