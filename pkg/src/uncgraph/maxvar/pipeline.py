"""The MaxVar scheme end to end: partition, augment, solve, combine."""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph, UncertainGraph
from ..rng import RngStream, check_random_state, spawn
from .partition import PartitionPlan, partition_graph
from .potential import add_potential_edges
from .qp import QPSolution, solve_qp, tv_upper_bound_maxvar

__all__ = ["MaxVarResult", "PartResult", "maxvar", "run_maxvar", "split_budget"]

logger = logging.getLogger(__name__)


@dataclass
class PartResult:
    part: int
    n_nodes: int
    n_edges: int
    n_potential: int
    requested: int
    solution: QPSolution = field(repr=False)
    seconds: float = 0.0


@dataclass
class MaxVarResult:
    graph: UncertainGraph
    plan: PartitionPlan = field(repr=False)
    parts: list = field(default_factory=list, repr=False)

    @property
    def n_potential(self) -> int:
        return sum(p.n_potential for p in self.parts)

    @property
    def converged(self) -> bool:
        return all(p.solution.converged for p in self.parts)

    def tv_bound(self) -> float:
        """Bound ``m n_p / (m + n_p)`` using the potential edges actually added."""
        m = int(round(self.graph.m_expected))
        return tv_upper_bound_maxvar(m, self.n_potential)

    def write_diagnostics(self, path):
        """CSV with one row per (part, iteration): residual and objective."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["part", "iteration", "residual", "objective"])
            for pr in self.parts:
                for it, res, obj in pr.solution.history:
                    w.writerow([pr.part, it, f"{res:.6e}", f"{obj:.12g}"])


def split_budget(n_p: int, s: int) -> np.ndarray:
    """``n_p // s`` per part, the remainder handed out one each to the first parts."""
    base = np.full(s, n_p // s, dtype=np.int64)
    base[: n_p % s] += 1
    return base


def _solve_part(g0, plan, k, n_s, gen, tol, max_iter, record):
    t0 = time.perf_counter()
    sub, ids = g0.subgraph(plan.members(k))
    aug = add_potential_edges(sub, int(n_s), gen, node_ids=ids)
    sol = solve_qp(aug, tol=tol, max_iter=max_iter, record=record)
    return PartResult(k, sub.n, sub.m, aug.n_s, int(n_s), sol, time.perf_counter() - t0), ids


def run_maxvar(g0: Graph, n_p: int, s: int = 1, rng=None, *, tol: float = 1e-6,
               max_iter=None, partition: PartitionPlan | np.ndarray | None = None,
               n_jobs: int = 1, record: bool = False) -> MaxVarResult:
    """MaxVar with diagnostics.

    Parameters
    ----------
    g0 : Graph
        True graph.
    n_p : int
        Total number of potential edges, split over the parts.
    s : int
        Number of parts.
    rng : seed or generator
        Stream 0 drives the partitioner, stream ``k + 1`` part ``k``.
    tol : float
        Per-node degree residual allowed in each part.
    partition : PartitionPlan or array, optional
        Use this node-to-part assignment instead of computing one.
    n_jobs : int
        Parts solved concurrently (threads); results do not depend on it.
    record : bool
        Keep per-iteration residual/objective history for :meth:`MaxVarResult.write_diagnostics`.
    """
    n_p, s = int(n_p), int(s)
    if n_p < 0:
        raise ValueError("n_p must be non-negative")
    if s < 1:
        raise ValueError("s must be >= 1")
    if isinstance(rng, (int, np.integer)):
        rng = RngStream(int(rng))
    gens = spawn(rng if rng is not None else check_random_state(None), s + 1)
    if partition is None:
        plan = partition_graph(g0, s, gens[0])
    elif isinstance(partition, PartitionPlan):
        plan = partition
    else:
        plan = PartitionPlan.from_assignment(g0, partition, s)
    if plan.n_parts != s:
        raise ValueError(f"partition has {plan.n_parts} parts, expected {s}")
    budget = split_budget(n_p, s)

    def task(k):
        return _solve_part(g0, plan, k, budget[k], gens[k + 1], tol, max_iter, record)

    if n_jobs and n_jobs != 1 and s > 1:
        from concurrent.futures import ThreadPoolExecutor

        workers = None if n_jobs < 0 else int(n_jobs)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            outputs = list(ex.map(task, range(s)))
    else:
        outputs = [task(k) for k in range(s)]

    us, vs, ps, parts = [], [], [], []
    for pr, ids in outputs:
        pairs = pr.solution.pairs
        if len(pairs):
            us.append(ids[pairs[:, 0]])
            vs.append(ids[pairs[:, 1]])
            ps.append(pr.solution.p)
        parts.append(pr)
    cut = plan.cut_edges
    us.append(cut[:, 0])
    vs.append(cut[:, 1])
    ps.append(np.ones(len(cut)))
    graph = UncertainGraph(g0.n, np.concatenate(us), np.concatenate(vs), np.concatenate(ps))
    res = MaxVarResult(graph, plan, parts)
    if not res.converged:
        logger.warning("MaxVar: %d part(s) did not converge",
                       sum(not p.solution.converged for p in parts))
    return res


def maxvar(g0: Graph, n_p: int, s: int = 1, rng=None, *, tol: float = 1e-6, **kw) -> UncertainGraph:
    """Uncertain graph with maximal degree variance and unchanged expected degrees."""
    return run_maxvar(g0, n_p, s, rng, tol=tol, **kw).graph

