"""Privacy/utility evaluation of anonymized outputs and CSV serialization."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph, UncertainGraph, sample_world
from ..rng import RngStream, check_random_state, spawn
from .privacy import epsilon_for_k, privacy_score
from .utility import STAT_NAMES, UtilityStats, utility_stats

__all__ = [
    "EvaluationReport",
    "evaluate",
    "relative_error",
    "edge_differences",
    "REPORT_COLUMNS",
    "write_reports_csv",
    "write_long_csv",
]

DEFAULT_KS = (30, 50, 100)

REPORT_COLUMNS = (
    ["scheme", "params", "n_samples", "H1", "H2_open"]
    + list(STAT_NAMES)
    + ["rel_err", "removed_edges", "added_edges"]
)


def relative_error(mean_stats: UtilityStats, true_stats: UtilityStats) -> float:
    """Mean over the ten statistics of ``|mean - true| / true``.

    Statistics whose true value is 0 are compared absolutely (the relative
    error is undefined there).
    """
    a, b = mean_stats.as_array(), true_stats.as_array()
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(b != 0, np.abs(a - b) / np.abs(b), np.abs(a - b))
    return float(np.mean(rel))


def edge_differences(g0: Graph, g: Graph) -> tuple[int, int]:
    """``(|E_G0 \\ E_G|, |E_G \\ E_G0|)`` on simple supports."""
    k0 = g0.simplified().edge_keys
    k1 = g.simplified().edge_keys
    both = np.intersect1d(k0, k1, assume_unique=True).size
    return int(len(k0) - both), int(len(k1) - both)


@dataclass
class EvaluationReport:
    """Privacy and utility summary of one anonymized output.

    ``tradeoff`` is ``sqrt(H2_open) * rel_err``.
    """

    scheme: str
    params: str
    n_samples: int
    true_stats: UtilityStats
    sample_stats: list = field(repr=False)
    mean_stats: UtilityStats = None
    std_stats: UtilityStats = None
    H1: float = 0.0
    H1_std: float = 0.0
    H2_open: float = 0.0
    H2_open_std: float = 0.0
    epsilon: dict = field(default_factory=dict)
    rel_err: float = 0.0
    removed_edges: float = 0.0
    added_edges: float = 0.0
    true_H1: float = 0.0
    true_H2_open: float = 0.0

    @property
    def tradeoff(self) -> float:
        return math.sqrt(self.H2_open) * self.rel_err

    def row(self) -> dict:
        out = {"scheme": self.scheme, "params": self.params, "n_samples": self.n_samples,
               "H1": self.H1, "H2_open": self.H2_open}
        out.update(self.mean_stats.as_dict())
        out.update(rel_err=self.rel_err, removed_edges=self.removed_edges,
                   added_edges=self.added_edges)
        for k in sorted(self.epsilon):
            out[f"eps_k{k}"] = self.epsilon[k]
        out["tradeoff"] = self.tradeoff
        return out


def _samples_from(output, n_samples, gens):
    if isinstance(output, UncertainGraph):
        return [sample_world(output, gen) for gen in gens]
    if isinstance(output, Graph):
        return [output]
    return list(output)


def evaluate(g0: Graph, output, n_samples: int = 20, ks=DEFAULT_KS, rng=None, *,
             scheme: str = "", params: str = "", K: int = 32, r: int = 7,
             n_sources: int = 1000, true_stats: UtilityStats | None = None) -> EvaluationReport:
    """Score an anonymized output against the true graph.

    Parameters
    ----------
    g0 : Graph
        True graph.
    output : UncertainGraph, Graph or list of Graph
        An uncertain graph is sampled ``n_samples`` times; graphs are used as
        given (``n_samples`` is then ignored).
    ks : sequence of int
        ``k`` values for the epsilon columns.
    rng : seed or generator
        Drives world sampling and the randomized statistics.
    true_stats : UtilityStats, optional
        Precomputed statistics of ``g0`` (they are random through ANF).
    """
    if isinstance(rng, (int, np.integer)):
        rng = RngStream(int(rng))
    if isinstance(output, (UncertainGraph, Graph)):
        count = int(n_samples) if isinstance(output, UncertainGraph) else 1
    else:
        output = list(output)
        count = len(output)
    gens = spawn(rng if rng is not None else check_random_state(None), 2 * count + 1)
    samples = _samples_from(output, count, gens[:count])
    if not samples:
        raise ValueError("no samples to evaluate")
    for s in samples:
        if s.n != g0.n:
            raise ValueError(f"sample has {s.n} nodes, true graph {g0.n}")
    if true_stats is None:
        true_stats = utility_stats(g0, gens[-1], K=K, r=r, n_sources=n_sources)
    stats = [utility_stats(s, gens[len(samples) + i], K=K, r=r, n_sources=n_sources)
             for i, s in enumerate(samples)]
    arr = np.stack([s.as_array() for s in stats])
    mean = UtilityStats.from_array(arr.mean(axis=0))
    std = UtilityStats.from_array(arr.std(axis=0))
    h1 = np.array([privacy_score(g0, s, "H1") for s in samples])
    h2 = np.array([privacy_score(g0, s, "H2_open") for s in samples])
    diffs = np.array([edge_differences(g0, s) for s in samples], dtype=float)
    eps = epsilon_for_k(g0, samples, list(ks)) if ks else {}
    return EvaluationReport(
        scheme=scheme, params=params, n_samples=len(samples), true_stats=true_stats,
        sample_stats=stats, mean_stats=mean, std_stats=std,
        H1=float(h1.mean()), H1_std=float(h1.std()),
        H2_open=float(h2.mean()), H2_open_std=float(h2.std()),
        epsilon=eps, rel_err=relative_error(mean, true_stats),
        removed_edges=float(diffs[:, 0].mean()), added_edges=float(diffs[:, 1].mean()),
        true_H1=privacy_score(g0, g0, "H1"), true_H2_open=privacy_score(g0, g0, "H2_open"),
    )


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if math.isfinite(v) else str(float(v))
    return str(v)


def write_reports_csv(reports, path, ks=None):
    """One row per report, columns in :data:`REPORT_COLUMNS` order then ``eps_k*`` and ``tradeoff``."""
    reports = list(reports)
    if ks is None:
        ks = sorted({k for rep in reports for k in rep.epsilon})
    header = REPORT_COLUMNS + [f"eps_k{k}" for k in ks] + ["tradeoff"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        w.writerow(header)
        for rep in reports:
            row = rep.row()
            w.writerow([_fmt(row.get(col, "")) for col in header])
    return header


def write_long_csv(reports, path):
    """Plot-ready rows ``scheme, params, statistic, sample, value`` (sample ``-1`` is the true graph)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheme", "params", "statistic", "sample", "value"])
        for rep in reports:
            for name in STAT_NAMES:
                w.writerow([rep.scheme, rep.params, name, -1, _fmt(getattr(rep.true_stats, name))])
                for i, st in enumerate(rep.sample_stats):
                    w.writerow([rep.scheme, rep.params, name, i, _fmt(getattr(st, name))])
