"""Estimator-style wrappers around the anonymization schemes.

Every scheme follows the same pattern::

    est = MaxVar(n_potential=20000, n_parts=4, random_state=7)
    ug = est.fit_transform(g0)          # UncertainGraph
    worlds = est.sample(20)             # list of Graph

``fit`` runs the scheme on the true graph and keeps the result in
``uncertain_graph_``. ``transform`` returns that result for the fitted graph
(an anonymization is specific to the graph it was computed for). ``sample``
draws output graphs: possible worlds for the probabilistic schemes, fresh
runs of the procedure for the rewiring schemes. All randomness derives from
``random_state`` so refits and samples are reproducible.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_is_fitted

from ..graph import Graph, UncertainGraph, sample_world, total_variance
from ..rng import RngStream
from ..validation import check_graph, check_int, check_probability
from .mixture import mixture, partition_combinator
from .obfuscation import obfuscate_kobf
from .randwalk import randwalk, randwalk_matrix, randwalk_mod, tv_upper_bound_rw
from .switch import edge_switch

__all__ = [
    "KObfuscation",
    "RandWalk",
    "RandWalkMod",
    "EdgeSwitch",
    "Mixture",
    "Partitioned",
    "MaxVar",
    "make_scheme",
    "expected_degree_error",
]

FIT_STREAM = 0


class _Scheme(BaseEstimator):
    """Shared fit/transform/sample plumbing."""

    #: True when each output is one run of a randomized rewiring procedure
    procedural = False

    def _stream(self, stream):
        seed = self.random_state
        if seed is None:
            return None
        if isinstance(seed, np.random.Generator):
            return seed
        return RngStream(int(seed), stream)

    def _validate(self, g: Graph):
        """Check hyper-parameters against the input graph."""

    def _anonymize(self, g: Graph, rng):
        raise NotImplementedError

    def fit(self, X, y=None):
        g = check_graph(X)
        self._validate(g)
        out = self._anonymize(g, self._stream(FIT_STREAM))
        self.graph_ = g
        self.n_nodes_in_ = g.n
        if isinstance(out, Graph):
            self.output_graph_ = out
            out = out.to_uncertain()
        self.uncertain_graph_ = out
        return self

    def transform(self, X=None):
        check_is_fitted(self, "uncertain_graph_")
        if X is not None:
            g = check_graph(X)
            if g.n != self.graph_.n or not np.array_equal(g.edges, self.graph_.edges):
                raise ValueError("transform must receive the graph passed to fit")
        return self.uncertain_graph_

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()

    @property
    def total_variance_(self) -> float:
        check_is_fitted(self, "uncertain_graph_")
        return total_variance(self.uncertain_graph_)

    def sample(self, n_samples: int = 1, random_state=None) -> list:
        """Draw ``n_samples`` output graphs.

        Sample ``i`` uses stream ``i + 1`` of ``random_state`` (default: the
        estimator's own seed), so the list is reproducible and sample ``i`` does
        not depend on how many others are drawn.
        """
        check_is_fitted(self, "uncertain_graph_")
        seed = self.random_state if random_state is None else random_state
        out = []
        for i in range(int(n_samples)):
            rng = None if seed is None else RngStream(int(seed), i + 1)
            if self.procedural:
                res = self._anonymize(self.graph_, rng)
                out.append(res if isinstance(res, Graph) else sample_world(res, rng))
            else:
                out.append(sample_world(self.uncertain_graph_, rng))
        return out


class KObfuscation(_Scheme):
    """(k, eps)-obfuscation with a fixed noise level ``sigma``.

    Parameters
    ----------
    sigma : float
        Scale of the truncated normal noise on [0, 1].
    n_potential : int, optional
        Number of non-edges given probability; defaults to the edge count.
    random_state : int, optional
    """

    def __init__(self, sigma=0.01, n_potential=None, random_state=None):
        self.sigma = sigma
        self.n_potential = n_potential
        self.random_state = random_state

    def _validate(self, g):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.n_potential is not None:
            check_int(self.n_potential, "n_potential")

    def _anonymize(self, g, rng):
        return obfuscate_kobf(g, self.sigma, self.n_potential, rng)


class RandWalk(_Scheme):
    """RandWalk with the trial-and-error loop; each output is one rewired graph."""

    procedural = True

    def __init__(self, t=2, max_loops=100, random_state=None):
        self.t = t
        self.max_loops = max_loops
        self.random_state = random_state

    def _validate(self, g):
        check_int(self.t, "t", minimum=2)
        check_int(self.max_loops, "max_loops", minimum=1)

    def _anonymize(self, g, rng):
        return randwalk(g, self.t, self.max_loops, rng)


class RandWalkMod(_Scheme):
    """RandWalk-mod.

    ``method="sample"`` runs the procedure (the output keeps selfloops and
    parallel edges); ``method="matrix"`` returns the expected uncertain
    adjacency instead, and ``sample`` then draws possible worlds from it.
    """

    def __init__(self, t=2, alpha=0.5, method="sample", random_state=None):
        self.t = t
        self.alpha = alpha
        self.method = method
        self.random_state = random_state

    @property
    def procedural(self):
        return self.method == "sample"

    def _validate(self, g):
        check_int(self.t, "t", minimum=2)
        check_probability(self.alpha, "alpha", open_low=True)
        if self.method not in ("sample", "matrix"):
            raise ValueError(f"method must be 'sample' or 'matrix', got {self.method!r}")

    def _anonymize(self, g, rng):
        if self.method == "matrix":
            return randwalk_matrix(g, self.t, self.alpha)
        return randwalk_mod(g, self.t, self.alpha, rng)

    @property
    def preserves_expected_degrees(self) -> bool:
        return self.alpha == 0.5

    def tv_bound(self) -> float:
        check_is_fitted(self, "uncertain_graph_")
        return tv_upper_bound_rw(self.graph_, self.t)


class EdgeSwitch(_Scheme):
    """``n_switches`` random degree-preserving switches per output graph."""

    procedural = True

    def __init__(self, n_switches=1000, strict=False, random_state=None):
        self.n_switches = n_switches
        self.strict = strict
        self.random_state = random_state

    def _validate(self, g):
        check_int(self.n_switches, "n_switches")

    def _anonymize(self, g, rng):
        return edge_switch(g, self.n_switches, rng, strict=self.strict)


class Mixture(_Scheme):
    """``(1 - p_mix) A(G0) + p_mix A(G)`` with ``G`` produced by ``base``."""

    def __init__(self, base=None, p_mix=0.5, random_state=None):
        self.base = base
        self.p_mix = p_mix
        self.random_state = random_state

    def _validate(self, g):
        check_probability(self.p_mix, "p_mix")
        if self.base is None:
            raise ValueError("Mixture needs a base scheme")

    def _anonymize(self, g, rng):
        base = clone(self.base)
        other = base._anonymize(g, rng)
        return mixture(g, other, self.p_mix)


class Partitioned(_Scheme):
    """Run ``base`` independently on each of ``n_parts`` parts; cut edges are kept."""

    def __init__(self, base=None, n_parts=2, partition=None, random_state=None):
        self.base = base
        self.n_parts = n_parts
        self.partition = partition
        self.random_state = random_state

    def _validate(self, g):
        check_int(self.n_parts, "n_parts", minimum=1)
        if self.base is None:
            raise ValueError("Partitioned needs a base scheme")

    def _anonymize(self, g, rng):
        base = clone(self.base)
        return partition_combinator(g, base._anonymize, self.n_parts, rng,
                                    partition=self.partition)


class MaxVar(_Scheme):
    """Maximum degree variance under exact expected degrees.

    Parameters
    ----------
    n_potential : int, optional
        Total potential edges; defaults to the edge count.
    n_parts : int, default=1
    tol : float, default=1e-6
        Degree residual tolerance per part.
    max_iter : int, optional
    n_jobs : int, default=1
    partition : array-like, optional
        Precomputed node-to-part assignment.
    record : bool, default=False
        Keep solver history (see ``result_.write_diagnostics``).
    """

    def __init__(self, n_potential=None, n_parts=1, tol=1e-6, max_iter=None, n_jobs=1,
                 partition=None, record=False, random_state=None):
        self.n_potential = n_potential
        self.n_parts = n_parts
        self.tol = tol
        self.max_iter = max_iter
        self.n_jobs = n_jobs
        self.partition = partition
        self.record = record
        self.random_state = random_state

    def _validate(self, g):
        if self.n_potential is not None:
            check_int(self.n_potential, "n_potential")
        check_int(self.n_parts, "n_parts", minimum=1)
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def _anonymize(self, g, rng):
        from ..maxvar.pipeline import run_maxvar

        n_p = g.m if self.n_potential is None else int(self.n_potential)
        self.result_ = run_maxvar(g, n_p, self.n_parts, rng, tol=self.tol,
                                  max_iter=self.max_iter, partition=self.partition,
                                  n_jobs=self.n_jobs, record=self.record)
        return self.result_.graph

    def tv_bound(self) -> float:
        check_is_fitted(self, "result_")
        return self.result_.tv_bound()


def make_scheme(name: str, **params) -> _Scheme:
    """Build an estimator from a scheme tag used on the command line."""
    table = {
        "kobf": KObfuscation,
        "randwalk": RandWalk,
        "randwalk-mod": RandWalkMod,
        "edgeswitch": EdgeSwitch,
        "maxvar": MaxVar,
    }
    if name not in table:
        raise ValueError(f"unknown scheme {name!r}; choose from {', '.join(sorted(table))}")
    return table[name](**params)



def expected_degree_error(est: _Scheme) -> float:
    """``max_u |E[d_u] - d_u(G0)|`` for a fitted estimator."""
    check_is_fitted(est, "uncertain_graph_")
    ug: UncertainGraph = est.uncertain_graph_
    return float(np.abs(ug.expected_degrees() - est.graph_.degrees).max(initial=0.0))

