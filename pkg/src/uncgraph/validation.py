"""Input coercion and parameter checks shared by the estimators and the CLI."""
from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp

from .exceptions import ParameterError
from .graph import Graph, UncertainGraph

__all__ = [
    "check_graph",
    "check_uncertain",
    "check_same_nodes",
    "check_probability",
    "check_int",
]


def _from_networkx(X) -> Graph:
    nodes = list(X.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    edges = np.array([(index[a], index[b]) for a, b in X.edges()], dtype=np.int64).reshape(-1, 2)
    simple = not (X.is_multigraph() if hasattr(X, "is_multigraph") else False)
    if getattr(X, "is_directed", lambda: False)():
        raise ValueError("directed graphs are not supported")
    return Graph(len(nodes), edges, simple=simple, original_ids=np.asarray(nodes, dtype=object))


def check_graph(X, *, n=None, allow_multigraph=True) -> Graph:
    """Coerce ``X`` into a :class:`Graph`.

    Accepted inputs are a :class:`Graph`, a networkx-style undirected graph
    (anything with ``nodes()``, ``edges()`` and ``number_of_nodes()``), an
    integer array of shape ``(m, 2)`` of edge endpoints (``n`` defaults to the
    largest id plus one), or a square scipy sparse / dense adjacency matrix.
    Any array with two columns is read as an edge list, so a dense 2x2
    adjacency matrix has to be passed as a sparse matrix.
    """
    if isinstance(X, Graph):
        g = X
    elif isinstance(X, UncertainGraph):
        raise TypeError("expected a deterministic graph, got an UncertainGraph")
    elif hasattr(X, "number_of_nodes") and hasattr(X, "edges"):
        g = _from_networkx(X)
    elif sp.issparse(X):
        if X.shape[0] != X.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got {X.shape}")
        coo = sp.triu(X, format="coo")
        g = Graph(X.shape[0], np.column_stack([coo.row, coo.col]))
    else:
        arr = np.asarray(X)
        if arr.ndim == 2 and arr.shape[1] == 2:
            if arr.size and not np.issubdtype(arr.dtype, np.integer):
                if not np.all(np.equal(np.mod(arr, 1), 0)):
                    raise ValueError("edge endpoints must be integers")
            arr = arr.astype(np.int64)
            if arr.size and arr.min() < 0:
                raise ValueError("node ids must be non-negative")
            size = int(arr.max()) + 1 if arr.size else 0
            g = Graph(size if n is None else int(n), arr)
        elif arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
            if not np.allclose(arr, arr.T):
                raise ValueError("adjacency matrix must be symmetric")
            r, c = np.nonzero(np.triu(arr))
            g = Graph(arr.shape[0], np.column_stack([r, c]))
        else:
            raise TypeError(f"cannot interpret object of type {type(X).__name__} with shape "
                            f"{getattr(arr, 'shape', None)} as a graph")
    if n is not None and g.n != int(n):
        raise ValueError(f"graph has {g.n} nodes, expected {n}")
    if not allow_multigraph and not g.simple:
        raise ValueError("a simple graph is required")
    return g


def check_uncertain(X) -> UncertainGraph:
    """Coerce ``X`` into an :class:`UncertainGraph` (deterministic graphs get probability 1)."""
    if isinstance(X, UncertainGraph):
        return X
    if sp.issparse(X):
        return UncertainGraph.from_matrix(X)
    arr = np.asarray(X) if not hasattr(X, "number_of_nodes") else None
    if arr is not None and arr.ndim == 2 and arr.shape[1] == 3:
        n = int(arr[:, :2].max()) + 1 if len(arr) else 0
        return UncertainGraph.from_triples(n, arr)
    return check_graph(X).to_uncertain()


def check_same_nodes(a, b, what="graphs"):
    if a.n != b.n:
        raise ValueError(f"{what} have different node counts: {a.n} vs {b.n}")


def check_probability(value, name, *, open_low=False):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ParameterError(f"{name} must be a real number, got {value!r}")
    lo_ok = value > 0 if open_low else value >= 0
    if not (lo_ok and value <= 1):
        interval = "(0, 1]" if open_low else "[0, 1]"
        raise ParameterError(f"{name}={value} must lie in {interval}")
    return float(value)


def check_int(value, name, *, minimum=0):
    if isinstance(value, (bool, np.bool_)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            value = int(value)
        else:
            raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name}={value} must be >= {minimum}")
    return int(value)
