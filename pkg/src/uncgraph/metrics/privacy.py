"""Re-identification scores based on structural node signatures."""
from __future__ import annotations

import numpy as np

from ..graph import Graph
from ..schemes.obfuscation import ColumnEntropy, epsilon_from_entropies

__all__ = [
    "SIGNATURE_KINDS",
    "signatures",
    "signature_ids",
    "equivalence_classes",
    "score_from_signatures",
    "privacy_score",
    "privacy_scores",
    "epsilon_for_k",
    "classes_count",
]

SIGNATURE_KINDS = ("H1", "H2_open")


def _signature_keys(g: Graph, kind: str) -> list:
    """One hashable key per node."""
    deg = g.simple_degrees()
    if kind == "H1":
        return deg.tolist()
    if kind != "H2_open":
        raise ValueError(f"unknown signature kind {kind!r}; expected one of {SIGNATURE_KINDS}")
    owner = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    nbr = g.indices
    off = owner != nbr
    owner, nd = owner[off], deg[nbr[off]]
    # unique (owner, neighbor degree) pairs, grouped by owner in ascending degree
    width = int(nd.max()) + 1 if len(nd) else 1
    pair = np.unique(owner * width + nd)
    owner, nd = pair // width, pair % width
    bounds = np.searchsorted(owner, np.arange(g.n + 1))
    nd = nd.astype(np.int64)
    return [nd[bounds[u]:bounds[u + 1]].tobytes() for u in range(g.n)]


def signatures(g: Graph, kind: str = "H1") -> list:
    """Node signatures.

    ``H1`` is the degree. ``H2_open`` is the sorted tuple of distinct neighbor
    degrees. Selfloops are ignored, parallel edges count in degrees.
    """
    keys = _signature_keys(g, kind)
    if kind == "H1":
        return keys
    return [tuple(np.frombuffer(k, dtype=np.int64).tolist()) for k in keys]


def signature_ids(*graphs: Graph, kind: str = "H1") -> list[np.ndarray]:
    """Integer class labels that are comparable across ``graphs``."""
    table: dict = {}
    out = []
    for g in graphs:
        keys = _signature_keys(g, kind)
        out.append(np.fromiter((table.setdefault(k, len(table)) for k in keys),
                               dtype=np.int64, count=len(keys)))
    return out


def equivalence_classes(g: Graph, kind: str = "H1") -> dict:
    """Map signature -> array of nodes sharing it."""
    sig = signatures(g, kind)
    classes: dict = {}
    for node, s in enumerate(sig):
        classes.setdefault(s, []).append(node)
    return {k: np.asarray(v) for k, v in classes.items()}


def score_from_signatures(sig_true, sig_out) -> float:
    """Sum over nodes of the chance an attacker picks the right node.

    A node ``u`` whose output signature equals its true signature is
    re-identified with probability ``1 / |{v : sig_out(v) = sig_true(u)}|``;
    otherwise the attacker's candidate set misses it and it scores 0.
    """
    sig_true = list(sig_true)
    sig_out = list(sig_out)
    if len(sig_true) != len(sig_out):
        raise ValueError("signature lists differ in length")
    counts: dict = {}
    for s in sig_out:
        counts[s] = counts.get(s, 0) + 1
    return float(sum(1.0 / counts[a] for a, b in zip(sig_true, sig_out) if a == b))


def privacy_score(g0: Graph, g_star: Graph, kind: str = "H1") -> float:
    """Privacy score of ``g_star`` against the true graph ``g0``."""
    if g0.n != g_star.n:
        raise ValueError(f"node counts differ: {g0.n} vs {g_star.n}")
    s0, s1 = signature_ids(g0, g_star, kind=kind)
    counts = np.bincount(s1, minlength=int(max(s0.max(initial=0), s1.max(initial=0))) + 1)
    hit = s0 == s1
    return float(np.sum(1.0 / counts[s0[hit]]))


def privacy_scores(g0: Graph, samples, kind: str = "H1") -> tuple[float, float]:
    """Mean and standard deviation of :func:`privacy_score` over samples."""
    vals = np.array([privacy_score(g0, s, kind) for s in samples])
    if len(vals) == 0:
        raise ValueError("need at least one sample")
    return float(vals.mean()), float(vals.std())


def epsilon_for_k(g0: Graph, samples, k) -> float | dict:
    """Fraction of nodes not k-obfuscated by the empirical degree distributions of ``samples``.

    Each node's degree distribution is its degree histogram over the samples;
    columns are normalized over nodes and a node is covered when the entropy
    of its true degree's column reaches ``log2 k``. ``k`` may be a list, in
    which case a ``{k: eps}`` dict is returned.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    n = g0.n
    degs = np.stack([s.simple_degrees() for s in samples])
    if degs.shape[1] != n:
        raise ValueError("samples and true graph have different node counts")
    width = int(degs.max()) + 1
    pair, cnt = np.unique(np.arange(n)[None, :] * width + degs, return_counts=True)
    acc = ColumnEntropy(width)
    acc.add_counts(pair % width, cnt / len(samples))
    h = acc.entropies()
    true_deg = g0.simple_degrees()
    if np.ndim(k) == 0:
        return epsilon_from_entropies(h, true_deg, k)
    return {int(kk): epsilon_from_entropies(h, true_deg, kk) for kk in k}


def classes_count(g: Graph, kind: str = "H1") -> int:
    return len(set(_signature_keys(g, kind)))

