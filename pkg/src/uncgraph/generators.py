"""Synthetic graph generators (sparse Erdos-Renyi, power-law configuration model)."""
from __future__ import annotations

import numpy as np

from .graph import Graph
from .rng import check_random_state

__all__ = ["generate_er", "generate_powerlaw", "uniform_pairs"]


def uniform_pairs(n, count, gen, exclude_keys=None):
    """``count`` distinct unordered pairs ``u < v`` drawn uniformly without replacement.

    ``exclude_keys`` (sorted ``u*n+v`` keys) are never returned.
    """
    count = int(count)
    total = n * (n - 1) // 2
    n_excl = 0 if exclude_keys is None else len(exclude_keys)
    if count > total - n_excl:
        raise ValueError(f"cannot draw {count} distinct pairs from {total - n_excl} candidates")
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    if count > 0.3 * (total - n_excl) and total <= 5_000_000:
        # dense regime: enumerate the candidates and pick a subset
        iu, iv = np.triu_indices(n, 1)
        keys = iu.astype(np.int64) * n + iv
        if exclude_keys is not None and len(exclude_keys):
            keys = keys[~np.isin(keys, exclude_keys)]
        pick = np.sort(gen.choice(len(keys), size=count, replace=False))
        keys = keys[pick]
        return np.column_stack([keys // n, keys % n])
    chosen = np.empty(0, dtype=np.int64)
    while len(chosen) < count:
        need = count - len(chosen)
        batch = int(need * 1.1) + 16
        a = gen.integers(0, n, size=batch)
        b = gen.integers(0, n, size=batch)
        ok = a != b
        a, b = a[ok], b[ok]
        keys = np.minimum(a, b) * n + np.maximum(a, b)
        if exclude_keys is not None and len(exclude_keys):
            keys = keys[~np.isin(keys, exclude_keys)]
        # keep first occurrence order so the draw stays uniform and seed-stable
        _, first = np.unique(keys, return_index=True)
        keys = keys[np.sort(first)]
        keys = keys[~np.isin(keys, chosen)]
        chosen = np.concatenate([chosen, keys[:need]])
    chosen = np.sort(chosen)
    return np.column_stack([chosen // n, chosen % n])


def generate_er(n, lam, rng=None) -> Graph:
    """Sparse G(n, p) with ``p = lam / n``.

    The edge count is drawn from its binomial law and the edge set is then a
    uniform subset of that size, which is the same distribution as
    independent per-pair trials.
    """
    n = int(n)
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < lam < n:
        raise ValueError("lambda must satisfy 0 < lambda < n")
    gen = check_random_state(rng)
    total = n * (n - 1) // 2
    m = int(gen.binomial(total, lam / n))
    return Graph(n, uniform_pairs(n, m, gen))


def generate_powerlaw(n, gamma, rng=None, *, max_degree=None) -> Graph:
    """Configuration model with i.i.d. zeta-distributed degrees ``P(k) = k**-gamma / zeta(gamma)``.

    Stubs are paired uniformly; selfloops and parallel edges are discarded.
    """
    n = int(n)
    if gamma <= 2:
        raise ValueError("gamma must exceed 2")
    gen = check_random_state(rng)
    cap = n - 1 if max_degree is None else int(max_degree)
    deg = gen.zipf(gamma, size=n)
    # resample values no simple graph could host
    bad = deg > cap
    while bad.any():
        deg[bad] = gen.zipf(gamma, size=int(bad.sum()))
        bad = deg > cap
    while deg.sum() % 2:
        deg[-1] = gen.zipf(gamma)
        if deg[-1] > cap:
            deg[-1] = 1
    stubs = np.repeat(np.arange(n), deg)
    gen.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    return Graph(n, pairs)
