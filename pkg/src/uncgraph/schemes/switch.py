"""Degree-preserving edge switching."""
from __future__ import annotations

import logging

from ..exceptions import ParameterError
from ..graph import Graph
from ..rng import check_random_state

__all__ = ["edge_switch", "apply_switch", "switch_is_valid"]

logger = logging.getLogger(__name__)

MAX_CONSECUTIVE_FAILURES = 1000


def switch_is_valid(keys: set, n: int, u, v, w, t, *, strict=False) -> bool:
    """Whether ``(u,v),(w,t) -> (u,t),(w,v)`` keeps the graph simple.

    ``keys`` holds ``min*n + max`` for current edges. With ``strict`` the
    pairs ``(u,w)`` and ``(v,t)`` must also be non-edges.
    """
    if len({u, v, w, t}) < 4:
        return False

    def has(a, b):
        return (a * n + b if a < b else b * n + a) in keys

    if has(u, t) or has(w, v):
        return False
    if strict and (has(u, w) or has(v, t)):
        return False
    return True


def apply_switch(g: Graph, i: int, j: int, *, flip: bool = False, strict=False) -> Graph:
    """Switch edges ``i`` and ``j`` of ``g`` (canonical order) deterministically.

    Edge ``i`` is ``(u, v)`` and edge ``j`` is ``(w, t)``, or ``(t, w)`` when
    ``flip`` is set; the result replaces them with ``(u, t), (w, v)``.
    """
    (u, v), (w, t) = g.edges[i].tolist(), g.edges[j].tolist()
    if flip:
        w, t = t, w
    if not switch_is_valid(set(g.edge_keys.tolist()), g.n, u, v, w, t, strict=strict):
        raise ValueError("switch would create a selfloop or an existing edge")
    edges = g.edges.copy()
    edges[i] = (u, t)
    edges[j] = (w, v)
    return Graph(g.n, edges)


def edge_switch(g: Graph, s_switches: int, rng=None, *, strict: bool = False,
                return_count: bool = False):
    """Perform ``s_switches`` random switches on a copy of ``g``.

    Each switch picks two distinct uniform edges ``(u,v), (w,t)`` (the second
    in a random orientation) with four distinct endpoints and
    ``(u,t), (w,v)`` absent, then rewires them. The degree sequence is kept
    exactly. After :data:`MAX_CONSECUTIVE_FAILURES` rejected picks in a row the
    run stops early and the number of completed switches is logged (and
    returned when ``return_count`` is set).
    """
    s_switches = int(s_switches)
    if s_switches < 0:
        raise ParameterError("s_switches must be non-negative")
    gen = check_random_state(rng)
    n, m = g.n, g.m
    edges = g.edges.copy()
    done = 0
    if s_switches and m >= 2:
        keys = set(g.edge_keys.tolist())
        failures = 0
        batch = 4096
        while done < s_switches and failures < MAX_CONSECUTIVE_FAILURES:
            ii = gen.integers(0, m, size=batch).tolist()
            jj = gen.integers(0, m, size=batch).tolist()
            flips = (gen.random(batch) < 0.5).tolist()
            for i, j, flip in zip(ii, jj, flips):
                if done >= s_switches or failures >= MAX_CONSECUTIVE_FAILURES:
                    break
                if i == j:
                    failures += 1
                    continue
                u, v = int(edges[i, 0]), int(edges[i, 1])
                w, t = int(edges[j, 0]), int(edges[j, 1])
                if flip:
                    w, t = t, w
                if not switch_is_valid(keys, n, u, v, w, t, strict=strict):
                    failures += 1
                    continue
                keys.discard(min(u, v) * n + max(u, v))
                keys.discard(min(w, t) * n + max(w, t))
                keys.add(min(u, t) * n + max(u, t))
                keys.add(min(w, v) * n + max(w, v))
                edges[i] = (u, t)
                edges[j] = (w, v)
                done += 1
                failures = 0
    if done < s_switches:
        logger.warning("edge_switch stopped after %d of %d switches (%d failed picks in a row)",
                       done, s_switches, MAX_CONSECUTIVE_FAILURES)
    out = Graph(n, edges)
    return (out, done) if return_count else out
