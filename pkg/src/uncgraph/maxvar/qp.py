"""Degree-constrained minimum-norm quadratic program.

For one augmented subgraph with candidate pairs ``e = (a, b)`` we solve

    minimize  sum_e p_e^2
    s.t.      0 <= p_e <= 1,  sum_{e incident to u} p_e = d_u  for every node u.

Only the degree equalities are dualized. For multipliers ``lam`` the inner
minimization over the box is separable with ``p_e = clip((lam_a + lam_b)/2, 0, 1)``,
and the concave dual

    g(lam) = lam . d + sum_e h(lam_a + lam_b),
    h(s) = 0 (s <= 0),  -s^2/4 (0 < s < 2),  1 - s (s >= 2)

is maximized by a semismooth Newton method: the generalized Hessian is
``-1/2 M_F M_F^T`` over the free pairs ``F`` (a signless Laplacian), solved
by conjugate gradients with a small Levenberg-Marquardt shift and an Armijo
backtracking line search. The dual gradient is the degree residual
``d - M p``, so the primal iterate is feasible exactly at convergence.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, lsqr

from .potential import AugmentedSubgraph

__all__ = ["QPSolution", "solve_qp", "solve_degree_qp", "tv_upper_bound_maxvar"]

logger = logging.getLogger(__name__)


@dataclass
class QPSolution:
    """Result of :func:`solve_qp`.

    ``p`` is ordered like ``AugmentedSubgraph.all_pairs()``. ``converged`` is
    False when ``max_iter`` ran out; ``p`` is then pulled towards the feasible
    start until the degree residual is within ``tol``.
    """

    pairs: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)

    @property
    def total_variance(self) -> float:
        return float(np.sum(self.p * (1.0 - self.p)))


def tv_upper_bound_maxvar(m, n_p) -> float:
    """``m n_p / (m + n_p)``; zero when either count is zero."""
    m, n_p = float(m), float(n_p)
    if m < 0 or n_p < 0:
        raise ValueError("m and n_p must be non-negative")
    if m + n_p == 0:
        return 0.0
    return m * n_p / (m + n_p)


def _dual_value(lam, a, b, d):
    s = lam[a] + lam[b]
    h = np.where(s <= 0, 0.0, np.where(s >= 2, 1.0 - s, -0.25 * s * s))
    return float(lam @ d + h.sum())


def _polish(M, d, p, eta):
    """Minimum-norm solution on the face where ``p`` rounds to its bounds.

    Pairs within ``eta`` of 0 or 1 are fixed there; the rest solve
    ``M_F p_F = d - M_U 1`` with least norm, which is the exact optimum when
    the face is the optimal one.
    """
    upper = p >= 1.0 - eta
    free = (p > eta) & ~upper
    rhs = d - M[:, upper] @ np.ones(int(upper.sum()))
    q = upper.astype(float)
    if free.any():
        Mf = M[:, free]
        sol = lsqr(Mf, rhs, atol=1e-15, btol=1e-15, iter_lim=20 * Mf.shape[1] + 100)[0]
        if sol.min(initial=0.5) < -1e-12 or sol.max(initial=0.5) > 1 + 1e-12:
            return None
        q[free] = np.clip(sol, 0.0, 1.0)
    return q


def _polish_certified(M, d, p, dual_value, tol):
    """Try a few rounding thresholds; keep a polished point only if it is
    feasible and its objective is within a small gap of the dual bound."""
    obj_now = float(p @ p)
    for eta in (1e-9, 1e-7, 1e-5, 1e-3):
        q = _polish(M, d, p, eta)
        if q is None:
            continue
        if np.abs(d - M @ q).max() > min(tol, 1e-9):
            continue
        obj = float(q @ q)
        gap = obj - dual_value
        if gap <= 1e-9 * max(1.0, abs(dual_value)) or obj <= obj_now + 1e-12:
            if gap <= max(1e-7, 10 * np.abs(d - M @ p).max()):
                return q
    return None


def solve_degree_qp(n, pairs, d, p_start, *, tol=1e-6, max_iter=None,
                    record=False) -> QPSolution:
    """Solve the box-constrained minimum-norm degree QP on explicit pairs.

    Parameters
    ----------
    n : int
        Number of nodes.
    pairs : ndarray of shape (k, 2)
    d : ndarray of shape (n,)
        Required sums of ``p`` at each node.
    p_start : ndarray of shape (k,)
        A feasible point; the fallback when the solver stops early.
    tol : float
        Bound on ``max_u |sum p - d_u|`` at termination.
    max_iter : int, optional
        Newton iterations; defaults to ``50 * k`` capped at 500.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    d = np.asarray(d, dtype=float)
    p_start = np.asarray(p_start, dtype=float)
    k = len(pairs)
    if max_iter is None:
        max_iter = min(50 * max(k, 1), 500)
    if k == 0:
        return QPSolution(pairs, np.zeros(0), 0.0, float(np.abs(d).max(initial=0.0)), 0, True)
    a, b = pairs[:, 0], pairs[:, 1]
    rows = np.concatenate([a, b])
    cols = np.concatenate([np.arange(k), np.arange(k)])
    M = sp.csr_matrix((np.ones(2 * k), (rows, cols)), shape=(n, k))
    start_obj = float(p_start @ p_start)

    # multipliers: split each node's degree evenly over its candidate pairs
    cnt = np.bincount(rows, minlength=n).astype(float)
    lam = np.divide(d, cnt, out=np.zeros(n), where=cnt > 0)
    lam *= 1.0 + 1e-3
    history = []
    it = 0
    converged = False
    res_inf = np.inf
    g_val = _dual_value(lam, a, b, d)
    polished = None
    stalled = 0
    for it in range(1, max_iter + 1):
        s = lam[a] + lam[b]
        p = np.clip(0.5 * s, 0.0, 1.0)
        grad = d - M @ p
        res_inf = float(np.abs(grad).max())
        if record:
            history.append((it - 1, res_inf, float(p @ p)))
        if res_inf <= tol:
            converged = True
            it -= 1
            break
        if res_inf < 1e-3:
            q = _polish_certified(M, d, p, g_val, tol)
            if q is not None:
                polished = q
                converged = True
                break
        free = (s > 0) & (s < 2)
        Mf = M[:, free]
        shift = 1e-10 + min(1e-2, 0.1 * res_inf)
        H = (0.5 * (Mf @ Mf.T) + shift * sp.identity(n)).tocsr()
        diag = H.diagonal()
        precond = sp.diags(1.0 / diag)
        step, _ = cg(H, grad, rtol=min(0.1, res_inf), maxiter=200, M=precond)
        slope = float(grad @ step)
        if not np.isfinite(slope) or slope <= 0:
            step, slope = grad, float(grad @ grad)
        # Armijo backtracking on the concave dual
        t = 1.0
        accepted = False
        for _ in range(40):
            cand = lam + t * step
            g_new = _dual_value(cand, a, b, d)
            if g_new >= g_val + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            step = grad
            slope = float(grad @ grad)
            t = 1.0
            for _ in range(60):
                cand = lam + t * step
                g_new = _dual_value(cand, a, b, d)
                if g_new >= g_val + 1e-4 * t * slope:
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
        stalled = stalled + 1 if g_new - g_val <= 1e-15 * max(1.0, abs(g_val)) else 0
        lam, g_val = cand, g_new
        if stalled >= 3:
            break
    p = np.clip(0.5 * (lam[a] + lam[b]), 0.0, 1.0)
    if polished is not None:
        p = polished
    elif converged:
        q = _polish_certified(M, d, p, g_val, tol)
        if q is not None:
            p = q
    res_inf = float(np.abs(d - M @ p).max())
    if res_inf <= tol:
        converged = True
    if not converged:
        # convex blend with the feasible start shrinks the residual linearly
        theta = min(1.0, tol / res_inf) if res_inf > 0 else 1.0
        p = (1.0 - theta) * p_start + theta * p
        if p @ p > start_obj:
            p = p_start.copy()
        res_inf = float(np.abs(d - M @ p).max())
        logger.warning("QP stopped after %d iterations; falling back towards the feasible start", it)
    return QPSolution(pairs, p, float(p @ p), res_inf, it, converged, history)


def solve_qp(sub: AugmentedSubgraph, tol: float = 1e-6, max_iter=None, *,
             record: bool = False) -> QPSolution:
    """Maximize total degree variance of ``sub`` under exact expected degrees.

    Existing edges start at probability 1 and potential edges at 0, which is
    feasible; the optimum of the minimum-norm program above maximizes
    ``sum p (1 - p)`` because ``sum p`` is fixed by the degrees.
    """
    pairs = sub.all_pairs()
    m = sub.graph.m
    p_start = np.concatenate([np.ones(m), np.zeros(sub.n_s)])
    if sub.n_s == 0:
        return QPSolution(pairs, p_start, float(m), 0.0, 0, True)
    return solve_degree_qp(sub.n, pairs, sub.degrees.astype(float), p_start,
                           tol=tol, max_iter=max_iter, record=record)
