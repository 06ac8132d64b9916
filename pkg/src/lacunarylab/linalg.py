"""Cyclic Jacobi eigenvalue solver for real symmetric matrices.

Rotations are applied in round-robin (tournament) order: each round annihilates
``n/2`` disjoint off-diagonal pairs at once, which lets numpy apply a whole round
as two batched row updates.  A sweep visits every pair exactly once.
"""

from __future__ import annotations

import numpy as np


class ConvergenceError(RuntimeError):
    pass


def round_robin(n: int) -> list:
    """Rounds of disjoint index pairs covering all ``n(n-1)/2`` pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append((np.array([p for p, _ in pairs], dtype=np.intp),
                       np.array([q for _, q in pairs], dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm_sq(a: np.ndarray) -> float:
    # summed directly: "total minus diagonal" cancels far below the tolerance
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sum(off * off))


def jacobi_eigenvalues(a, tol: float = 1e-12, max_sweeps: int = 64) -> np.ndarray:
    """Ascending eigenvalues of the symmetric matrix ``a``.

    Sweeps stop once the off-diagonal Frobenius norm is at most ``tol`` times the
    full Frobenius norm; :class:`ConvergenceError` is raised after ``max_sweeps``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy()
    scale_sq = float(np.sum(a * a))
    if scale_sq == 0.0:
        return np.zeros(n)
    rounds = round_robin(n)
    for _ in range(max_sweeps):
        if _off_norm_sq(a) <= tol * tol * scale_sq:
            return np.sort(a.diagonal())
        for p, q in rounds:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            active = apq != 0.0
            theta = np.where(active, (aqq - app) / np.where(active, 2.0 * apq, 1.0), 0.0)
            big = np.abs(theta) > 1e150  # theta**2 would overflow; t ~ 1/(2 theta)
            th = np.where(big, 1.0, theta)
            t = np.where(th >= 0, 1.0, -1.0) / (np.abs(th) + np.sqrt(th * th + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            c = c[:, None]
            s = s[:, None]
            # rows, then rows of the transpose: a <- J^T a J
            rp, rq = a[p], a[q]
            a[p], a[q] = c * rp - s * rq, s * rp + c * rq
            a = a.T.copy()
            rp, rq = a[p], a[q]
            a[p], a[q] = c * rp - s * rq, s * rp + c * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
    if _off_norm_sq(a) <= tol * tol * scale_sq:
        return np.sort(a.diagonal())
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
