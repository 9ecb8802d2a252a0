"""Small polyhedral toolkit for sets of densities cut by linear constraints.

Feasible sets here are polytopes inside the probability simplex:

    {x >= 0 : A x = b, G x <= h}

Vertices are enumerated exactly with rational arithmetic when the number
of variables is small; larger problems fall back to floating-point LPs.
Also holds the Euclidean projection used by the projected-gradient solver.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

EXACT_LIMIT = 6
FEAS_TOL = 1e-12


def _row_reduce(rows: list[list[Fraction]], ncols: int):
    """In-place Gauss-Jordan on an augmented matrix; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def exact_solve(A, b):
    """Unique exact solution of ``A x = b`` or ``None``.

    ``None`` covers both inconsistent and underdetermined systems.
    """
    n = len(A[0])
    rows = [list(ar) + [br] for ar, br in zip(A, b)]
    pivots = _row_reduce(rows, n)
    k = len(pivots)
    if any(row[n] != 0 for row in rows[k:]):
        return None
    if k < n:
        return None
    return [rows[i][n] for i in range(n)]


def exact_rank(A) -> int:
    if not A:
        return 0
    rows = [list(r) for r in A]
    return len(_row_reduce(rows, len(rows[0])))


def _fractions(M) -> list[list[Fraction]]:
    return [[Fraction(float(v)) for v in row] for row in np.atleast_2d(M)]


def enumerate_vertices_exact(A, b, G, h) -> np.ndarray:
    """All vertices of ``{x >= 0, A x = b, G x <= h}`` in exact arithmetic.

    Every float input is converted to the rational it represents, so the
    answer is exact for the polytope the floats describe.  Returns an array
    of shape ``(k, n)``, empty when the polytope is.
    """
    n = A.shape[1] if A.size else G.shape[1]
    Aq = _fractions(A) if A.size else []
    bq = [Fraction(float(v)) for v in b]
    Gfull = np.vstack([G.reshape(-1, n), -np.eye(n)])
    hfull = np.concatenate([np.asarray(h, dtype=float).ravel(), np.zeros(n)])
    Gq = _fractions(Gfull)
    hq = [Fraction(float(v)) for v in hfull]

    # consistency of the equalities alone
    if Aq:
        rows = [list(ar) + [br] for ar, br in zip(Aq, bq)]
        piv = _row_reduce(rows, n)
        if any(row[n] != 0 for row in rows[len(piv):]):
            return np.empty((0, n))
        rank_a = len(piv)
    else:
        rank_a = 0
    k = n - rank_a
    found = []
    seen = set()
    for S in combinations(range(len(Gq)), k):
        x = exact_solve(Aq + [Gq[i] for i in S], bq + [hq[i] for i in S])
        if x is None:
            continue
        key = tuple(x)
        if key in seen:
            continue
        if all(sum(g * xi for g, xi in zip(row, x)) <= hi for row, hi in zip(Gq, hq)):
            seen.add(key)
            found.append(key)
    found.sort()
    return np.array([[float(v) for v in x] for x in found]).reshape(-1, n)


def lp_feasible_point(A, b, G, h):
    n = A.shape[1] if A.size else G.shape[1]
    res = linprog(
        np.zeros(n),
        A_ub=G if G.size else None,
        b_ub=h if G.size else None,
        A_eq=A if A.size else None,
        b_eq=b if A.size else None,
        bounds=[(0, None)] * n,
        method="highs",
    )
    return res.x if res.status == 0 else None


def lp_vertices(A, b, G, h, rng: np.random.Generator, count: int) -> np.ndarray:
    """Vertices hit by LPs with random objectives (floating point)."""
    n = A.shape[1] if A.size else G.shape[1]
    out = []
    objectives = np.vstack([np.eye(n), -np.eye(n), rng.standard_normal((count, n))])
    for c in objectives:
        res = linprog(
            c,
            A_ub=G if G.size else None,
            b_ub=h if G.size else None,
            A_eq=A if A.size else None,
            b_eq=b if A.size else None,
            bounds=[(0, None)] * n,
            method="highs-ds",
        )
        if res.status == 0:
            out.append(np.maximum(res.x, 0.0))
    if not out:
        return np.empty((0, n))
    V = np.unique(np.round(np.array(out), 12), axis=0)
    return V


def project_polytope(y, x0, A, G, h, max_iter: int = 500):
    """Euclidean projection of ``y`` onto ``{A x = A x0, G x <= h, x >= 0}``.

    Primal active-set method started from the feasible point ``x0``.  The
    equality right-hand side is taken from ``x0`` so drift cannot build up.
    """
    n = y.shape[0]
    Gb = np.vstack([G.reshape(-1, n), -np.eye(n)])
    hb = np.concatenate([np.asarray(h, dtype=float).ravel(), np.zeros(n)])
    m_ineq = G.reshape(-1, n).shape[0]
    x = x0.copy()
    slack = hb - Gb @ x
    work = list(np.flatnonzero(slack <= FEAS_TOL))
    scale = max(1.0, float(np.max(np.abs(y))))
    on_face_min = False
    for _ in range(max_iter):
        M = np.vstack([A, Gb[work]]) if work else A
        lam, *_ = np.linalg.lstsq(M.T, -(x - y), rcond=None)
        d = -((x - y) + M.T @ lam)
        # after an unblocked full step x already minimizes on the working face
        if on_face_min or np.linalg.norm(d) <= 1e-15 * scale:
            on_face_min = False
            mult = lam[A.shape[0]:]
            if not work or mult.min() >= -1e-14 * scale:
                break
            work.pop(int(np.argmin(mult)))
            continue
        Gd = Gb @ d
        slack = hb - Gb @ x
        step = 1.0
        block = None
        for i in np.flatnonzero(Gd > 1e-300):
            if i in work:
                continue
            t = max(slack[i], 0.0) / Gd[i]
            if t < step:
                step, block = t, i
        x = x + step * d
        if block is not None:
            work.append(int(block))
        else:
            on_face_min = True
        # active bounds are exact zeros
        bounds = [i - m_ineq for i in work if i >= m_ineq]
        x[bounds] = 0.0
    return np.maximum(x, 0.0)
