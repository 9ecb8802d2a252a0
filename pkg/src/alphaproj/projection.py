"""Minimum-I_alpha projection onto convex sets cut by linear constraints.

For a reference density ``r`` put ``g = (r / ||r||)**(alpha - 1)``.  Then

    I_alpha(P, R) = log( sum (p / ||p||) * g * w ) / rho

so minimizing I_alpha over a set E is the same as minimizing the smooth
ratio ``J(p) = sgn(rho) * <p, g>_w / ||p||`` (which equals
``I_f(P', R')``).  :func:`project` does that by projected gradient over
the feasible polytope, with several restarts and a Pythagorean
certificate on the answer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import qr

from .divergences import _ia_via_tilts, ialpha
from .errors import (
    AllDivergencesInfiniteError,
    InfeasibleError,
    NotNestedError,
    ParseError,
    SupportTooLargeError,
)
from .geometry import pythagorean_report
from .measures import Density, WeightedSpace, _norm, as_alpha, check_same_space
from .polytope import (
    EXACT_LIMIT,
    enumerate_vertices_exact,
    lp_feasible_point,
    lp_vertices,
    project_polytope,
)

CONSTRAINT_TOL = 1e-9


@dataclass(frozen=True)
class LinearConstraint:
    """``sum_i statistic_i * p_i * w_i`` compared against ``target``."""

    statistic: np.ndarray
    target: float

    def __post_init__(self):
        s = np.array(self.statistic, dtype=float)
        if s.ndim != 1 or not np.all(np.isfinite(s)):
            raise ValueError("statistic must be a finite 1-D vector")
        t = float(self.target)
        if not math.isfinite(t):
            raise ValueError("target must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "statistic", s)
        object.__setattr__(self, "target", t)

    def same_as(self, other: "LinearConstraint") -> bool:
        return self.target == other.target and np.array_equal(
            self.statistic, other.statistic
        )


def _as_constraints(items) -> tuple[LinearConstraint, ...]:
    out = []
    for it in items:
        if isinstance(it, LinearConstraint):
            out.append(it)
        elif isinstance(it, dict):
            out.append(LinearConstraint(it["statistic"], it.get("target", it.get("bound"))))
        else:
            stat, target = it
            out.append(LinearConstraint(stat, target))
    return tuple(out)


class ConstraintSet:
    """Convex set of probability densities defined by linear moments.

    Equalities read ``sum T_j(x_i) p_i w_i = t_j``, inequalities
    ``sum T_j(x_i) p_i w_i <= t_j``, and ``zero_support`` lists point
    indices forced to zero density.  Infeasible sets are rejected.
    """

    def __init__(self, space: WeightedSpace, equalities=(), inequalities=(), zero_support=()):
        self.space = space
        self.equalities = _as_constraints(equalities)
        self.inequalities = _as_constraints(inequalities)
        n = len(space)
        for c in self.equalities + self.inequalities:
            if c.statistic.shape[0] != n:
                raise ValueError(f"statistic has length {c.statistic.shape[0]}, space has {n}")
        zs = sorted({int(i) for i in zero_support})
        if zs and (zs[0] < 0 or zs[-1] >= n):
            raise ValueError("zero_support index out of range")
        self.zero_support = tuple(zs)
        self._vertices = None
        if len(zs) == n or self.vertices().shape[0] == 0:
            raise InfeasibleError("infeasible: constraint set is empty")

    def __repr__(self) -> str:
        return (
            f"ConstraintSet(n={len(self.space)}, eq={len(self.equalities)}, "
            f"ineq={len(self.inequalities)}, zero={list(self.zero_support)})"
        )

    @property
    def free(self) -> np.ndarray:
        mask = np.ones(len(self.space), dtype=bool)
        mask[list(self.zero_support)] = False
        return mask

    def system(self):
        """``(A, b, G, h)`` over the free coordinates, mass row first."""
        w = self.space.mu_weights[self.free]
        f = self.free
        A = np.vstack([w] + [c.statistic[f] * w for c in self.equalities])
        b = np.array([1.0] + [c.target for c in self.equalities])
        G = np.array([c.statistic[f] * w for c in self.inequalities]).reshape(-1, f.sum())
        h = np.array([c.target for c in self.inequalities])
        return A, b, G, h

    def vertices(self) -> np.ndarray:
        """Vertices as full-length density vectors (exact when small)."""
        if self._vertices is None:
            A, b, G, h = self.system()
            nf = int(self.free.sum())
            if nf == 0:
                V = np.empty((0, 0))
            elif nf <= EXACT_LIMIT:
                V = enumerate_vertices_exact(A, b, G, h)
            else:
                x = lp_feasible_point(A, b, G, h)
                if x is None:
                    V = np.empty((0, nf))
                else:
                    rng = np.random.default_rng(0)
                    V = lp_vertices(A, b, G, h, rng, count=4 * nf)
            full = np.zeros((V.shape[0], len(self.space)))
            if V.shape[0]:
                full[:, self.free] = V
            full.setflags(write=False)
            self._vertices = full
        return self._vertices

    def barycenter(self) -> np.ndarray:
        return self.vertices().mean(axis=0)

    def violation(self, p: np.ndarray) -> float:
        """Largest constraint violation of a density vector."""
        w = self.space.mu_weights
        worst = abs(float(p @ w) - 1.0)
        worst = max(worst, float(-min(p.min(), 0.0)))
        for c in self.equalities:
            worst = max(worst, abs(float(c.statistic @ (p * w)) - c.target))
        for c in self.inequalities:
            worst = max(worst, float(c.statistic @ (p * w)) - c.target)
        if self.zero_support:
            worst = max(worst, float(np.abs(p[list(self.zero_support)]).max()))
        return worst

    def contains(self, p, tol: float = CONSTRAINT_TOL) -> bool:
        v = p.values if isinstance(p, Density) else np.asarray(p, dtype=float)
        return self.violation(v) <= tol

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """``k`` feasible densities: Dirichlet(1) mixtures of the vertices."""
        V = self.vertices()
        if V.shape[0] == 1:
            return np.repeat(V, k, axis=0)
        theta = rng.dirichlet(np.ones(V.shape[0]), size=k)
        P = np.maximum(theta @ V, 0.0)
        keep = [i for i in range(k) if self.contains(P[i])]
        return P[keep]

    def restrict(self, equalities=(), inequalities=(), zero_support=()) -> "ConstraintSet":
        """Subset obtained by adding constraints."""
        return ConstraintSet(
            self.space,
            self.equalities + _as_constraints(equalities),
            self.inequalities + _as_constraints(inequalities),
            self.zero_support + tuple(zero_support),
        )

    def includes_constraints_of(self, other: "ConstraintSet") -> bool:
        """True when every constraint of ``other`` also appears here."""
        if self.space != other.space:
            return False
        for mine, theirs in ((self.equalities, other.equalities), (self.inequalities, other.inequalities)):
            for c in theirs:
                if not any(c.same_as(m) for m in mine):
                    return False
        return set(other.zero_support) <= set(self.zero_support)

    def to_dict(self) -> dict:
        return {
            "equalities": [
                {"statistic": c.statistic.tolist(), "target": c.target} for c in self.equalities
            ],
            "inequalities": [
                {"statistic": c.statistic.tolist(), "target": c.target} for c in self.inequalities
            ],
            "zero_support": list(self.zero_support),
        }

    @classmethod
    def from_dict(cls, space: WeightedSpace, data: dict) -> "ConstraintSet":
        allowed = {"equalities", "inequalities", "zero_support"}
        extra = set(data) - allowed
        if extra:
            raise ParseError(f"unknown constraint keys: {sorted(extra)}")
        try:
            eqs = [_constraint_from_json(d, "target") for d in data.get("equalities", [])]
            ineqs = [_constraint_from_json(d, "target") for d in data.get("inequalities", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad constraint entry: {exc}") from exc
        zero = data.get("zero_support", [])
        idx = []
        for z in zero:
            if isinstance(z, int) and not isinstance(z, bool):
                idx.append(z)
            else:
                try:
                    idx.append(list(space.points).index(z))
                except ValueError:
                    raise ParseError(f"zero_support: unknown point {z!r}") from None
        return cls(space, eqs, ineqs, idx)

    @classmethod
    def from_json(cls, space: WeightedSpace, text: str) -> "ConstraintSet":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"constraints: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError("constraints: top level must be an object")
        return cls.from_dict(space, data)


def _constraint_from_json(d: dict, key: str) -> LinearConstraint:
    if not isinstance(d, dict):
        raise TypeError("each constraint must be an object")
    extra = set(d) - {"statistic", key, "bound"}
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)}")
    target = d[key] if key in d else d["bound"]
    stat = np.asarray(d["statistic"], dtype=float)
    if not np.all(np.isfinite(stat)) or not math.isfinite(float(target)):
        raise ValueError("non-finite number")
    return LinearConstraint(stat, target)


# -- solver -----------------------------------------------------------------

@dataclass
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 100_000
    n_restarts: int = 16
    n_cert: int = 200
    seed: int = 0
    armijo: float = 1e-4
    backtrack: float = 0.5
    window: int = 10


@dataclass(frozen=True)
class ProjectionResult:
    q: Density
    value: float
    iterations: int
    converged: bool
    certificate_residuals: tuple[tuple[int, float], ...]
    restarts_agreement: float
    restart_values: tuple[float, ...] = field(default=())
    stationarity: float = 0.0

    @property
    def worst_certificate(self) -> float:
        if not self.certificate_residuals:
            return math.inf
        return min(r for _, r in self.certificate_residuals)

    def to_dict(self) -> dict:
        return {
            "q": [float(f"{v:.17g}") for v in self.q.values],
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "stationarity": self.stationarity,
            "restarts_agreement": self.restarts_agreement,
            "worst_certificate_residual": self.worst_certificate,
            "n_certificates": len(self.certificate_residuals),
            "restart_values": list(self.restart_values),
        }


def objective_transform(r: Density, a) -> np.ndarray:
    """``g = (r / ||r||)**(alpha - 1)`` per point.

    Where ``r`` vanishes the entry is 0 for alpha > 1 and ``inf`` for
    alpha < 1; the latter forces ``p = 0`` there in any finite solution.
    """
    a = as_alpha(a)
    rv = r.values
    nr = float(_norm(rv, r.weights, a.alpha))
    g = np.zeros_like(rv)
    pos = rv > 0
    g[pos] = np.power(rv[pos] / nr, a.alpha - 1.0)
    if a.alpha < 1:
        g[~pos] = np.inf
    return g


def ratio_objective(p: np.ndarray, g: np.ndarray, w: np.ndarray, a) -> float:
    """``sgn(rho) * <p, g>_w / ||p||``, i.e. ``I_f(P', R')``."""
    a = as_alpha(a)
    pos = p > 0
    lin = float(np.sum(p[pos] * g[pos] * w[pos]))
    return a.sign_rho * lin / float(_norm(p, w, a.alpha))


class _Problem:
    """Reduced-coordinate view of one projection instance."""

    def __init__(self, r: Density, e: ConstraintSet, a):
        self.a = a
        self.alpha = a.alpha
        self.sgn = float(a.sign_rho)
        self.space = r.space
        g_full = objective_transform(r, a)
        if a.alpha < 1:
            extra = np.flatnonzero(r.values == 0)
            try:
                e = e.restrict(zero_support=extra) if extra.size else e
            except InfeasibleError:
                raise AllDivergencesInfiniteError(
                    "no feasible density is supported inside supp(r)"
                ) from None
        V = e.vertices()
        # coordinates that vanish on every vertex vanish on all of E
        live = np.any(V > 0, axis=0)
        if a.alpha > 1 and not np.any(V[:, r.values > 0] > 0):
            raise AllDivergencesInfiniteError("every feasible density misses supp(r)")
        self.e = e
        self.idx = np.flatnonzero(live)
        w = r.weights
        self.w = w[self.idx]
        self.g = g_full[self.idx]
        self.gw = self.g * self.w
        self.V = V[:, self.idx]
        A, b, G, h = e.system()
        # map from e.free to live columns
        cols = np.flatnonzero(e.free)
        keep = np.isin(cols, self.idx)
        self.A = A[:, keep]
        self.G = G[:, keep]
        self.h = h

    def full(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(len(self.space))
        out[self.idx] = x
        return out

    def value(self, x: np.ndarray) -> float:
        lin = float(self.gw @ x)
        return self.sgn * lin / float(_norm(x, self.w, self.alpha))

    def grad(self, x: np.ndarray) -> np.ndarray:
        al = self.alpha
        lin = float(self.gw @ x)
        s = float(np.sum(np.power(x, al) * self.w))
        nrm = s ** (1.0 / al)
        with np.errstate(divide="ignore"):
            dn = nrm / s * np.power(x, al - 1.0) * self.w
        return self.sgn * (self.gw / nrm - lin * dn / (nrm * nrm))

    def solve(self, x0: np.ndarray, opts: SolverOptions):
        """Projected gradient with Barzilai-Borwein steps and Armijo search."""
        x = x0.copy()
        interior = self.alpha < 1
        f = self.value(x)
        gr = self.grad(x)
        step = 1.0 / max(float(np.max(np.abs(gr))), 1e-12)
        history = [f]
        stat = math.inf
        it = 0
        for it in range(1, opts.max_iter + 1):
            xp = project_polytope(x - step * gr, x, self.A, self.G, self.h)
            d = xp - x
            stat = float(np.linalg.norm(d)) / step
            if stat <= opts.tol and len(history) > opts.window:
                old = history[-opts.window - 1]
                if abs(f - old) <= opts.tol * max(1.0, abs(f)):
                    break
            if not np.any(d):
                break
            slope = float(gr @ d)
            t = 1.0
            while True:
                xn = x + t * d
                ok = not interior or np.all(xn > 0)
                if ok:
                    fn = self.value(xn)
                    if fn <= f + opts.armijo * t * slope:
                        break
                t *= opts.backtrack
                if t < 1e-20:
                    xn, fn = x, f
                    break
            if xn is x:
                # no descent possible along the projected direction
                break
            gn = self.grad(xn)
            dx = xn - x
            dg = gn - gr
            curv = float(dx @ dg)
            step = float(dx @ dx) / curv if curv > 0 else step * 2.0
            step = min(max(step, 1e-12), 1e12)
            x, f, gr = xn, fn, gn
            history.append(f)
        converged = stat <= opts.tol
        return x, f, it, converged, stat

    def initial_points(self, rng: np.random.Generator, k: int) -> list[np.ndarray]:
        V = self.V
        pts = [V.mean(axis=0)]
        if k > 1:
            theta = rng.dirichlet(np.ones(V.shape[0]), size=k - 1)
            pts.extend(theta @ V)
        return pts


def _tv(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(x - y) * w))


def _max_pairwise_tv(X: Sequence[np.ndarray], w: np.ndarray) -> float:
    worst = 0.0
    for i, j in combinations(range(len(X)), 2):
        worst = max(worst, _tv(X[i], X[j], w))
    return worst


def _solve_all(r: Density, e: ConstraintSet, a, opts: SolverOptions, n_starts: int):
    prob = _Problem(r, e, a)
    rng = np.random.default_rng(opts.seed)
    runs = []
    for x0 in prob.initial_points(rng, n_starts):
        if prob.V.shape[0] == 1:
            runs.append((x0, prob.value(x0), 0, True, 0.0))
        else:
            runs.append(prob.solve(x0, opts))
    return prob, runs


def certificate_residuals(
    q: Density, r: Density, e: ConstraintSet, a, n_samples: int, rng: np.random.Generator
) -> list[tuple[int, float]]:
    """Pythagorean residuals at sampled feasible P, then at every vertex.

    Sample ids count the random samples first; vertex ids follow.
    """
    P = e.sample(rng, n_samples)
    P = np.vstack([P, e.vertices()])
    out = []
    for i, pv in enumerate(P):
        rep = pythagorean_report(Density(q.space, pv), q, r, a)
        out.append((i, rep.residual))
    return out


def project(r: Density, e: ConstraintSet, a, opts: SolverOptions | None = None) -> ProjectionResult:
    """I_alpha-projection of ``r`` onto ``e``.

    Runs ``opts.n_restarts`` projected-gradient solves (barycenter first,
    then Dirichlet mixtures of the vertices), keeps the best, and attaches
    Pythagorean certificate residuals on ``opts.n_cert`` feasible samples
    plus all vertices.
    """
    a = as_alpha(a)
    opts = opts or SolverOptions()
    if r.space != e.space:
        raise ValueError("reference density and constraint set use different spaces")
    prob, runs = _solve_all(r, e, a, opts, max(1, opts.n_restarts))
    best = min(range(len(runs)), key=lambda i: (runs[i][1], i))
    x, f, _, conv, stat = runs[best]
    q = Density(r.space, prob.full(x))
    value = ialpha(q, r, a)
    agreement = _max_pairwise_tv([run[0] for run in runs], prob.w)
    rng = np.random.default_rng([opts.seed, 1])
    certs = certificate_residuals(q, r, e, a, opts.n_cert, rng)
    return ProjectionResult(
        q=q,
        value=value,
        iterations=sum(run[2] for run in runs),
        converged=bool(conv),
        certificate_residuals=tuple(certs),
        restarts_agreement=agreement,
        restart_values=tuple(math.log(prob.sgn * run[1]) / a.rho for run in runs),
        stationarity=stat,
    )


def uniqueness_probe(r: Density, e: ConstraintSet, a, n_restarts: int = 16, seed: int = 0) -> float:
    """Max pairwise TV distance between solutions from random starts."""
    a = as_alpha(a)
    opts = SolverOptions(seed=seed)
    prob, runs = _solve_all(r, e, a, opts, n_restarts)
    return _max_pairwise_tv([run[0] for run in runs], prob.w)


# -- brute-force oracle -----------------------------------------------------

def _slice_parametrization(e: ConstraintSet, live: np.ndarray):
    """Split live masses into grid coordinates and solved-for coordinates."""
    n = int(live.sum())
    M = np.vstack([np.ones(n)] + [c.statistic[live] for c in e.equalities])
    t = np.array([1.0] + [c.target for c in e.equalities])
    _, R, piv = qr(M, pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > 1e-12 * max(diag.max(), 1.0)))
    dep = np.sort(piv[:rank])
    grid = np.array([j for j in range(n) if j not in set(dep)], dtype=int)
    return M, t, dep, grid


def _grid_points(lo: np.ndarray, hi: np.ndarray, step: float) -> np.ndarray:
    axes = [np.arange(round((h - l) / step) + 1) * step + l for l, h in zip(lo, hi)]
    if not axes:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _best_of(P: np.ndarray, vals: np.ndarray):
    vmin = vals.min()
    tied = np.flatnonzero(vals == vmin)
    if tied.size > 1:
        order = np.lexsort(P[tied].T[::-1])
        return P[tied[order[0]]], vmin
    return P[tied[0]], vmin


class _Face:
    """Grid search on the face of E where the ``zero`` coordinates vanish."""

    def __init__(self, r: Density, e: ConstraintSet, a, zero: tuple[int, ...]):
        self.r, self.alpha = r, a.alpha
        self.w = r.weights
        live = e.free.copy()
        live[list(zero)] = False
        self.live = live
        self.M, self.t, self.dep, self.gcols = _slice_parametrization(e, live)
        self.Md = self.M[:, self.dep]
        self.Mg = self.M[:, self.gcols]
        self.ineq = np.array([c.statistic[live] for c in e.inequalities]).reshape(-1, int(live.sum()))
        self.ineq_t = np.array([c.target for c in e.inequalities])

    @property
    def dim(self) -> int:
        return self.gcols.size

    def evaluate(self, G: np.ndarray):
        rhs = self.t[:, None] - self.Mg @ G.T
        D = np.linalg.lstsq(self.Md, rhs, rcond=None)[0].T
        m = np.zeros((G.shape[0], int(self.live.sum())))
        m[:, self.gcols] = G
        m[:, self.dep] = D
        ok = np.all(m >= -1e-12, axis=1)
        ok &= np.abs(m @ self.M.T - self.t).max(axis=1, initial=0.0) <= 1e-9
        if self.ineq.size:
            ok &= np.all(m @ self.ineq.T <= self.ineq_t + 1e-12, axis=1)
        m = np.maximum(m[ok], 0.0)
        P = np.zeros((m.shape[0], len(self.w)))
        P[:, self.live] = m / self.w[self.live]
        vals = _ia_via_tilts(P, self.r.values[None, :], self.w, self.alpha)
        return P, vals

    def coords(self, p: np.ndarray) -> np.ndarray:
        return (p[self.live] * self.w[self.live])[self.gcols]

    def coarse(self, step: float):
        k = self.dim
        G = _grid_points(np.zeros(k), np.ones(k), step)
        if k:
            G = G[G.sum(axis=1) <= 1.0 + 1e-12]
        P, vals = self.evaluate(G)
        if P.shape[0] == 0:
            return None
        return _best_of(P, vals)

    def refine(self, p_best, v_best, step: float, refine_to: float):
        while self.dim and step > refine_to * (1 + 1e-9):
            new = max(step / 10.0, refine_to)
            # recentre until the incumbent is no longer on the window edge
            for _ in range(100):
                centre = self.coords(p_best)
                half = 5 * step
                lo = centre - np.floor(np.minimum(half, centre) / new) * new
                hi = centre + np.floor(np.minimum(half, 1.0 - centre) / new) * new
                P, vals = self.evaluate(_grid_points(lo, hi, new))
                if P.shape[0] == 0:
                    break
                cand, v = _best_of(P, vals)
                if v >= v_best:
                    break
                p_best, v_best = cand, v
                moved = self.coords(cand)
                edge = np.any(np.isclose(moved, lo) & (lo > 0)) or np.any(
                    np.isclose(moved, hi) & (hi < 1)
                )
                if not edge:
                    break
            step = new
        return p_best, v_best


def brute_force_project(
    r: Density,
    e: ConstraintSet,
    a,
    grid_step: float,
    refine_to: float | None = None,
) -> Density:
    """Exhaustive grid search for the I_alpha-projection (testing oracle).

    Every face of the feasible polytope (each choice of coordinates pinned
    to zero) is searched separately.  On a face, point masses ``p_i w_i``
    are gridded with spacing ``grid_step`` on the free coordinates of the
    affine slice cut by the equalities and the rest are solved for.  With
    ``refine_to`` the incumbent's face is refined by factors of ten in a
    window around it.  Divergences use the tilted f-divergence route; ties
    go to the lexicographically smallest density vector.
    """
    a = as_alpha(a)
    if len(r.space) > 4:
        raise SupportTooLargeError("brute force is limited to 4 points")
    if grid_step < 1e-5 or (refine_to is not None and refine_to < 1e-5):
        raise ValueError("grid step must be >= 1e-5")
    check_same_space(r, Density(e.space, e.barycenter()))
    free = [int(i) for i in np.flatnonzero(e.free)]
    found = []
    for k in range(len(free)):
        for zero in combinations(free, k):
            face = _Face(r, e, a, zero)
            hit = face.coarse(grid_step)
            if hit is None:
                continue
            if refine_to is not None:
                hit = face.refine(hit[0], hit[1], grid_step, refine_to)
            found.append(hit)
    if not found:
        raise InfeasibleError("no grid point is feasible")
    P = np.array([f[0] for f in found])
    vals = np.array([f[1] for f in found])
    return Density(r.space, _best_of(P, vals)[0])


# -- characterization and iterated projections ------------------------------

def projection_characterization_check(
    q: Density, r: Density, e: ConstraintSet, a, n_samples: int = 200, seed: int = 0
) -> float:
    """Worst Pythagorean residual over feasible samples and all vertices.

    ``q`` is accepted as the projection when the result is >= -1e-6.
    """
    a = as_alpha(a)
    if not e.contains(q):
        raise InfeasibleError("q is not in the constraint set")
    rng = np.random.default_rng(seed)
    res = certificate_residuals(q, r, e, a, n_samples, rng)
    vals = [v for _, v in res if not math.isnan(v)]
    return min(vals) if vals else math.inf


@dataclass(frozen=True)
class IteratedProjection:
    q: Density
    q1: Density
    q1_direct: Density
    tv_gap: float


def iterated_projection_check(
    r: Density, e: ConstraintSet, e1: ConstraintSet, a, opts: SolverOptions | None = None
) -> IteratedProjection:
    """Compare proj(R, E1) with proj(proj(R, E), E1) for nested E1 <= E."""
    a = as_alpha(a)
    if not e1.includes_constraints_of(e):
        raise NotNestedError("E1 must carry every constraint of E")
    q = project(r, e, a, opts).q
    q1 = project(r, e1, a, opts).q
    q1d = project(q, e1, a, opts).q
    return IteratedProjection(q, q1, q1d, _tv(q1.values, q1d.values, r.weights))


def moment_set(space: WeightedSpace, statistics: Iterable[Sequence[float]], targets: Iterable[float]) -> ConstraintSet:
    """Affine family ``{P : E_P[T_j] = t_j}``."""
    return ConstraintSet(space, list(zip(statistics, targets)))
