"""Parallelogram and Pythagorean structure of the alpha-relative entropy.

Everything here works on :class:`~alphaproj.measures.Density` objects over
a shared space.  The f-divergence brackets ``I_f(A', B') - f(1)`` are all
nonnegative by Jensen, which is what makes the sign statements below work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .divergences import _f_div, _ia_direct, ialpha
from .errors import InfiniteIntegralError, InfiniteTermError
from .measures import (
    Density,
    _norm,
    _tilt,
    as_alpha,
    check_same_space,
)

# Binding behaviour is at lambda -> 0, so the grid is log-spaced there.
DEFAULT_LAMBDA_GRID = (0.0, 1e-4, 1e-3, 1e-2) + tuple(
    round(0.1 * k, 1) for k in range(1, 11)
)


@dataclass(frozen=True)
class SegmentPoint:
    p: Density
    q: Density
    lam: float
    p_lambda: Density


@dataclass(frozen=True)
class PythagoreanReport:
    i_pr: float
    i_pq: float
    i_qr: float

    @property
    def residual(self) -> float:
        """``I(P,R) - I(P,Q) - I(Q,R)``; nan when inf - inf occurs."""
        with np.errstate(invalid="ignore"):
            return float(np.float64(self.i_pr) - self.i_pq - self.i_qr)


def segment_point(p: Density, q: Density, lam: float) -> SegmentPoint:
    check_same_space(p, q)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    v = lam * p.values + (1.0 - lam) * q.values
    return SegmentPoint(p, q, lam, Density(p.space, v))


def _bracket(a: np.ndarray, b: np.ndarray, w: np.ndarray, alpha: float) -> float:
    """``I_f(A', B') - f(1)`` for densities A, B (tilted internally)."""
    sgn = 1.0 if alpha < 1 else -1.0
    return float(_f_div(_tilt(a, w, alpha), _tilt(b, w, alpha), w, alpha)) - sgn


def r_combine(p1: Density, p2: Density, lam: float, a) -> Density:
    """Norm-weighted mixture used in the parallelogram inequality.

    ``[lam p1/||p1|| + (1-lam) p2/||p2||] / [lam/||p1|| + (1-lam)/||p2||]``
    """
    a = as_alpha(a)
    check_same_space(p1, p2)
    w = p1.weights
    n1 = _norm(p1.values, w, a.alpha)
    n2 = _norm(p2.values, w, a.alpha)
    num = lam * p1.values / n1 + (1.0 - lam) * p2.values / n2
    den = lam / n1 + (1.0 - lam) / n2
    return Density(p1.space, num / den)


def minkowski_scale(p1: Density, p2: Density, lam: float, a) -> float:
    """``(lam/||p1|| + (1-lam)/||p2||) * ||r12||``.

    At least 1 for alpha < 1 and at most 1 for alpha > 1.
    """
    a = as_alpha(a)
    check_same_space(p1, p2)
    w = p1.weights
    n1 = _norm(p1.values, w, a.alpha)
    n2 = _norm(p2.values, w, a.alpha)
    # ||r12|| * den is the norm of the unnormalized mixture
    mix = lam * p1.values / n1 + (1.0 - lam) * p2.values / n2
    return float(_norm(mix, w, a.alpha))


@dataclass(frozen=True)
class ParallelogramTerms:
    lhs: float
    rhs: float
    scale: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs


def parallelogram_terms(
    p1: Density, p2: Density, r: Density, lam: float, a
) -> ParallelogramTerms:
    """Both sides of the parallelogram inequality and the Minkowski scalar.

    ``lhs`` is the lambda-weighted combination of the four brackets and
    ``rhs`` is ``I_f(R12', R') - f(1)``.  The proof identity says
    ``lhs == scale * rhs``.
    """
    a = as_alpha(a)
    check_same_space(p1, p2, r)
    w = r.weights
    al = a.alpha
    r12 = r_combine(p1, p2, lam, a).values
    brackets = [
        _bracket(p1.values, r.values, w, al),
        _bracket(p2.values, r.values, w, al),
        _bracket(p1.values, r12, w, al),
        _bracket(p2.values, r12, w, al),
        _bracket(r12, r.values, w, al),
    ]
    if not all(math.isfinite(b) for b in brackets):
        raise InfiniteTermError("an f-divergence bracket is infinite")
    b1r, b2r, b1s, b2s, bsr = brackets
    lhs = lam * b1r + (1.0 - lam) * b2r - lam * b1s - (1.0 - lam) * b2s
    return ParallelogramTerms(lhs, bsr, minkowski_scale(p1, p2, lam, a))


def parallelogram_gap(p1: Density, p2: Density, r: Density, lam: float, a) -> float:
    """LHS - RHS of the parallelogram inequality.

    Nonnegative for alpha < 1, nonpositive for alpha > 1.
    """
    return parallelogram_terms(p1, p2, r, lam, a).gap


def pythagorean_report(p: Density, q: Density, r: Density, a) -> PythagoreanReport:
    a = as_alpha(a)
    check_same_space(p, q, r)
    return PythagoreanReport(ialpha(p, r, a), ialpha(p, q, a), ialpha(q, r, a))


def segment_min_check(
    p: Density,
    q: Density,
    r: Density,
    a,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
    slack: float = 1e-10,
) -> bool:
    """True iff I_alpha(P_lam, R) >= I_alpha(Q, R) - slack on the grid."""
    a = as_alpha(a)
    check_same_space(p, q, r)
    lams = np.asarray(lambda_grid, dtype=float)
    if np.any((lams < 0) | (lams > 1)):
        raise ValueError("lambda grid must lie in [0, 1]")
    seg = lams[:, None] * p.values + (1.0 - lams[:, None]) * q.values
    vals = _ia_direct(seg, r.values[None, :], r.weights, a.alpha)
    base = ialpha(q, r, a)
    return bool(np.min(vals) >= base - slack)


def _directional_parts(q, d, r, w, alpha):
    """s(0), s'(0), t(0), t'(0) for lam -> I_f((Q + lam D)', R')."""
    rho = (1.0 - alpha) / alpha
    sgn = 1.0 if rho > 0 else -1.0
    rt = _tilt(r, w, alpha)
    qt = _tilt(q, w, alpha)
    edge = 0.0 if rho < 0 else np.inf
    with np.errstate(divide="ignore"):
        rfac = np.where(rt > 0, np.power(rt, -rho), edge)
        qfac = np.where(qt > 0, np.power(qt, -rho), edge)

    def integral(f, fac):
        # points where f vanishes contribute nothing, even if fac is inf
        nz = f != 0
        return float(np.sum(f[nz] * fac[nz] * w[nz]))

    s0 = sgn * integral(q, rfac)
    ds0 = sgn * integral(d, rfac)
    tq = float(_norm(q, w, alpha))
    dt0 = integral(d, qfac)
    return s0, ds0, tq, dt0


def _directional_derivative(q, d, r, w, alpha) -> float:
    s0, ds0, t0, dt0 = _directional_parts(q, d, r, w, alpha)
    if not all(math.isfinite(x) for x in (s0, ds0, dt0)) or t0 <= 0:
        raise InfiniteIntegralError("segment derivative integrals are not finite")
    return (t0 * ds0 - s0 * dt0) / (t0 * t0)


def segment_divergence_derivative(p: Density, q: Density, r: Density, a) -> float:
    """d/dlam of I_f(P_lam', R') at lam = 0+, with P_lam = lam P + (1-lam) Q.

    Closed form ``(t(0) s'(0) - s(0) t'(0)) / t(0)**2`` where
    ``s(lam) = sgn(rho) int p_lam (r')**(-rho)`` and ``t(lam) = ||p_lam||``.
    """
    a = as_alpha(a)
    check_same_space(p, q, r)
    return _directional_derivative(
        q.values, p.values - q.values, r.values, r.weights, a.alpha
    )


def segment_f_divergence(p: Density, q: Density, r: Density, lam: float, a) -> float:
    """I_f(P_lam', R') along the segment from Q (lam=0) to P (lam=1)."""
    a = as_alpha(a)
    w = r.weights
    v = lam * p.values + (1.0 - lam) * q.values
    return float(_f_div(_tilt(v, w, a.alpha), _tilt(r.values, w, a.alpha), w, a.alpha))


def segment_projection(p: Density, s: Density, r: Density, a) -> tuple[float, Density]:
    """Minimize I_alpha(., R) over the segment Q = lam P + (1-lam) S.

    Returns ``(lam, Q)``.  The stationary point is found by bracketing the
    root of the closed-form directional derivative, so an interior minimizer
    is located to machine precision.
    """
    a = as_alpha(a)
    check_same_space(p, s, r)
    w = r.weights
    d = p.values - s.values

    def slope(lam):
        q = lam * p.values + (1.0 - lam) * s.values
        return _directional_derivative(q, d, r.values, w, a.alpha)

    lo, hi = 0.0, 1.0
    f_lo, f_hi = slope(lo), slope(hi)
    if f_lo >= 0:
        lam = 0.0
    elif f_hi <= 0:
        lam = 1.0
    else:
        lam = brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return lam, Density(p.space, lam * p.values + (1.0 - lam) * s.values)
