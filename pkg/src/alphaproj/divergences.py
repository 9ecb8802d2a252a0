"""The alpha-relative entropy and the f-divergence it is built from.

With ``rho = (1 - alpha) / alpha`` and ``f(x) = sgn(rho) * x**(1 + rho)``
the f-divergence between tilted densities is

    I_f(P', Q') = sgn(rho) * sum p'**(1+rho) * q'**(-rho) * w

and ``I_alpha(P, Q) = log(sgn(rho) * I_f(P', Q')) / rho``.  Because
``(p')**(1+rho) = p / ||p||`` the same quantity can be evaluated without
tilting ``p`` at all; both routes are exposed so they can be checked
against each other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DeltaTooLargeError,
    NonCountingMeasureError,
    SupportMismatchError,
)
from .measures import (
    Density,
    _norm,
    _tilt,
    as_alpha,
    check_same_space,
    kl_divergence,
    renyi_entropy,
    uniform,
)


class Path(enum.Enum):
    via_f_divergence = "via_f_divergence"
    via_direct_formula = "via_direct_formula"


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    path: Path

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value


# -- array kernels ----------------------------------------------------------

def _neg_power(q: np.ndarray, rho: float, mask: np.ndarray) -> np.ndarray:
    """``q**(-rho)`` restricted to ``mask``, with 0**(-rho) = inf or 0."""
    out = np.zeros_like(q)
    qm = q[mask]
    with np.errstate(divide="ignore"):
        out[mask] = np.power(qm, -rho)
    return out


def _f_div(p, q, w, alpha: float) -> np.ndarray:
    """sgn(rho) * sum p**(1+rho) q**(-rho) w over the last axis."""
    rho = (1.0 - alpha) / alpha
    sgn = 1.0 if rho > 0 else -1.0
    p, q = np.broadcast_arrays(p, q)
    pos = p > 0
    terms = np.zeros(p.shape)
    if rho > 0:
        bad = pos & (q == 0)
        ok = pos & ~bad
        terms[ok] = np.power(p[ok], 1.0 + rho) * np.power(q[ok], -rho)
        terms[bad] = np.inf
    else:
        ok = pos & (q > 0)
        terms[ok] = np.power(p[ok], 1.0 + rho) * np.power(q[ok], -rho)
    return sgn * np.sum(terms * w, axis=-1)


def _from_signed_integral(si, rho: float):
    """Map ``sgn(rho) * I_f`` to ``I_alpha`` with the support conventions."""
    si = np.asarray(si, dtype=float)
    out = np.full(si.shape, np.inf)
    ok = np.isfinite(si) & (si > 0)
    out[ok] = np.log(si[ok]) / rho
    return out


def _ia_via_tilts(p, q, w, alpha: float):
    rho = (1.0 - alpha) / alpha
    sgn = 1.0 if rho > 0 else -1.0
    si = sgn * _f_div(_tilt(p, w, alpha), _tilt(q, w, alpha), w, alpha)
    return _from_signed_integral(si, rho)


def _ia_direct(p, q, w, alpha: float):
    rho = (1.0 - alpha) / alpha
    p, q = np.broadcast_arrays(p, q)
    qt = _tilt(q, w, alpha)
    pos = p > 0
    if rho > 0:
        # p > 0 where q' = 0 sends only that row to +inf
        blown = np.any(pos & (qt == 0), axis=-1)
    else:
        blown = np.zeros(p.shape[:-1], dtype=bool)
    factor = _neg_power(qt, rho, qt > 0)
    si = np.sum(p * factor * w, axis=-1) / _norm(p, w, alpha)
    si = np.where(blown, np.inf, si)
    return _from_signed_integral(si, rho)


# -- public operations ------------------------------------------------------

def f_divergence(p: Density, q: Density, a) -> float:
    """Csiszar f-divergence with ``f(x) = sgn(rho) x**(1+rho)``.

    Inputs need not be probability densities; callers normally pass tilts.
    """
    a = as_alpha(a)
    check_same_space(p, q)
    return float(_f_div(p.values, q.values, p.weights, a.alpha))


def alpha_relative_entropy(p: Density, q: Density, a) -> DivergenceValue:
    """I_alpha(P, Q) computed by tilting both densities first."""
    a = as_alpha(a)
    check_same_space(p, q)
    # identical inputs are exactly zero; the formula leaves ulp noise
    if np.array_equal(p.values, q.values):
        return DivergenceValue(0.0, Path.via_f_divergence)
    v = _ia_via_tilts(p.values, q.values, p.weights, a.alpha)
    return DivergenceValue(float(v), Path.via_f_divergence)


def alpha_relative_entropy_direct(p: Density, q: Density, a) -> DivergenceValue:
    """I_alpha(P, Q) = log(sum (p/||p||) (q')**(-rho) w) / rho."""
    a = as_alpha(a)
    check_same_space(p, q)
    if np.array_equal(p.values, q.values):
        return DivergenceValue(0.0, Path.via_direct_formula)
    v = _ia_direct(p.values, q.values, p.weights, a.alpha)
    return DivergenceValue(float(v), Path.via_direct_formula)


def ialpha(p: Density, q: Density, a) -> float:
    """Shorthand returning the plain float from the default (direct) path."""
    return alpha_relative_entropy_direct(p, q, a).value


def uniform_gap_identity(p: Density, a) -> tuple[float, float]:
    """Return ``(I_alpha(p, U), log n - H_alpha(p))`` on a counting space."""
    if not p.space.is_counting:
        raise NonCountingMeasureError("uniform gap identity needs counting measure")
    a = as_alpha(a)
    lhs = ialpha(p, uniform(p.space), a)
    rhs = math.log(len(p)) - renyi_entropy(p, a)
    return lhs, rhs


def kl_limit_probe(
    p: Density, q: Density, epsilons: Sequence[float]
) -> list[tuple[float, float, float]]:
    """Evaluate I_alpha at ``alpha = 1 - eps`` and ``1 + eps``.

    Returns ``(alpha, I_alpha, |I_alpha - KL|)`` rows, two per epsilon,
    in the order the epsilons were given.
    """
    check_same_space(p, q)
    if np.any(p.support & ~q.support):
        raise SupportMismatchError("limit probe needs supp(p) inside supp(q)")
    kl = kl_divergence(p, q)
    rows = []
    for eps in epsilons:
        if not 1e-5 <= eps <= 0.1:
            raise ValueError(f"epsilon {eps!r} outside [1e-5, 0.1]")
        for alpha in (1.0 - eps, 1.0 + eps):
            v = ialpha(p, q, alpha)
            rows.append((alpha, v, abs(v - kl)))
    return rows


def continuity_probe(p: Density, q: Density, a, delta: float) -> float:
    """Largest change in I_alpha(., q) over coordinate moves of size delta.

    Each perturbation adds ``+delta`` or ``-delta`` to one density value and
    renormalizes.
    """
    check_same_space(p, q)
    a = as_alpha(a)
    if delta == 0:
        return 0.0
    pv = p.values
    if delta < 0 or delta >= pv.min():
        raise DeltaTooLargeError("need 0 < delta < min p_i")
    w = p.weights
    n = pv.shape[0]
    shifts = np.concatenate([np.eye(n), -np.eye(n)]) * delta
    batch = pv + shifts
    batch = batch / (batch @ w)[:, None]
    base = _ia_direct(pv, q.values, w, a.alpha)
    vals = _ia_direct(batch, q.values[None, :], w, a.alpha)
    return float(np.max(np.abs(vals - base)))
