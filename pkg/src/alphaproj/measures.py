"""Probability measures on a finite weighted support.

A :class:`WeightedSpace` stands in for the dominating measure: each atom
carries a positive weight (1 for counting measure, a cell volume for a
grid).  A :class:`Density` is a nonnegative vector over such a space, so
every integral ``int f dmu`` becomes ``sum(f * weights)``.

Conventions: natural logarithms, ``0**a == 0`` for ``a > 0`` and
``0 * log 0 == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AllZeroError,
    AlphaError,
    LengthMismatchError,
    MassError,
    NegativeValueError,
    SpaceMismatchError,
)

TOL_MASS = 1e-12
RENORMALIZE_LIMIT = 1e-9
ALPHA_GUARD = 1e-6


def _readonly(x: np.ndarray) -> np.ndarray:
    x.setflags(write=False)
    return x


class WeightedSpace:
    """Finite point set with strictly positive reference weights.

    ``points`` is either a sequence of hashable labels or a numeric array
    of coordinates with shape ``(N,)`` or ``(N, d)``.  In the latter case
    the coordinates are available as :attr:`coords` (always 2-D).
    """

    __slots__ = ("points", "mu_weights", "coords")

    def __init__(self, points, mu_weights=None):
        coords = None
        if isinstance(points, np.ndarray) and points.dtype.kind in "fiu":
            coords = np.asarray(points, dtype=float)
            if coords.ndim == 1:
                coords = coords[:, None]
            if coords.ndim != 2:
                raise LengthMismatchError("coordinate array must be 1-D or 2-D")
            if not np.all(np.isfinite(coords)):
                raise NegativeValueError("coordinates must be finite")
            n = coords.shape[0]
            if n and np.unique(coords, axis=0).shape[0] != n:
                raise ValueError("point coordinates are not unique")
            pts = coords
        else:
            pts = tuple(points)
            n = len(pts)
            if len(set(pts)) != n:
                raise ValueError("point labels are not unique")
        if n < 1:
            raise LengthMismatchError("a space needs at least one point")
        if mu_weights is None:
            w = np.ones(n)
        else:
            w = np.array(mu_weights, dtype=float)
        if w.shape != (n,):
            raise LengthMismatchError(f"{n} points but {w.size} weights")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise NegativeValueError("mu_weights must be finite and > 0")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mu_weights", _readonly(w))
        object.__setattr__(
            self, "coords", None if coords is None else _readonly(coords)
        )

    def __setattr__(self, name, value):
        raise AttributeError("WeightedSpace is immutable")

    def __len__(self) -> int:
        return self.mu_weights.shape[0]

    def __repr__(self) -> str:
        kind = "coords" if self.coords is not None else "labels"
        return f"WeightedSpace(n={len(self)}, {kind})"

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, WeightedSpace) or len(self) != len(other):
            return False
        if not np.array_equal(self.mu_weights, other.mu_weights):
            return False
        if (self.coords is None) != (other.coords is None):
            return False
        if self.coords is not None:
            return np.array_equal(self.coords, other.coords)
        return self.points == other.points

    __hash__ = object.__hash__

    @classmethod
    def counting(cls, n: int) -> "WeightedSpace":
        """Counting measure on the labels ``0, ..., n-1``."""
        return cls(range(n))

    @property
    def is_counting(self) -> bool:
        return bool(np.all(self.mu_weights == 1.0))


@dataclass(frozen=True, eq=False)
class Density:
    """Nonnegative density over a :class:`WeightedSpace`.

    With ``probability=True`` (the default) the weighted mass must be one.
    A drift up to ``1e-9`` is renormalized away; anything larger raises
    :class:`MassError`.
    """

    space: WeightedSpace
    values: np.ndarray
    probability: bool = True
    mass: float = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.shape[0] != len(self.space):
            raise LengthMismatchError(
                f"density has {v.size} values for a space of {len(self.space)}"
            )
        if not np.all(np.isfinite(v)):
            raise NegativeValueError("density values must be finite")
        if np.any(v < 0):
            raise NegativeValueError("density values must be >= 0")
        m = float(np.dot(v, self.space.mu_weights))
        if self.probability:
            if m <= 0:
                raise AllZeroError("density is identically zero")
            drift = abs(m - 1.0)
            if drift > RENORMALIZE_LIMIT:
                raise MassError(f"mass {m!r} is not 1")
            if drift > TOL_MASS:
                v = v / m
                m = float(np.dot(v, self.space.mu_weights))
        object.__setattr__(self, "values", _readonly(v))
        object.__setattr__(self, "mass", m)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return self.space.mu_weights

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of points with strictly positive density."""
        return self.values > 0

    def masses(self) -> np.ndarray:
        """Point masses ``p_i * w_i``."""
        return self.values * self.space.mu_weights


@dataclass(frozen=True)
class AlphaParam:
    """Order ``alpha`` together with ``rho = (1 - alpha) / alpha``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (math.isfinite(a) and a > 0):
            raise AlphaError(f"alpha must be in (0, inf), got {self.alpha!r}")
        if abs(a - 1.0) < ALPHA_GUARD:
            raise AlphaError(
                f"alpha={a!r} is within {ALPHA_GUARD:g} of 1; use kl_divergence"
            )
        object.__setattr__(self, "alpha", a)

    @property
    def rho(self) -> float:
        return (1.0 - self.alpha) / self.alpha

    @property
    def sign_rho(self) -> int:
        return 1 if self.alpha < 1 else -1

    def __float__(self) -> float:
        return self.alpha


def as_alpha(a) -> AlphaParam:
    return a if isinstance(a, AlphaParam) else AlphaParam(a)


def check_same_space(*densities: Density) -> WeightedSpace:
    space = densities[0].space
    for d in densities[1:]:
        if d.space is not space and d.space != space:
            raise SpaceMismatchError("densities live on different spaces")
    return space


def uniform(space: WeightedSpace) -> Density:
    w = space.mu_weights
    return Density(space, np.full(len(space), 1.0 / w.sum()))


def point_mass(space: WeightedSpace, index: int) -> Density:
    v = np.zeros(len(space))
    v[index] = 1.0 / space.mu_weights[index]
    return Density(space, v)


# -- array-level kernels ----------------------------------------------------
# These work on the last axis so batches of densities can share them.

def _power_sum(p: np.ndarray, w: np.ndarray, alpha: float) -> np.ndarray:
    return np.sum(np.power(p, alpha) * w, axis=-1)


def _norm(p: np.ndarray, w: np.ndarray, alpha: float) -> np.ndarray:
    return np.power(_power_sum(p, w, alpha), 1.0 / alpha)


def _tilt(p: np.ndarray, w: np.ndarray, alpha: float) -> np.ndarray:
    pa = np.power(p, alpha)
    return pa / np.sum(pa * w, axis=-1, keepdims=True)


# -- operations -------------------------------------------------------------

def normalize(values: Sequence[float], space: WeightedSpace) -> Density:
    v = np.asarray(values, dtype=float)
    if v.shape != (len(space),):
        raise LengthMismatchError(f"{v.size} values for a space of {len(space)}")
    if not np.all(np.isfinite(v)):
        raise NegativeValueError("values must be finite")
    if np.any(v < 0):
        raise NegativeValueError("values must be >= 0")
    m = float(np.dot(v, space.mu_weights))
    if m <= 0:
        raise AllZeroError("no positive value to normalize")
    return Density(space, v / m)


def alpha_norm(p: Density, a) -> float:
    """``(sum p**alpha * w) ** (1/alpha)``; not a norm when alpha < 1."""
    a = as_alpha(a)
    if not np.any(p.values > 0):
        raise AllZeroError("alpha_norm of the zero density")
    return float(_norm(p.values, p.weights, a.alpha))


def tilt(p: Density, a) -> Density:
    """Escort density ``p**alpha / int p**alpha``."""
    a = as_alpha(a)
    if not np.any(p.values > 0):
        raise AllZeroError("cannot tilt the zero density")
    v = p.values
    pos = v[v > 0]
    if p.probability and np.all(pos == pos[0]):
        # constant on its support: a fixed point, returned bit for bit
        return p
    return Density(p.space, _tilt(v, p.weights, a.alpha))


def renyi_entropy(p: Density, a) -> float:
    a = as_alpha(a)
    s = _power_sum(p.values, p.weights, a.alpha)
    if s <= 0:
        raise AllZeroError("renyi entropy of the zero density")
    return float(np.log(s) / (1.0 - a.alpha))


def shannon_entropy(p: Density) -> float:
    v = p.values
    pos = v > 0
    return float(-np.sum(v[pos] * np.log(v[pos]) * p.weights[pos]))


def kl_divergence(p: Density, q: Density) -> float:
    """Relative entropy ``int p log(p/q)``; ``inf`` unless supp p <= supp q."""
    check_same_space(p, q)
    pv, qv = p.values, q.values
    pos = pv > 0
    if np.any(qv[pos] == 0):
        return math.inf
    return float(np.sum(pv[pos] * np.log(pv[pos] / qv[pos]) * p.weights[pos]))


def total_variation(p: Density, q: Density) -> float:
    check_same_space(p, q)
    return float(0.5 * np.sum(np.abs(p.values - q.values) * p.weights))
