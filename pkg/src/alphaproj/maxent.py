"""Renyi-entropy maximizers under a covariance constraint.

For ``alpha > n / (n + 2)`` the maximizer is

    g(x) = [1 + b * x^T C^{-1} x]_+ ** (1 / (alpha - 1)) / Z,
    b = (1 - alpha) / (2 alpha - n (1 - alpha)),

compactly supported on an ellipsoid when alpha > 1 and power-law tailed
when alpha < 1.  ``Z`` has no closed form in general, so densities are
evaluated on a uniform midpoint grid and normalized numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats

from .divergences import ialpha
from .errors import (
    AlphaOutOfRangeError,
    CovarianceMismatchError,
    GridTooCoarseError,
    InfiniteDivergenceError,
    MomentDivergedError,
)
from .measures import AlphaParam, Density, WeightedSpace, as_alpha, renyi_entropy

MAX_CELLS = 20_000_000


def b_alpha(alpha, n: int) -> float:
    a = as_alpha(alpha).alpha
    den = 2.0 * a - n * (1.0 - a)
    if den <= 0:
        raise AlphaOutOfRangeError(f"alpha out of range: alpha={a} must exceed n/(n+2) = {n / (n + 2):.6g}")
    return (1.0 - a) / den


@dataclass(frozen=True, eq=False)
class GeneralizedGaussianSpec:
    n: int
    alpha: AlphaParam
    C: np.ndarray

    def __post_init__(self):
        a = as_alpha(self.alpha)
        object.__setattr__(self, "alpha", a)
        C = np.atleast_2d(np.array(self.C, dtype=float))
        n = int(self.n)
        if n < 1 or C.shape != (n, n):
            raise ValueError(f"C must be {n}x{n}")
        if not np.allclose(C, C.T, rtol=0, atol=1e-12 * np.abs(C).max()):
            raise ValueError("C must be symmetric")
        if np.linalg.eigvalsh(C).min() <= 0:
            raise ValueError("C must be positive definite")
        b_alpha(a, n)  # raises AlphaOutOfRangeError
        C.setflags(write=False)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "n", n)

    @property
    def b(self) -> float:
        return b_alpha(self.alpha, self.n)

    @property
    def exponent(self) -> float:
        return 1.0 / (self.alpha.alpha - 1.0)

    @property
    def compact(self) -> bool:
        return self.alpha.alpha > 1

    def half_widths(self) -> np.ndarray:
        """Bounding-box half widths of the support ellipsoid (alpha > 1)."""
        if not self.compact:
            return np.full(self.n, np.inf)
        return np.sqrt(np.diag(self.C) * (-1.0 / self.b))

    def kernel(self, x: np.ndarray) -> np.ndarray:
        """Unnormalized density at points ``x`` of shape ``(N, n)``."""
        x = np.atleast_2d(x)
        quad = np.einsum("ij,jk,ik->i", x, np.linalg.inv(self.C), x)
        base = np.maximum(1.0 + self.b * quad, 0.0)
        out = np.zeros_like(base)
        pos = base > 0
        out[pos] = np.power(base[pos], self.exponent)
        return out

    def tail_mass(self, radius2: float) -> float:
        """Unnormalized mass outside ``{x^T C^-1 x <= radius2}`` (alpha < 1).

        Uses the power-law asymptote ``(b s)**e`` of the kernel.
        """
        if self.compact:
            return 0.0
        e = self.exponent
        k = 2.0 * e + self.n
        if k >= 0:
            return math.inf
        area = 2.0 * math.pi ** (self.n / 2) / special.gamma(self.n / 2)
        det = math.sqrt(np.linalg.det(self.C))
        return det * self.b ** e * area * math.sqrt(radius2) ** k / (-k)


def box_grid(lower: Sequence[float], upper: Sequence[float], cells: Sequence[int]) -> WeightedSpace:
    """Midpoints of a uniform rectangular grid, weighted by cell volume."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    cells = np.asarray(cells, dtype=int)
    total = int(np.prod(cells))
    if total > MAX_CELLS:
        raise MomentDivergedError(f"grid of {total} cells exceeds the {MAX_CELLS} cap")
    widths = (upper - lower) / cells
    axes = [lo + (np.arange(m) + 0.5) * h for lo, m, h in zip(lower, cells, widths)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vol = float(np.prod(widths))
    return WeightedSpace(pts, np.full(pts.shape[0], vol))


def _symmetric_grid(half: np.ndarray, h: np.ndarray) -> WeightedSpace:
    m = np.maximum(np.round(half / h).astype(int), 1)
    edge = m * h
    return box_grid(-edge, edge, 2 * m)


def covariance(p: Density, check_tails: bool = True) -> np.ndarray:
    """``sum p_i w_i (x_i - m)(x_i - m)^T`` over a coordinate grid.

    With ``check_tails`` the estimate is recomputed without the outermost
    layer of cells; a change of more than 1% raises MomentDivergedError.
    """
    X = p.space.coords
    if X is None:
        raise ValueError("covariance needs a space with coordinates")
    m = p.masses()
    cov = _weighted_cov(X, m)
    if check_tails and X.shape[0] > 1:
        inner = np.ones(X.shape[0], dtype=bool)
        for j in range(X.shape[1]):
            col = X[:, j]
            if np.unique(col).size >= 8:
                inner &= (col > col.min()) & (col < col.max())
        if inner.sum() and not inner.all() and m[inner].sum() > 0:
            cov_in = _weighted_cov(X[inner], m[inner])
            scale = max(np.linalg.norm(cov), 1e-300)
            if np.linalg.norm(cov_in - cov) > 0.01 * scale:
                raise MomentDivergedError("covariance moves by more than 1% at the grid edge")
    return cov


def _weighted_cov(X: np.ndarray, m: np.ndarray) -> np.ndarray:
    m = m / m.sum()
    mean = m @ X
    Y = X - mean
    return (Y * m[:, None]).T @ Y


def _rel_err(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.linalg.norm(A - B) / np.linalg.norm(B))


def maxent_grid(
    spec: GeneralizedGaussianSpec,
    cell_width: float | Sequence[float],
    cover: float | Sequence[float] | None = None,
    mass_tol: float = 1e-6,
    cov_tol: float = 1e-3,
) -> WeightedSpace:
    """Grid suited to ``spec``, optionally also covering ``[-cover, cover]``.

    For alpha > 1 cell edges are aligned with the support's bounding box and
    one extra cell (or more, to reach ``cover``) is added on each side.  For
    alpha < 1 the extent doubles until the estimated truncated mass is below
    ``mass_tol`` and the covariance changes by less than ``cov_tol``.
    """
    n = spec.n
    h = np.broadcast_to(np.asarray(cell_width, dtype=float), (n,)).copy()
    cov_half = np.zeros(n) if cover is None else np.broadcast_to(np.asarray(cover, dtype=float), (n,))
    if spec.compact:
        L = spec.half_widths()
        m = np.ceil(L / h).astype(int)
        hh = L / m
        extra = 1 + np.maximum(0, np.ceil((cov_half - L) / hh)).astype(int)
        edge = L + extra * hh
        return box_grid(-edge, edge, 2 * (m + extra))
    sd = np.sqrt(np.diag(spec.C))
    half = np.maximum(cov_half, 8.0 * sd)
    grid = _symmetric_grid(half, h)
    prev = None
    while True:
        k = spec.kernel(grid.coords)
        z = float(k @ grid.mu_weights)
        cov = _weighted_cov(grid.coords, k * grid.mu_weights)
        r2 = float(np.min(half**2 / np.diag(spec.C)))
        truncated = spec.tail_mass(r2) / z
        if prev is not None and truncated < mass_tol and _rel_err(prev, cov) < cov_tol:
            return grid
        prev = cov
        half = 2.0 * half
        grid = _symmetric_grid(half, h)


def normalizer(spec: GeneralizedGaussianSpec, grid: WeightedSpace) -> float:
    """Numerical ``Z`` (midpoint rule on ``grid``)."""
    return float(spec.kernel(grid.coords) @ grid.mu_weights)


def generalized_gaussian(
    spec: GeneralizedGaussianSpec, grid: WeightedSpace, cov_tol: float = 0.01
) -> Density:
    """The maximizer evaluated on ``grid`` and normalized numerically.

    Raises GridTooCoarseError when its grid covariance misses ``C`` by more
    than ``cov_tol`` (relative Frobenius norm).
    """
    if grid.coords is None or grid.coords.shape[1] != spec.n:
        raise ValueError(f"grid must carry {spec.n}-D coordinates")
    k = spec.kernel(grid.coords)
    z = float(k @ grid.mu_weights)
    if z <= 0:
        raise GridTooCoarseError("no grid cell inside the support")
    dens = Density(grid, k / z)
    if _rel_err(_weighted_cov(grid.coords, dens.masses()), spec.C) > cov_tol:
        raise GridTooCoarseError("grid covariance is more than 1% away from C")
    return dens


def moment_entropy_gap(g: Density, spec: GeneralizedGaussianSpec, cov_tol: float = 0.01) -> float:
    """``I_alpha(g, g_max) - (H_alpha(g_max) - H_alpha(g))`` on g's grid.

    ``g`` must have covariance ``C`` to within ``cov_tol``.
    """
    if _rel_err(covariance(g), spec.C) > cov_tol:
        raise CovarianceMismatchError("test density does not have covariance C")
    gmax = generalized_gaussian(spec, g.space)
    div = ialpha(g, gmax, spec.alpha)
    if not math.isfinite(div):
        raise InfiniteDivergenceError("I_alpha(g, g_max) is infinite")
    return div - (renyi_entropy(gmax, spec.alpha) - renyi_entropy(g, spec.alpha))


def clipping_correction(g: Density, spec: GeneralizedGaussianSpec) -> float:
    """Predicted moment-entropy gap caused by the ``[.]_+`` clip.

    The identity needs ``int g * g_max**(alpha-1) = int g_max**alpha``.  With
    matched covariance this holds for the unclipped bracket, so the gap is
    ``alpha/(1-alpha) * log(int g [1+bq]_+ / int g (1+bq))``; it is zero
    unless ``g`` puts mass outside the support ellipsoid (alpha > 1 only).
    """
    X = g.space.coords
    quad = np.einsum("ij,jk,ik->i", X, np.linalg.inv(spec.C), X)
    br = 1.0 + spec.b * quad
    m = g.masses()
    a = spec.alpha.alpha
    return a / (1.0 - a) * math.log(float(m @ np.maximum(br, 0.0)) / float(m @ br)) + 0.0


def matched_density(kind: str, C, grid: WeightedSpace) -> Density:
    """Zero-mean test density with covariance ``C`` on ``grid``.

    ``kind`` is ``"gaussian"``, ``"laplace"`` (independent Laplace
    coordinates, then linearly mapped), ``"mixture"`` (two Gaussians
    split along the first axis) or ``"uniform"`` (a linearly mapped cube).
    """
    C = np.atleast_2d(np.asarray(C, dtype=float))
    X = grid.coords
    n = C.shape[0]
    L = np.linalg.cholesky(C)
    Y = np.linalg.solve(L, X.T).T  # whitened coordinates
    jac = 1.0 / abs(np.linalg.det(L))
    if kind == "gaussian":
        dens = np.prod(stats.norm.pdf(Y), axis=1) * jac
    elif kind == "laplace":
        dens = np.prod(stats.laplace.pdf(Y, scale=1 / math.sqrt(2)), axis=1) * jac
    elif kind == "mixture":
        shift = np.zeros(n)
        shift[0] = 0.8
        inner = np.eye(n)
        inner[0, 0] = 1.0 - shift[0] ** 2
        comp = [stats.multivariate_normal(mean=s, cov=inner) for s in (shift, -shift)]
        dens = 0.5 * (comp[0].pdf(Y) + comp[1].pdf(Y)) * jac
    elif kind == "uniform":
        dens = np.all(np.abs(Y) <= math.sqrt(3.0), axis=1) * jac
    else:
        raise ValueError(f"unknown test density {kind!r}")
    dens = np.asarray(dens, dtype=float).reshape(-1)
    return Density(grid, dens / (dens @ grid.mu_weights))


def richardson(coarse: float, fine: float, order: int = 2) -> float:
    """Extrapolate two estimates at spacings h and h/2 with error O(h**order)."""
    f = 2.0**order
    return (f * fine - coarse) / (f - 1.0)
