import math

import numpy as np
import pytest
from scipy import integrate

from alphaproj.errors import (
    AlphaOutOfRangeError,
    CovarianceMismatchError,
    GridTooCoarseError,
    MomentDivergedError,
)
from alphaproj.maxent import (
    GeneralizedGaussianSpec,
    b_alpha,
    clipping_correction,
    box_grid,
    covariance,
    generalized_gaussian,
    matched_density,
    maxent_grid,
    moment_entropy_gap,
    normalizer,
    richardson,
)
from alphaproj.measures import Density, renyi_entropy


def spec(alpha, C=1.0, n=1):
    return GeneralizedGaussianSpec(n, alpha, np.atleast_2d(C))


def quad_moments(alpha):
    """Z and variance of the 1-D kernel with C = 1 by adaptive quadrature."""
    b = b_alpha(alpha, 1)
    e = 1 / (alpha - 1)

    def k(x):
        base = 1 + b * x * x
        return base**e if base > 0 else 0.0

    lim = math.sqrt(-1 / b) if alpha > 1 else math.inf
    z = 2 * integrate.quad(k, 0, lim, epsabs=0, epsrel=1e-13)[0]
    v = 2 * integrate.quad(lambda x: x * x * k(x), 0, lim, epsabs=0, epsrel=1e-13)[0] / z
    return z, v


def test_b_alpha_examples():
    assert b_alpha(2.0, 1) == pytest.approx(-0.2, abs=1e-15)
    assert b_alpha(0.6, 2) == pytest.approx(1.0, abs=1e-15)
    assert abs(b_alpha(1 + 1e-5, 3)) < 1e-5
    assert abs(b_alpha(1 - 1e-5, 3)) < 1e-5
    for n in (1, 2, 5):
        for a in (0.9, 0.99, 1.5, 3.0):
            if a > n / (n + 2):
                assert math.copysign(1, b_alpha(a, n)) == (1 if a < 1 else -1)


@pytest.mark.parametrize("n, alpha", [(1, 1 / 3), (1, 0.3), (2, 0.5), (3, 0.6)])
def test_alpha_out_of_range(n, alpha):
    with pytest.raises(AlphaOutOfRangeError):
        b_alpha(alpha, n)
    with pytest.raises(AlphaOutOfRangeError):
        spec(alpha, np.eye(n), n)


def test_spec_validates_covariance():
    with pytest.raises(ValueError):
        spec(2.0, [[1.0, 0.5], [0.0, 1.0]], 2)
    with pytest.raises(ValueError):
        spec(2.0, [[1.0, 2.0], [2.0, 1.0]], 2)


def test_closed_form_alpha2():
    s = spec(2.0)
    assert s.half_widths()[0] == pytest.approx(math.sqrt(5), rel=1e-15)
    # Z = int (1 - x^2 / 5) dx over |x| <= sqrt 5 = 4 sqrt(5) / 3
    zs = [normalizer(s, maxent_grid(s, h)) for h in (0.01, 0.005)]
    assert richardson(*zs) == pytest.approx(4 * math.sqrt(5) / 3, abs=1e-6)
    g = generalized_gaussian(s, maxent_grid(s, 0.005))
    assert covariance(g)[0, 0] == pytest.approx(1.0, abs=1e-4)
    assert np.all(g.values[np.abs(g.space.coords[:, 0]) > math.sqrt(5)] == 0)


@pytest.mark.parametrize("alpha", [0.8, 0.9, 1.5, 3.0])
def test_normalizer_and_variance_match_quadrature(alpha):
    s = spec(alpha)
    z_ref, v_ref = quad_moments(alpha)
    assert v_ref == pytest.approx(1.0, rel=1e-9)
    zs, vs = [], []
    for h in (0.02, 0.01):
        grid = maxent_grid(s, h, mass_tol=1e-9, cov_tol=1e-7)
        zs.append(normalizer(s, grid))
        vs.append(covariance(generalized_gaussian(s, grid), check_tails=False)[0, 0])
    # the kernel vanishes like (edge - x)**e at the support edge, which
    # caps the midpoint error order at 1 + e
    order = min(2.0, 1.0 + 1.0 / (alpha - 1)) if alpha > 1 else 2.0
    assert richardson(*zs, order=order) == pytest.approx(z_ref, abs=1e-6)
    tol = 1e-6 if alpha > 1 else 1e-5
    assert richardson(*vs, order=order) == pytest.approx(1.0, abs=tol)


def test_power_law_tail():
    s = spec(0.8)
    grid = box_grid([-100.0], [100.0], [20000])
    k = s.kernel(grid.coords)
    x = grid.coords[:, 0]
    far = (x > 50) & (x < 100)
    slope = np.polyfit(np.log(x[far]), np.log(k[far]), 1)[0]
    assert slope == pytest.approx(-10.0, rel=0.02)


def test_tail_mass_bound():
    s = spec(0.8)
    exact = 2 * integrate.quad(lambda x: s.kernel(np.array([[x]]))[0], 40, np.inf)[0]
    assert s.tail_mass(40.0**2) == pytest.approx(exact, rel=0.05)
    assert spec(2.0).tail_mass(1.0) == 0.0


def test_point_mass_covariance_is_zero():
    grid = box_grid([-1.0, -1.0], [1.0, 1.0], [4, 4])
    v = np.zeros(16)
    v[5] = 1 / grid.mu_weights[5]
    assert np.array_equal(covariance(Density(grid, v)), np.zeros((2, 2)))


def test_gaussian_covariance_on_grid():
    C = np.diag([1.0, 4.0])
    grid = box_grid([-8.0, -16.0], [8.0, 16.0], [160, 320])
    g = matched_density("gaussian", C, grid)
    assert np.allclose(covariance(g), C, rtol=0.01, atol=0.01)


def test_covariance_flags_heavy_tails():
    grid = box_grid([-50.0], [50.0], [20])
    x = grid.coords[:, 0]
    g = Density(grid, (1 + x * x) ** -1.5, probability=False)
    g = Density(grid, g.values / (g.values @ grid.mu_weights))
    with pytest.raises(MomentDivergedError):
        covariance(g)


def test_grid_too_coarse():
    s = spec(2.0)
    with pytest.raises(GridTooCoarseError):
        generalized_gaussian(s, box_grid([-2.5], [2.5], [3]))


@pytest.mark.parametrize("alpha", [0.9, 2.0])
def test_gap_vanishes_for_the_maximizer(alpha):
    s = spec(alpha)
    g = generalized_gaussian(s, maxent_grid(s, 0.005))
    assert abs(moment_entropy_gap(g, s)) <= 1e-12


def test_gap_vanishes_when_support_is_inside():
    # the cube |y| <= sqrt 3 sits inside the alpha = 2 ellipsoid |y| <= sqrt 5
    s = spec(2.0)
    grid = maxent_grid(s, 1e-3)
    g = matched_density("uniform", 1.0, grid)
    assert abs(moment_entropy_gap(g, s, cov_tol=0.01)) <= 1e-3


@pytest.mark.parametrize("kind", ["gaussian", "laplace", "mixture"])
@pytest.mark.parametrize("alpha", [0.9, 1.5, 2.0])
def test_maximizer_beats_matched_densities(kind, alpha):
    s = spec(alpha)
    grid = maxent_grid(s, 5e-3, cover=12.0)
    g = matched_density(kind, 1.0, grid)
    gmax = generalized_gaussian(s, grid)
    assert renyi_entropy(g, alpha) <= renyi_entropy(gmax, alpha) + 1e-9


def test_covariance_mismatch():
    s = spec(2.0)
    grid = maxent_grid(s, 0.01, cover=12.0)
    g = matched_density("gaussian", 2.0, grid)
    with pytest.raises(CovarianceMismatchError):
        moment_entropy_gap(g, s)


def test_richardson():
    assert richardson(1.0 + 0.04, 1.0 + 0.01) == pytest.approx(1.0, abs=1e-15)
    assert richardson(3.0, 2.5, order=1) == 2.0


@pytest.mark.parametrize("kind", ["gaussian", "laplace", "mixture"])
@pytest.mark.parametrize("alpha", [0.9, 2.0, 3.0])
def test_gap_equals_clipping_correction(kind, alpha):
    s = spec(alpha)
    grid = maxent_grid(s, 2e-3, cover=12.0)
    g = matched_density(kind, 1.0, grid)
    gap = moment_entropy_gap(g, s)
    assert gap == pytest.approx(clipping_correction(g, s), abs=1e-5)
    if alpha > 1:
        assert gap < -1e-4
