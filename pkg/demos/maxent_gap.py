"""Covariance-constrained Renyi maximizers and the moment-entropy gap.

For alpha < 1 the gap I(g, g_max) - (H(g_max) - H(g)) vanishes.  For alpha > 1
it vanishes only when g lives inside the support ellipsoid of g_max; otherwise
it equals the clipping correction printed next to it.  The maximizer property
H(g) <= H(g_max) holds throughout.
"""

import math

import numpy as np

from alphaproj import (
    GeneralizedGaussianSpec,
    clipping_correction,
    generalized_gaussian,
    matched_density,
    maxent_grid,
    moment_entropy_gap,
    renyi_entropy,
)
from alphaproj.maxent import normalizer

spec = GeneralizedGaussianSpec(1, 2.0, np.eye(1))
grid = maxent_grid(spec, 1e-3)
print(f"alpha = 2, C = 1: Z = {normalizer(spec, grid):.8f} (4 sqrt 5 / 3 = {4 * math.sqrt(5) / 3:.8f}),"
      f" support half width {spec.half_widths()[0]:.8f}")

print(f"\n{'alpha':>5} {'density':>9} {'gap':>11} {'clip pred':>11} {'H(gmax)-H(g)':>13}")
for alpha in (0.9, 1.5, 2.0, 3.0):
    spec = GeneralizedGaussianSpec(1, alpha, np.eye(1))
    grid = maxent_grid(spec, 1e-3, cover=12.0)
    gmax = generalized_gaussian(spec, grid)
    for kind in ("gaussian", "laplace", "mixture", "uniform"):
        g = matched_density(kind, spec.C, grid)
        gap = moment_entropy_gap(g, spec)
        dh = renyi_entropy(gmax, alpha) - renyi_entropy(g, alpha)
        print(f"{alpha:>5} {kind:>9} {gap:>+11.2e} {clipping_correction(g, spec):>+11.2e} {dh:>13.3e}")
