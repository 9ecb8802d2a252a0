"""Tilting, Renyi entropy and the alpha-relative entropy on small examples."""

import math

from alphaproj import (
    Density,
    WeightedSpace,
    alpha_relative_entropy,
    alpha_relative_entropy_direct,
    ialpha,
    kl_divergence,
    kl_limit_probe,
    renyi_entropy,
    tilt,
    uniform,
)

space = WeightedSpace(["a", "b"])
p = Density(space, [0.75, 0.25])
u = uniform(space)

# Tilting raises p to the power alpha and renormalizes.
print("tilt(p, 2)        =", tilt(p, 2).values)
print("H_2(p)            =", renyi_entropy(p, 2))

# The divergence has two algebraically equal forms; both are computed.
via_f = alpha_relative_entropy(p, u, 2).value
direct = alpha_relative_entropy_direct(p, u, 2).value
print(f"I_2(p, u)         = {via_f:.12f} (f-divergence) vs {direct:.12f} (direct)")

# Against the uniform density it is the entropy deficit.
print(f"log 2 - H_2(p)    = {math.log(2) - renyi_entropy(p, 2):.12f}")

# Near alpha = 1 it approaches the Kullback-Leibler divergence.
print(f"KL(p, u)          = {kl_divergence(p, u):.12f}")
for a, v, gap in kl_limit_probe(p, u, [1e-2, 1e-3, 1e-4]):
    print(f"  alpha = {a:<8g} I = {v:.12f}  |I - KL| = {gap:.2e}")

# Unlike f-divergences, merging points can increase it, for either regime.
three = WeightedSpace.counting(3)
two = WeightedSpace.counting(2)
for alpha, pv, qv in ((0.5, (0.5, 0.5, 0.0), (0.25, 0.25, 0.5)), (2.0, (0.1, 0.1, 0.8), (0.4, 0.4, 0.2))):
    fine = ialpha(Density(three, pv), Density(three, qv), alpha)
    coarse = ialpha(Density(two, (pv[0] + pv[1], pv[2])), Density(two, (qv[0] + qv[1], qv[2])), alpha)
    print(f"alpha = {alpha}: before merging {fine:.4f}, after merging {coarse:.4f}")
