"""
Extreme-value approximation
===========================

For large n the nearest of n random sphere points behaves like the minimum of
n Beta(delta, delta) variables, whose rescaled limit is Weibull. This yields
closed-form approximations in terms of kappa, the 1/n quantile of that Beta.
"""

import math

from sphquant import (
    DistortionQuery,
    Exponential,
    PointMass,
    SphereUniform,
    evt_distortion,
    evt_optimal_radius,
    kappa,
    kappa_bounds,
    kappa_limit,
    optimal_parameter,
)

# kappa and its explicit bracket.
for d in (5, 11, 21):
    for n in (100, 10_000):
        lo, hi = kappa_bounds(n, d)
        print(f"d={d:2d} n={n:6d}  {lo:.5f} <= kappa={kappa(n, d):.5f} <= {hi:.5f}")

# %%
# With n = 2^d the quantile settles at a finite limit.
print(f"\nlimit for n=2^d: {kappa_limit(Exponential(2.0)):.6f}")
for d in (10, 20, 40, 60):
    print(f"  d={d:2d}  kappa={kappa(2.0 ** d, d):.6f}")

# %%
# The approximate optimum radius and distortion against the exact ones.
d, s = 10, 2
for n in (100, 1000, 10_000):
    a_hat = evt_optimal_radius(PointMass(1.0, d), n, d, s)
    a_star, exact = optimal_parameter(DistortionQuery(d, n, s, PointMass(1.0, d),
                                                      SphereUniform(1.0, d)))
    approx = evt_distortion(PointMass(1.0, d), a_star, n, d, s)
    rel = abs(1 - math.sqrt(approx / exact))
    print(f"n={n:6d}  a*={a_star:.5f}  a_hat={a_hat:.5f}  relative error {rel:.2e}")
