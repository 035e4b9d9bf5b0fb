"""
Optimising the quantiser scale
==============================

Each quantiser family has one free parameter: the radius of a sphere, the
radius of a ball, or the scale of a Gaussian. Golden-section search over the
exact distortion gives the best member of each family at a fixed n.
"""

from sphquant import (
    BallUniform,
    DistortionQuery,
    NormalScaled,
    ScaledChi,
    SphereUniform,
    crossover_size,
    mixture_distortion,
    optimal_parameter,
)
from sphquant.search import SearchConfig, golden_section

# Gaussian target in d=5, n=1000: compare the three families after optimising.
d, n, s = 5, 1000, 2
target = ScaledChi(1.0, d)
for fam in (SphereUniform(1.0, d), BallUniform(1.0, d), NormalScaled(1.0, d)):
    value, dist = optimal_parameter(DistortionQuery(d, n, s, target, fam))
    print(f"{type(fam).__name__:14s} best parameter {value:.5f}  distortion {dist:.6f}")

# %%
# Putting part of the mass at the origin helps for large s. For the unit
# sphere target with d=10, n=20, s=10 the best weight on the sphere is < 1.
alpha, val = golden_section(lambda x: mixture_distortion(10, 20, 10, x, 1.0),
                            SearchConfig(0.0, 1.0, tol=1e-6))
print(f"\nmixture weight on the sphere: {alpha:.4f} (distortion {val:.6f})")

# %%
# The sphere family wins for small designs and loses once n is large enough
# for the ball to fill the interior. Locate the switch for a ball target.
from sphquant import BallPower  # noqa: E402

res = crossover_size(3, 2, SphereUniform(1.0, 3), BallUniform(1.0, 3), 4096, BallPower(1.0, 3),
                     coarse=9, tol=1e-4)
print(f"\nd=3 crossover: {res.message}, n* = {res.n_star}")
