"""
Factorial design and an empirical limit
=======================================

The 2^d vertices of a cube scaled to fit the unit sphere form a deterministic
design of the same size as n = 2^d random points. Its optimal scale has a
closed form for s = 2, 4 and for the covering radius.
"""

import math

from sphquant import (
    DistortionQuery,
    NormalScaled,
    ScaledChi,
    factorial_optimal,
    optimal_parameter,
)

for d in (3, 10, 50, 200):
    b2, v2 = factorial_optimal(d, 2)
    b4, v4 = factorial_optimal(d, 4)
    b_inf, cr = factorial_optimal(d, math.inf)
    print(f"d={d:3d}  sqrt(d)*b2={math.sqrt(d) * b2:.5f}  D2={v2:.5f}  "
          f"D4={v4:.5f}  covering radius={cr:.5f}")
print(f"limit of sqrt(d)*b2: {math.sqrt(2 / math.pi):.6f}")

# %%
# Gaussian target and Gaussian quantiser with n = 2^d, s = 4. For d <= 8 the
# best scale rises and levels off near 0.93. Whether it tends to
# sqrt(3)/2 ~ 0.866 for large d is open; small d says nothing either way.
for d in range(3, 9):
    q = DistortionQuery(d, 2 ** d, 4, ScaledChi(1.0, d), NormalScaled(1.0, d))
    sigma, _ = optimal_parameter(q, coarse=17)
    print(f"d={d}  sigma*={sigma:.4f}")
