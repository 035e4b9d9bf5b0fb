"""
Exact distortion of a random quantiser
======================================

A quantiser of n points drawn i.i.d. from a spherically symmetric law is
compared with a spherically symmetric target. The expected distortion is a
one-dimensional integral over the distance, averaged over the target radius,
so it can be evaluated to quadrature accuracy rather than sampled.
"""

import numpy as np

from sphquant import (
    DistortionQuery,
    PointMass,
    SphereUniform,
    expected_distortion,
    mc_distortion,
    sphere_closed_form,
)

# Unit-sphere target in d=3, quantiser points uniform on a sphere of radius a.
# In d=3 the squared distance to a random sphere point is linear in a uniform
# variable, so even moments have closed forms to compare against.
d, s = 3, 2
target = PointMass(1.0, d)
for n in (3, 9, 99):
    for a in (0.5, 0.9):
        q = DistortionQuery(d, n, s, target, SphereUniform(a, d))
        print(f"n={n:3d} a={a}  quadrature={expected_distortion(q, method='quadrature'):.12f}"
              f"  closed={sphere_closed_form(n, s, a):.12f}")

# %%
# The same object works in any dimension. A Monte-Carlo estimate over random
# designs should land within a few standard errors.
d, n, a = 10, 100, 0.9
q = DistortionQuery(d, n, s, PointMass(1.0, d), SphereUniform(a, d))
exact = expected_distortion(q)
rep = mc_distortion(q.quantiser, q.target, s, 100_000, seed=1, n=n)
print(f"\nd={d} n={n}: exact {exact:.6f}, MC {rep.estimate:.6f} +/- {rep.std_error:.6f}")
print(f"z-score {(rep.estimate - exact) / rep.std_error:+.2f}")

# %%
# Distortion falls with n, but slowly in high dimension.
for n in np.logspace(1, 5, 5).astype(int):
    q = DistortionQuery(d, int(n), s, PointMass(1.0, d), SphereUniform(a, d))
    print(f"n={n:6d}  D={expected_distortion(q):.6f}")
