"""Full factorial ``2^d`` designs scaled to quantise the uniform law on the unit sphere.

The design ``X(b)`` has the ``2^d`` points with coordinates ``+-b``; all lie
on the sphere of radius ``sqrt(d) b``. Every quantity below is closed form,
so nothing is enumerated and ``d`` may be large.
"""

import math
from dataclasses import dataclass

from scipy import special

from ._poly import real_cubic_roots

__all__ = [
    "FactorialDesign",
    "mean_abs_coordinate",
    "factorial_distortion",
    "factorial_covering_radius",
    "factorial_optimal",
]


@dataclass(frozen=True)
class FactorialDesign:
    d: int
    b: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not self.b > 0:
            raise ValueError("half-width b must be > 0")

    @property
    def n(self):
        return 2 ** self.d

    @property
    def radius(self):
        return math.sqrt(self.d) * self.b


def mean_abs_coordinate(d):
    """``E|U_1|`` for ``U`` uniform on the unit sphere of R^d."""
    return math.exp(special.gammaln(d / 2.0) - special.gammaln((d + 1) / 2.0)) / math.sqrt(math.pi)


def _quartic_coeffs(d):
    # E||V - b 1||^4 = 1 + c2 b^2 + d^2 b^4 - 4 d m (b + d b^3)
    m = mean_abs_coordinate(d)
    sum_sq = 1.0 + 2.0 * (d - 1) / math.pi
    return m, 2.0 * d + 4.0 * sum_sq


def factorial_distortion(d, b, s):
    """``(mu, s)``-distortion of ``X(b)`` for ``mu`` uniform on the unit sphere.

    Only ``s = 2`` and ``s = 4`` have closed forms here.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    m = mean_abs_coordinate(d)
    if s == 2:
        return 1.0 - 2.0 * b * d * m + d * b * b
    if s == 4:
        m, c2 = _quartic_coeffs(d)
        return 1.0 + c2 * b * b + d * d * b ** 4 - 4.0 * d * m * (b + d * b ** 3)
    raise NotImplementedError("factorial_distortion supports s in {2, 4}")


def factorial_covering_radius(d, b):
    """Covering radius of ``X(b)`` on the unit sphere: ``sqrt(1 + d b^2 - 2 b)``."""
    return math.sqrt(max(1.0 + d * b * b - 2.0 * b, 0.0))


def factorial_optimal(d, s):
    """Optimal half-width ``b*`` and the optimal value for ``s in {2, 4, inf}``.

    For ``s = inf`` the value is the covering radius.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if s == 2:
        b = mean_abs_coordinate(d)
        return b, 1.0 - d * b * b
    if s == 4:
        m, c2 = _quartic_coeffs(d)
        # derivative: 4 d^2 b^3 - 12 d^2 m b^2 + 2 c2 b - 4 d m
        roots = real_cubic_roots(4.0 * d * d, -12.0 * d * d * m, 2.0 * c2, -4.0 * d * m)
        cands = [r for r in roots if r > 0] or [0.0]
        b = min(cands, key=lambda x: factorial_distortion(d, x, 4))
        return b, factorial_distortion(d, b, 4)
    if s == math.inf or s == "inf":
        b = 1.0 / d
        return b, math.sqrt(1.0 - 1.0 / d)
    raise NotImplementedError("factorial_optimal supports s in {2, 4, inf}")
