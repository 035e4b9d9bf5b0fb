"""Extreme-value approximation of nearest-point distances for sphere quantisers.

For ``n`` i.i.d. points uniform on the sphere of radius ``a`` and a target
point at radius ``r``, the nearest squared distance equals
``(r - a)^2 + 4 a r zeta`` where ``zeta`` is the minimum of ``n`` Beta(delta,
delta) variables, ``delta = (d - 1)/2``. For large ``n`` the rescaled minimum
``zeta / kappa`` is close to a Weibull variable ``xi`` with c.d.f.
``1 - exp(-t^delta)``, ``kappa`` being the ``1/n`` quantile of Beta(delta,
delta). Replacing ``zeta`` by ``kappa xi`` gives the approximations here.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from ._poly import real_cubic_roots
from .models import PointMass, RadialLaw
from .quadrature import QuadratureConfig, adaptive_quad
from .specfun import inv_reg_inc_beta

__all__ = [
    "GrowthRegime",
    "SuperExponential",
    "Exponential",
    "SubExponential",
    "EvtSummary",
    "kappa",
    "kappa_bounds",
    "kappa_limit",
    "weibull_moment",
    "weibull_rule",
    "evt_distortion",
    "evt_optimal_radius",
    "evt_limit_radius",
    "evt_pointwise_moments",
    "evt_quantile",
    "evt_mean_level",
    "evt_summary",
]


# ------------------------------------------------------------------ regimes


class GrowthRegime:
    """How ``n`` grows with ``d``; always supplied explicitly, never inferred."""


@dataclass(frozen=True)
class SuperExponential(GrowthRegime):
    """``n^{1/d} -> inf``."""


@dataclass(frozen=True)
class Exponential(GrowthRegime):
    """``n ~ C lam^d`` with ``lam > 1``."""

    lam: float
    C: float = 1.0

    def __post_init__(self):
        if not self.lam > 1:
            raise ValueError("Exponential regime needs lam > 1")
        if not self.C > 0:
            raise ValueError("Exponential regime needs C > 0")


@dataclass(frozen=True)
class SubExponential(GrowthRegime):
    """``log(n)/d -> 0``."""


@dataclass(frozen=True)
class EvtSummary:
    kappa: float
    kappa_bounds: tuple | None
    a_hat: float
    e_hat: float
    delta: float
    delta_floor: int


# -------------------------------------------------------------------- kappa


def _delta(d):
    if int(d) != d or d < 3:
        raise ValueError(f"extreme-value results need integer d >= 3, got {d!r}")
    return (d - 1) / 2.0


def kappa(n, d):
    """The ``1/n`` quantile of Beta(delta, delta), ``delta = (d-1)/2``."""
    delta = _delta(d)
    if not n >= 2:
        raise ValueError("n must be >= 2")
    # the law is symmetric, so the quantile never exceeds its median
    return min(inv_reg_inc_beta(1.0 / n, delta, delta), 0.5)


def kappa_bounds(n, d):
    """Explicit ``(lo, hi)`` bracket of :func:`kappa`, defined for ``d >= 5``.

    ``hi`` is clamped to 1/2 where the bound is uninformative.
    """
    if int(d) != d or d < 5:
        raise ValueError("kappa_bounds needs d >= 5")
    if not n >= 2:
        raise ValueError("n must be >= 2")
    delta = (d - 1) / 2.0
    dfl = math.floor(delta)
    lo = 0.5 * (1.0 - math.sqrt(1.0 - (2.0 / n) ** (1.0 / (dfl - 1))))
    c_d = math.exp((math.log(delta) + special.betaln(delta, delta)) / delta)
    inner = max(1.0 - 4.0 * c_d * n ** (-1.0 / delta), 0.0)
    hi = 0.5 * (1.0 - math.sqrt(inner))
    return min(lo, 0.5), hi


def kappa_limit(regime):
    """Limit of ``kappa`` as ``d -> inf`` under a growth regime."""
    if isinstance(regime, SuperExponential):
        return 0.0
    if isinstance(regime, SubExponential):
        return 0.5
    if isinstance(regime, Exponential):
        return 0.5 * (1.0 - math.sqrt(1.0 - 1.0 / regime.lam ** 2))
    raise TypeError(f"not a GrowthRegime: {regime!r}")


def evt_limit_radius(regime):
    """Limit of the approximate optimal radius (unit concentration radius)."""
    if isinstance(regime, SuperExponential):
        return 1.0
    if isinstance(regime, SubExponential):
        return 0.0
    if isinstance(regime, Exponential):
        return math.sqrt(1.0 - 1.0 / regime.lam ** 2)
    raise TypeError(f"not a GrowthRegime: {regime!r}")


# ----------------------------------------------------------- Weibull law


def weibull_moment(k, delta):
    """``E xi^k = Gamma(1 + k/delta)``."""
    return math.exp(special.gammaln(1.0 + k / delta))


@lru_cache(maxsize=64)
def weibull_rule(delta, u_max=90.0):
    """Nodes ``zeta`` and weights for integrals against ``1 - exp(-zeta^delta)``.

    Uses ``u = zeta^delta`` (unit exponential) and composite Gauss-Kronrod
    panels in ``u``: unit-width panels on ``[1, u_max]`` and a geometric
    grading into ``u = 0``, where ``u^{1/delta}`` is not smooth.
    """
    from .quadrature import _KW, _NODES

    edges = list(np.arange(1.0, u_max + 0.5, 1.0))
    edges = sorted(set([2.0 ** -k for k in range(1, 80)] + edges + [0.0]))
    e = np.array(edges)
    lo, hi = e[:-1], e[1:]
    half = 0.5 * (hi - lo)
    u = (0.5 * (lo + hi))[:, None] + half[:, None] * _NODES[None, :]
    w = half[:, None] * _KW[None, :] * np.exp(-u)
    u, w = u.ravel(), w.ravel()
    keep = w > 0
    zeta = u[keep] ** (1.0 / delta)
    zeta.setflags(write=False)
    w = w[keep]
    w.setflags(write=False)
    return zeta, w


def _weibull_expect(h, delta):
    zeta, w = weibull_rule(float(delta))
    return h(zeta) @ w


# ---------------------------------------------------------- distortions


def _check_radius(a):
    if not a >= 0:
        raise ValueError("quantiser radius a must be >= 0")


def evt_distortion(target, a, n, d, s, method="auto", quad=None):
    """Extreme-value approximation of the ``(mu, s)``-distortion.

    Parameters
    ----------
    target : RadialLaw
        Radial law of the target measure.
    a : float
        Radius of the sphere carrying the quantiser points.
    n, d, s :
        Design size, dimension, distortion order.
    method : {'auto', 'closed', 'quadrature'}
        ``'auto'`` uses the moment closed forms for ``s in {2, 4}``.

    Returns
    -------
    float
    """
    delta = _delta(d)
    _check_radius(a)
    kap = kappa(n, d)
    closed = s in (2, 4)
    if method == "closed" and not closed:
        raise ValueError("closed form exists only for s in {2, 4}")
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if closed and method != "quadrature":
        M = [target.moment(k) for k in range(5)]
        g1 = weibull_moment(1, delta)
        if s == 2:
            return M[2] - 2 * a * M[1] + a * a + 4 * a * kap * M[1] * g1
        g2 = weibull_moment(2, delta)
        return (
            M[4] - 4 * a * M[3] + 6 * a ** 2 * M[2] - 4 * a ** 3 * M[1] + a ** 4
            + 8 * a * kap * g1 * (M[3] - 2 * a * M[2] + a * a * M[1])
            + 16 * a * a * kap * kap * M[2] * g2
        )
    zeta, w = weibull_rule(float(delta))

    def inner(r):
        r = np.asarray(r, dtype=float)[..., None]
        base = np.maximum((r - a) ** 2 + 4 * a * r * kap * zeta, 0.0)
        return base ** (s / 2.0) @ w

    if isinstance(target, PointMass):
        return float(inner(target.a))
    cfg = quad or QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)
    lo, hi = target.support()
    pts = [lo, hi] + ([a] if lo < a < hi else [])
    return adaptive_quad(lambda rr: inner(rr) * target.pdf(rr), pts,
                         cfg.rel_tol, cfg.abs_tol, cfg.max_depth)


def _golden(f, lo, hi, tol):
    # local import keeps evt independent of search at import time
    from .search import SearchConfig, golden_section

    return golden_section(f, SearchConfig(lo, hi, tol=tol))


def evt_optimal_radius(target, n, d, s, tol=1e-10):
    """Minimiser ``a_hat`` of :func:`evt_distortion` over ``a >= 0``.

    ``s = 2`` is closed form, ``s = 4`` solves the cubic stationarity
    equation, other ``s`` use golden-section search.
    """
    delta = _delta(d)
    kap = kappa(n, d)
    g1 = weibull_moment(1, delta)
    M = [target.moment(k) for k in range(5)]
    if s == 2:
        return max(M[1] * (1.0 - 2.0 * kap * g1), 0.0)
    if s == 4:
        g2 = weibull_moment(2, delta)
        c3 = 4.0
        c2 = -12.0 * M[1] + 24.0 * kap * g1 * M[1]
        c1 = 12.0 * M[2] - 32.0 * kap * g1 * M[2] + 32.0 * kap * kap * M[2] * g2
        c0 = -4.0 * M[3] + 8.0 * kap * g1 * M[3]
        cands = [x for x in real_cubic_roots(c3, c2, c1, c0) if x >= 0] + [0.0]
        return min(cands, key=lambda x: evt_distortion(target, x, n, d, 4))
    hi = 1.5 * float(target.quantile(1.0 - 1e-6)) if target.continuous else 1.5 * target.a
    x, _ = _golden(lambda x: evt_distortion(target, x, n, d, s), 0.0, max(hi, 1e-12), tol)
    return x


def evt_pointwise_moments(r, a, n, d, s, var4="exact"):
    """Approximate mean and variance of ``d^s(u, R_n)`` for ``||u|| = r``.

    Parameters
    ----------
    var4 : {'exact', 'printed'}
        ``'exact'`` expands ``Var{((r-a)^2 + 4ar kappa xi)^2}`` directly.
        ``'printed'`` is an alternative published expression kept for
        comparison; it omits factors of 4 on its last two terms.

    Returns
    -------
    (mean, variance)
        ``variance`` is None unless ``s in {2, 4}``.
    """
    delta = _delta(d)
    _check_radius(a)
    if not r > 0:
        raise ValueError("target radius r must be > 0")
    kap = kappa(n, d)
    mean = float(_weibull_expect(
        lambda z: np.maximum((r - a) ** 2 + 4 * a * r * kap * z, 0.0) ** (s / 2.0), delta))
    if s not in (2, 4):
        return mean, None
    g1, g2, g3, g4 = (weibull_moment(k, delta) for k in (1, 2, 3, 4))
    var_xi, var_xi2, cov = g2 - g1 * g1, g4 - g2 * g2, g3 - g1 * g2
    # scale rule: d^2 at (r, a) is r^2 times d^2 at (1, a/r)
    b = a / r
    if s == 2:
        return mean, r ** 4 * 16 * b * b * kap * kap * var_xi
    c = (1 - b) ** 2
    if var4 == "exact":
        v = 64 * b * b * kap * kap * (c * c * var_xi + 4 * b * b * kap * kap * var_xi2
                                      + 4 * c * b * kap * cov)
    elif var4 == "printed":
        v = 64 * b * b * kap * kap * (c * c * var_xi + b * b * kap * kap * var_xi2
                                      + c * b * kap * cov)
    else:
        raise ValueError("var4 must be 'exact' or 'printed'")
    return mean, r ** 8 * v


def evt_quantile(gamma, a, n, d):
    """Approximate ``gamma``-quantile of ``d(u, R_n)`` at ``||u|| = 1``.

    Returns
    -------
    (q_hat, a_star)
        The quantile at radius ``a`` and the radius minimising it.
    """
    delta = _delta(d)
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    _check_radius(a)
    kap = kappa(n, d)
    t = (-math.log1p(-gamma)) ** (1.0 / delta)
    q = math.sqrt(max((1 - a) ** 2 + 4 * a * kap * t, 0.0))
    return q, 1.0 - 2.0 * kap * t


def evt_mean_level(d):
    """Level ``gamma`` whose quantile-optimal radius matches the ``s = 2`` one.

    Equals ``F_d(Gamma(1 + 1/delta))``; tends to ``1 - exp(-exp(-euler_gamma))``.
    """
    delta = _delta(d)
    return -math.expm1(-math.exp(delta * special.gammaln(1.0 + 1.0 / delta)))


def evt_summary(target, n, d, s):
    """Bundle kappa, its bounds, the approximate optimum and its value."""
    delta = _delta(d)
    a_hat = evt_optimal_radius(target, n, d, s)
    return EvtSummary(
        kappa=kappa(n, d),
        kappa_bounds=kappa_bounds(n, d) if d >= 5 else None,
        a_hat=a_hat,
        e_hat=evt_distortion(target, a_hat, n, d, s),
        delta=delta,
        delta_floor=math.floor(delta),
    )
