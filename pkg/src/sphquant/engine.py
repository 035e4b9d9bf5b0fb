"""Exact expected distortion of i.i.d. spherically symmetric random quantisers.

For a point ``u`` with ``||u|| = r`` and a quantiser point ``X`` drawn from a
spherically symmetric law, ``||X - u||^2`` has the law of
``(R - r)^2 + 4 R r B`` with ``R = ||X||`` and ``B ~ Beta(delta, delta)``,
``delta = (d - 1)/2``. With ``p(r, t) = P{||X - u|| <= t}`` the mean distance
c.d.f. of an ``n``-point quantiser is ``1 - E{(1 - p(||U||, t))^n}`` and the
expected ``(mu, s)``-distortion is ``s int t^{s-1} E{(1 - p)^n} dt``.

The t-integral is computed per target radius (:func:`pointwise_distortion`)
and then averaged over the target radial law, so the sphere target needs a
single adaptive integral. :func:`mean_distance_cdf` integrates in the other
order and is used to cross-check :func:`expected_distortion`.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .models import (
    BallUniform,
    NormalScaled,
    PointMass,
    QuantiserFamily,
    RadialLaw,
    SphereUniform,
    SphereWithAtom,
)
from .quadrature import QuadratureConfig, QuadratureError, adaptive_quad, fixed_gl

__all__ = [
    "DistortionQuery",
    "nu_factor",
    "hit_probability",
    "miss_power",
    "mean_distance_cdf",
    "pointwise_distortion",
    "expected_distortion",
    "expected_distortion_via_cdf",
    "sphere_closed_form",
    "mixture_distortion",
    "distance_quantile",
    "distance_support",
]

_MAX_GL_NODES = 4097


@dataclass(frozen=True)
class DistortionQuery:
    """Everything needed to evaluate one expected distortion."""

    d: int
    n: int
    s: float
    target: RadialLaw
    quantiser: QuantiserFamily
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("design size n must be an integer >= 1")
        if not self.s > 0:
            raise ValueError("moment order s must be > 0")
        if self.target.d != self.d or self.quantiser.d != self.d:
            raise ValueError("target, quantiser and query must share dimension d")

    def with_quantiser(self, quantiser):
        return DistortionQuery(self.d, self.n, self.s, self.target, quantiser, self.quad)

    def with_n(self, n):
        return DistortionQuery(self.d, int(n), self.s, self.target, self.quantiser, self.quad)


def nu_factor(t, rho, r):
    """``[t^2 - (rho - r)^2] / (4 rho r)``; callers clamp through ``I_t``."""
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(rho <= 0) or np.any(r <= 0):
        raise ValueError("nu_factor requires rho > 0 and r > 0")
    out = (t * t - (rho - r) ** 2) / (4.0 * rho * r)
    return float(out) if out.ndim == 0 else out


def _ibeta(v, delta):
    # Hot-path clamped I_v(delta, delta); agrees with specfun.reg_inc_beta to ~1e-14.
    return special.betainc(delta, delta, np.clip(v, 0.0, 1.0))


def _hit_sphere(a, r, t, delta):
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    out = np.where(t >= r + a, 1.0, 0.0)
    mid = (t > np.abs(r - a)) & (t < r + a)
    if mid.any():
        rr = r[mid]
        tt = t[mid]
        v = (tt * tt - (a - rr) ** 2) / (4.0 * a * rr)
        out[mid] = _ibeta(v, delta)
    return out


def _cap_fraction(x, radius, d):
    # Fraction of the d-ball of given radius lying beyond a plane at signed
    # distance x from its centre.
    x = np.clip(x / radius, -1.0, 1.0)
    half = 0.5 * special.betainc((d + 1) / 2.0, 0.5, 1.0 - x * x)
    return np.where(x >= 0, half, 1.0 - half)


def _hit_ball_closed(b, r, t, d):
    # Volume of B(0, b) intersected with B(u, t), ||u|| = r, over vol B(0, b).
    out = np.where(t >= r + b, 1.0, 0.0)
    inside = (r + t <= b) & (t < r + b)
    out = np.where(inside, (t / b) ** d, out)
    lens = (t > np.abs(r - b)) & (t < r + b) & ~inside
    if lens.any():
        rr, tt = r[lens], t[lens]
        x1 = (rr * rr + b * b - tt * tt) / (2.0 * rr)
        x2 = rr - x1
        out[lens] = _cap_fraction(x1, b, d) + (tt / b) ** d * _cap_fraction(x2, tt, d)
    return np.clip(out, 0.0, 1.0)


def _hit_normal_closed(sigma, r, t, d):
    # d ||X - u||^2 / sigma^2 is noncentral chi-square(d, d r^2 / sigma^2).
    scale = d / (sigma * sigma)
    return special.chndtr(scale * t * t, d, scale * r * r)


def _hit_radial_integral(law, r, t, delta, k, tol):
    # P{||X - u|| <= t} = int I_v(delta, delta) dPhi(rho) over the radial law.
    lo_s, hi_s = law.support()
    out = np.asarray(law.cdf(np.clip(t - r, 0.0, None)), dtype=float).copy()
    lo = np.maximum(np.abs(t - r), lo_s)
    hi = np.minimum(t + r, hi_s)
    part = (hi > lo) & (r > 0)
    if not part.any():
        return out
    rr = r[part][:, None]
    tt = t[part][:, None]

    def f(rho):
        v = (tt * tt - (rho - rr) ** 2) / (4.0 * rho * rr)
        return _ibeta(v, delta) * law.pdf(rho)

    lo_p, hi_p = lo[part], hi[part]
    coarse = fixed_gl(f, lo_p, hi_p, (k + 1) // 2)
    fine = fixed_gl(f, lo_p, hi_p, k)
    while np.max(np.abs(fine - coarse)) > tol and k < _MAX_GL_NODES:
        k = 2 * k - 1
        coarse, fine = fine, fixed_gl(f, lo_p, hi_p, k)
    out[part] += fine
    return np.clip(out, 0.0, 1.0)


def hit_probability(quantiser, r, t, method="auto", radial_nodes=257, tol=1e-13):
    """``P{||X - u|| <= t}`` for ``X`` from ``quantiser`` and ``||u|| = r``.

    Parameters
    ----------
    quantiser : QuantiserFamily
    r, t : float or array_like
        Target radius and distance, broadcast together; both ``>= 0``.
    method : {'auto', 'integral'}
        ``'integral'`` forces the Beta-mixture integral over ``||X||`` for
        the ball and normal families (Gauss-Legendre, ``radial_nodes``
        points, doubled until two rules agree within ``tol``). ``'auto'``
        uses the equivalent closed forms: a two-ball lens volume for the
        ball and a noncentral chi-square c.d.f. for the normal family.
    """
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    if np.any(r < 0) or np.any(t < 0):
        raise ValueError("hit_probability requires r >= 0 and t >= 0")
    scalar = r.ndim == 0
    r = np.atleast_1d(r).astype(float)
    t = np.atleast_1d(t).astype(float)
    d = quantiser.d
    delta = (d - 1) / 2.0
    if isinstance(quantiser, SphereUniform):
        out = _hit_sphere(quantiser.a, r, t, delta)
    elif isinstance(quantiser, SphereWithAtom):
        out = quantiser.alpha * _hit_sphere(quantiser.a, r, t, delta)
        out = out + (1.0 - quantiser.alpha) * (t >= r)
    elif quantiser.value == 0:
        out = np.where(t >= r, 1.0, 0.0)
    elif method == "integral":
        out = _hit_radial_integral(quantiser.radial_law(), r, t, delta, radial_nodes, tol)
    elif method != "auto":
        raise ValueError(f"unknown method {method!r}")
    elif isinstance(quantiser, BallUniform):
        out = _hit_ball_closed(quantiser.b, r, t, d)
    elif isinstance(quantiser, NormalScaled):
        out = _hit_normal_closed(quantiser.sigma, r, t, d)
    else:
        raise TypeError(f"unsupported quantiser {quantiser!r}")
    return float(out[0]) if scalar else out.reshape(r.shape)


def miss_power(p, n):
    """``(1 - p)^n`` computed as ``exp(n log1p(-p))``."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(n * np.log1p(-np.clip(p, 0.0, 1.0)))
    return np.where(p >= 1.0, 0.0, out)


# ------------------------------------------------------------ t-integration


def _t_range(quantiser, r):
    """``(t_lo, t_hi, interior)``: p = 0 below t_lo, p = 1 above t_hi."""
    if isinstance(quantiser, SphereUniform):
        return abs(r - quantiser.a), r + quantiser.a, []
    if isinstance(quantiser, SphereWithAtom):
        al, a = quantiser.alpha, quantiser.a
        if al == 0.0:
            return r, r, []
        if al == 1.0:
            return abs(r - a), r + a, []
        return min(abs(r - a), r), r + a, [r, abs(r - a)]
    if quantiser.value == 0:
        return r, r, []
    if isinstance(quantiser, BallUniform):
        b = quantiser.b
        return max(r - b, 0.0), r + b, [r, abs(b - r)]
    if isinstance(quantiser, NormalScaled):
        lo_s, hi_s = quantiser.radial_law().support()
        return max(r - hi_s, 0.0), r + hi_s, [r, abs(r - lo_s)]
    raise TypeError(f"unsupported quantiser {quantiser!r}")


def _graded(lo, hi, n, delta):
    # Breakpoints accumulating geometrically at lo, down to the width of the
    # (1 - p)^n boundary layer (about kappa_{n,d} ~ n^{-1/delta} relative).
    if hi <= lo:
        return []
    levels = int(min(60, math.ceil(math.log2(max(n, 2)) / min(delta, 1.0)) + 10))
    return list(lo + (hi - lo) * np.exp2(-np.arange(1, levels + 1)))


def pointwise_distortion(q, r, method="auto"):
    """``E{d^s(u, R_n)}`` for a fixed point ``u`` with ``||u|| = r``.

    Equal to ``t_lo^s + s int_{t_lo}^{t_hi} t^{s-1} (1 - p(r, t))^n dt`` where
    ``p`` vanishes below ``t_lo`` and equals one above ``t_hi``.
    """
    r = float(r)
    s, n, cfg = float(q.s), int(q.n), q.quad
    t_lo, t_hi, interior = _t_range(q.quantiser, r)
    head = t_lo ** s
    if t_hi <= t_lo:
        return head
    delta = (q.d - 1) / 2.0
    pts = [t_lo, t_hi] + _graded(t_lo, t_hi, n, delta)
    pts += [x for x in interior if t_lo < x < t_hi]
    gl_tol = max(1e-15, cfg.rel_tol / n)

    def integrand(t):
        p = hit_probability(q.quantiser, r, t, method=method,
                            radial_nodes=cfg.radial_nodes, tol=gl_tol)
        return s * t ** (s - 1.0) * miss_power(p, n)

    tail = adaptive_quad(integrand, pts, cfg.rel_tol, cfg.abs_tol, cfg.max_depth)
    return head + tail


def _radial_breaks(q):
    c = q.quantiser.max_radius() if not isinstance(q.quantiser, NormalScaled) else None
    return [] if c is None else [c]


def expected_distortion(q, method="auto"):
    """Expected ``(mu, s)``-distortion ``D_{mu,s}`` of the i.i.d. quantiser.

    Parameters
    ----------
    q : DistortionQuery
    method : {'auto', 'quadrature', 'closed', 'integral'}
        ``'auto'`` uses the polynomial closed form for ``d = 3``, even ``s``,
        sphere target and sphere quantiser, and quadrature otherwise.
        ``'integral'`` additionally forces the radial Beta-mixture integral
        for the hit probabilities of ball and normal quantisers.
    """
    if not q.s > 0:
        raise ValueError("s must be > 0")
    closed_ok = (
        q.d == 3
        and float(q.s).is_integer()
        and int(q.s) % 2 == 0
        and isinstance(q.target, PointMass)
        and isinstance(q.quantiser, SphereUniform)
    )
    if method == "closed" or (method == "auto" and closed_ok):
        if not closed_ok:
            raise ValueError("closed form needs d=3, even s, sphere target and quantiser")
        return sphere_closed_form(q.n, int(q.s), q.quantiser.a, q.target.a)
    hp = "integral" if method == "integral" else "auto"
    if method not in ("auto", "quadrature", "integral"):
        raise ValueError(f"unknown method {method!r}")
    target = q.target
    if isinstance(target, PointMass):
        return pointwise_distortion(q, target.a, method=hp)
    lo, hi = target.support()
    pts = [lo, hi] + [c for c in _radial_breaks(q) if lo < c < hi]

    def f(rr):
        vals = np.array([pointwise_distortion(q, x, method=hp) for x in rr.ravel()])
        return vals.reshape(rr.shape) * target.pdf(rr)

    cfg = q.quad
    return adaptive_quad(f, pts, cfg.rel_tol, cfg.abs_tol, cfg.max_depth)


def sphere_closed_form(n, s, a, radius=1.0):
    """Exact ``D`` for ``d = 3``, even ``s``: sphere target, sphere quantiser.

    With ``I_v(1, 1) = v`` the t-integral reduces to Beta integrals
    ``int v^j (1 - v)^n dv = j! n! / (n + j + 1)!``.
    """
    s = int(s)
    if s < 2 or s % 2:
        raise ValueError("closed form requires even s >= 2")
    m = s // 2 - 1
    c = (radius - a) ** 2
    w = 4.0 * a * radius
    total = math.fsum(
        math.comb(m, j) * c ** (m - j) * w ** j
        * math.exp(math.lgamma(j + 1) + math.lgamma(n + 1) - math.lgamma(n + j + 2))
        for j in range(m + 1)
    )
    return abs(radius - a) ** s + (s / 2.0) * w * total


def mixture_distortion(d, n, s, alpha, a, quad=None):
    """Expected distortion on the unit sphere of ``alpha P_a + (1-alpha) delta_0``.

    Piecewise in ``t``: below ``t = 1`` an empty design must miss both the
    sphere points and the origin, above it only the sphere points matter.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if not s > 0:
        raise ValueError("s must be > 0")
    cfg = quad or QuadratureConfig()
    delta = (d - 1) / 2.0
    lo, hi = abs(1.0 - a), 1.0 + a
    if a == 0.0 or alpha == 0.0:
        return 1.0
    one = np.ones(1)

    def below(t):
        return s * t ** (s - 1.0) * miss_power(alpha * _hit_sphere(a, one, t, delta), n)

    def above(t):
        return s * t ** (s - 1.0) * miss_power(_hit_sphere(a, one, t, delta), n)

    total = lo ** s
    if lo < 1.0:
        pts = [lo, 1.0] + _graded(lo, 1.0, n, delta)
        total += adaptive_quad(lambda t: below(t.ravel()).reshape(t.shape), pts,
                               cfg.rel_tol, cfg.abs_tol, cfg.max_depth)
    start = max(lo, 1.0)
    if start < hi and alpha > 0:
        pts = [start, hi] + _graded(start, hi, n, delta)
        tail = adaptive_quad(lambda t: above(t.ravel()).reshape(t.shape), pts,
                             cfg.rel_tol, cfg.abs_tol, cfg.max_depth)
        total += alpha ** n * tail
    return total


# ------------------------------------------------------- distance c.d.f.


def distance_support(q):
    """``(t_min, t_max)`` of the nearest-point distance ``d(U, R_n)``."""
    target = q.target
    lo, hi = target.support()
    cands = {lo, hi}
    c = q.quantiser.max_radius()
    if lo < c < hi:
        cands.add(c)
    t_min = min(_t_range(q.quantiser, x)[0] for x in cands)
    t_max = max(_t_range(q.quantiser, x)[1] for x in (lo, hi))
    return t_min, t_max


def mean_distance_cdf(q, t, method="auto"):
    """Mean distance c.d.f. ``F_n(t) = 1 - E_mu{(1 - p(||U||, t))^n}``.

    Vectorised over ``t``; for continuous targets the outer expectation is an
    adaptive integral over the target radius for every ``t``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    scalar = t.ndim == 0
    tt = np.atleast_1d(t)
    n, cfg = int(q.n), q.quad
    gl_tol = max(1e-15, cfg.rel_tol / n)
    target = q.target

    def miss(r, tv):
        p = hit_probability(q.quantiser, r, tv, method=method,
                            radial_nodes=cfg.radial_nodes, tol=gl_tol)
        return miss_power(p, n)

    if isinstance(target, PointMass):
        out = 1.0 - miss(np.full(tt.shape, target.a), tt)
    else:
        lo, hi = target.support()
        c = q.quantiser.max_radius()
        out = np.empty(tt.shape)
        for i, tv in enumerate(tt.flat):
            pts = [lo, hi] + [x for x in (tv, abs(tv - c), tv + c, c - tv, c) if lo < x < hi]

            def f(rr, tv=tv):
                return miss(rr.ravel(), tv).reshape(rr.shape) * target.pdf(rr)

            out.flat[i] = 1.0 - adaptive_quad(f, pts, cfg.rel_tol, cfg.abs_tol, cfg.max_depth)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def expected_distortion_via_cdf(q):
    """``s int t^{s-1} [1 - F_n(t)] dt`` built on :func:`mean_distance_cdf`.

    An independent ordering of the same nested integral, kept as a
    consistency check on :func:`expected_distortion`.
    """
    s = float(q.s)
    t_min, t_max = distance_support(q)
    head = t_min ** s
    if t_max <= t_min:
        return head
    delta = (q.d - 1) / 2.0
    pts = [t_min, t_max] + _graded(t_min, t_max, q.n, delta)
    if isinstance(q.target, PointMass):
        pts += [x for x in _t_range(q.quantiser, q.target.a)[2] if t_min < x < t_max]

    def f(t):
        flat = t.ravel()
        return (s * flat ** (s - 1.0) * (1.0 - mean_distance_cdf(q, flat))).reshape(t.shape)

    cfg = q.quad
    return head + adaptive_quad(f, pts, cfg.rel_tol, cfg.abs_tol, cfg.max_depth)


def distance_quantile(q, gamma, tol=1e-9):
    """``gamma``-quantile of the mean distance c.d.f. by bisection.

    ``gamma = 0`` and ``gamma = 1`` return the support endpoints.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    t_min, t_max = distance_support(q)
    if gamma == 0.0:
        return t_min
    if gamma == 1.0:
        return t_max
    lo, hi = t_min, t_max
    f_lo = mean_distance_cdf(q, lo)
    if f_lo >= gamma:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = mean_distance_cdf(q, mid)
        if abs(fm - gamma) <= tol and hi - lo < 1e-12 * max(1.0, hi):
            break
        if fm < gamma:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
