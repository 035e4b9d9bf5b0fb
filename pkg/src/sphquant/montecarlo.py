"""Monte-Carlo estimation of distortions and checks of the Beta-minimum law.

All randomness comes from a counter-based Philox generator. Independent
tasks draw from child streams spawned off one ``SeedSequence``, so results
are reproducible bit for bit and independent of chunking.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .models import (
    BallPower,
    BallUniform,
    NormalScaled,
    PointMass,
    ScaledChi,
    SphereUniform,
    SphereWithAtom,
)

__all__ = [
    "McReport",
    "BetaMinReport",
    "make_rng",
    "sample_directions",
    "sample_target",
    "sample_quantiser",
    "nearest_distance",
    "mc_distortion",
    "beta_min_check",
    "ks_critical_value",
]

_CHUNK_ENTRIES = 2_000_000


def make_rng(seed, *spawn_key):
    """Philox generator for ``seed`` and an optional substream path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.Generator(np.random.Philox(ss))


def sample_directions(rng, m, d):
    """``m`` points uniform on the unit sphere of R^d."""
    g = rng.standard_normal((m, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _sample_radial(law, rng, m):
    if isinstance(law, PointMass):
        return np.full(m, float(law.a))
    if isinstance(law, BallPower):
        return law.b * rng.random(m) ** (1.0 / law.d)
    raise TypeError(f"no radial sampler for {type(law).__name__}")


def sample_target(law, m, rng):
    """``m`` draws from the spherically symmetric law with radial law ``law``."""
    if isinstance(law, ScaledChi):
        return rng.standard_normal((m, law.d)) * (law.sigma / math.sqrt(law.d))
    return sample_directions(rng, m, law.d) * _sample_radial(law, rng, m)[:, None]


def sample_quantiser(family, n, d=None, seed=0, rng=None):
    """``n`` i.i.d. points from a quantiser family, as an ``(n, d)`` array."""
    d = family.d if d is None else d
    if d != family.d:
        raise ValueError("d does not match the family dimension")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed) if rng is None else rng
    if isinstance(family, SphereUniform):
        return family.a * sample_directions(rng, n, d)
    if isinstance(family, BallUniform):
        r = family.b * rng.random(n) ** (1.0 / d)
        return sample_directions(rng, n, d) * r[:, None]
    if isinstance(family, NormalScaled):
        return rng.standard_normal((n, d)) * (family.sigma / math.sqrt(d))
    if isinstance(family, SphereWithAtom):
        pts = family.a * sample_directions(rng, n, d)
        keep = rng.random(n) < family.alpha
        pts[~keep] = 0.0
        return pts
    raise TypeError(f"unknown family {type(family).__name__}")


def nearest_distance(u, points):
    """Distance from each row of ``u`` to its nearest row of ``points``.

    Brute force, chunked over ``u`` to bound memory.
    """
    u = np.atleast_2d(u)
    points = np.atleast_2d(points)
    out = np.empty(u.shape[0])
    step = max(1, _CHUNK_ENTRIES // max(points.shape[0], 1))
    p2 = np.einsum("ij,ij->i", points, points)
    for i in range(0, u.shape[0], step):
        blk = u[i:i + step]
        u2 = np.einsum("ij,ij->i", blk, blk)
        sq = u2[:, None] + p2[None, :] - 2.0 * blk @ points.T
        j = np.argmin(sq, axis=1)
        # recompute the winner exactly to avoid cancellation in the expansion
        diff = blk - points[j]
        out[i:i + step] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return out


@dataclass(frozen=True)
class McReport:
    """Monte-Carlo distortion estimate.

    ``hoeffding_bound`` bounds ``P{|estimate - E| > deviation}`` and is only
    informative for compact targets; it is 1 otherwise, with ``deviation``
    set to None.
    """

    estimate: float
    std_error: float
    n_samples: int
    hoeffding_bound: float
    seed: int
    deviation: float | None = None
    n_designs: int = 1


def _target_max_radius(target):
    if isinstance(target, PointMass):
        return float(target.a)
    if isinstance(target, BallPower):
        return float(target.b)
    return math.inf


def mc_distortion(points, target, s, N, seed=0, alpha=0.01, n=None, n_designs=1000):
    """Monte-Carlo estimate of a ``(mu, s)``-distortion.

    Parameters
    ----------
    points : ndarray or QuantiserFamily
        A fixed ``(n, d)`` design, which estimates ``E_{mu,s}^s(X_n)``; or a
        family, in which case ``n_designs`` random ``n``-point designs each
        quantise ``N / n_designs`` target draws and the estimate targets the
        expected distortion ``D_{mu,s}``. The standard error then comes from
        the per-design means so it covers both sources of randomness.
    target : RadialLaw
    s : float
    N : int
        Total number of target draws, ``>= 2``.
    alpha : float
        Relative deviation for the Hoeffding bound ``2 exp(-2 N alpha^2)``,
        which holds at deviation ``alpha * CR^s`` with ``CR`` bounded by
        the target radius plus the largest design norm.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if not s > 0:
        raise ValueError("s must be > 0")
    ss = np.random.SeedSequence(int(seed))
    if isinstance(points, np.ndarray) or isinstance(points, (list, tuple)):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != target.d:
            raise ValueError("design dimension does not match target")
        rng = np.random.Generator(np.random.Philox(ss))
        u = sample_target(target, int(N), rng)
        vals = nearest_distance(u, pts) ** s
        est = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(N))
        reach = float(np.max(np.linalg.norm(pts, axis=1)))
        designs = 1
    else:
        family = points
        if n is None:
            raise ValueError("n is required when sampling random designs")
        designs = int(min(n_designs, N // 2))
        per = int(N) // designs
        N = per * designs
        design_ss, target_ss = ss.spawn(2)
        d_rngs = [np.random.Generator(np.random.Philox(c)) for c in design_ss.spawn(designs)]
        t_rngs = [np.random.Generator(np.random.Philox(c)) for c in target_ss.spawn(designs)]
        means = np.empty(designs)
        reach = 0.0
        for k in range(designs):
            pts = sample_quantiser(family, n, rng=d_rngs[k])
            u = sample_target(target, per, t_rngs[k])
            means[k] = np.mean(nearest_distance(u, pts) ** s)
            reach = max(reach, family.max_radius())
        est = float(np.mean(means))
        se = float(np.std(means, ddof=1) / math.sqrt(designs))
    rmax = _target_max_radius(target)
    if math.isfinite(rmax):
        dev = alpha * (rmax + reach) ** s
        bound = min(1.0, 2.0 * math.exp(-2.0 * N * alpha * alpha))
    else:
        dev, bound = None, 1.0
    return McReport(est, se, int(N), bound, int(seed), dev, designs)


def ks_critical_value(n1, n2, level=0.01):
    """Asymptotic two-sample Kolmogorov-Smirnov critical value."""
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    return c * math.sqrt((n1 + n2) / (n1 * n2))


@dataclass(frozen=True)
class BetaMinReport:
    """Two-sample comparison of squared nearest distances.

    ``passed`` is None when ``N`` is too small for the asymptotic KS value.
    """

    geometric_mean: float
    geometric_se: float
    representation_mean: float
    representation_se: float
    ks_statistic: float
    critical_value: float
    passed: bool | None
    seed: int


def beta_min_check(r, a, n, d, N, seed=0, level=0.01):
    """Compare two samplers of the squared nearest distance ``d^2(u, R_n)``.

    The geometric sampler draws ``n`` points uniform on the sphere of radius
    ``a`` and measures their nearest squared distance to ``u = (r, 0, ...)``.
    The representation sampler returns ``(r - a)^2 + 4 a r zeta`` with
    ``zeta`` the minimum of ``n`` Beta(delta, delta) draws.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    geo_ss, rep_ss = np.random.SeedSequence(int(seed)).spawn(2)
    g_rng = np.random.Generator(np.random.Philox(geo_ss))
    r_rng = np.random.Generator(np.random.Philox(rep_ss))
    geo = np.empty(N)
    step = max(1, _CHUNK_ENTRIES // (n * d))
    for i in range(0, N, step):
        m = min(step, N - i)
        z = g_rng.standard_normal((m, n, d))
        z /= np.linalg.norm(z, axis=2, keepdims=True)
        x = a * z
        x[:, :, 0] -= r
        geo[i:i + m] = np.min(np.einsum("ijk,ijk->ij", x, x), axis=1)
    delta = (d - 1) / 2.0
    zeta = np.empty(N)
    for i in range(0, N, step):
        m = min(step, N - i)
        zeta[i:i + m] = r_rng.beta(delta, delta, size=(m, n)).min(axis=1)
    rep = (r - a) ** 2 + 4.0 * a * r * zeta
    stat = float(stats.ks_2samp(geo, rep).statistic)
    crit = ks_critical_value(N, N, level)
    passed = None if N < 1000 else bool(stat <= crit)
    return BetaMinReport(
        float(geo.mean()), float(geo.std(ddof=1) / math.sqrt(N)),
        float(rep.mean()), float(rep.std(ddof=1) / math.sqrt(N)),
        stat, crit, passed, int(seed),
    )
