import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sphquant.evt import (
    Exponential,
    SubExponential,
    SuperExponential,
    evt_distortion,
    evt_limit_radius,
    evt_mean_level,
    evt_optimal_radius,
    evt_pointwise_moments,
    evt_quantile,
    evt_summary,
    kappa,
    kappa_bounds,
    kappa_limit,
    weibull_moment,
    weibull_rule,
)
from sphquant.models import BallPower, PointMass, ScaledChi
from sphquant.montecarlo import make_rng
from sphquant.search import SearchConfig, golden_section


def test_kappa_examples():
    assert kappa(100, 3) == pytest.approx(0.01, rel=1e-14)
    assert kappa(10, 5) == pytest.approx(0.19580010565909176, rel=1e-13)
    lo, hi = kappa_bounds(100, 5)
    assert lo == pytest.approx(0.005025, abs=1e-6)
    assert hi == pytest.approx(0.06152, abs=1e-5)
    assert lo <= kappa(100, 5) <= hi


def test_kappa_domain():
    with pytest.raises(ValueError):
        kappa(10, 2)
    with pytest.raises(ValueError):
        kappa(1, 5)
    with pytest.raises(ValueError):
        kappa_bounds(100, 4)


def test_kappa_monotone_grid():
    ns = np.unique(np.round(np.logspace(np.log10(3), 5, 25)).astype(int))
    table = np.array([[kappa(int(n), d) for n in ns] for d in range(3, 31)])
    assert np.all((table > 0) & (table < 0.5))
    # n = 2 gives the median of a symmetric law
    assert all(kappa(2, d) == pytest.approx(0.5, abs=1e-14) for d in range(3, 31))
    assert np.all(np.diff(table, axis=1) < 0)
    assert np.all(np.diff(table, axis=0) > 0)


def test_kappa_bounds_clamp():
    lo, hi = kappa_bounds(2, 30)
    assert hi == 0.5 and lo <= kappa(2, 30)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(5, 40), logn=st.floats(math.log(2), math.log(1e6)))
def test_kappa_bounds_bracket(d, logn):
    n = math.exp(logn)
    lo, hi = kappa_bounds(n, d)
    # the bracket is tight at n = 2, so allow rounding there
    assert lo - 1e-15 <= kappa(n, d) <= hi + 1e-15


def test_regime_limits():
    assert kappa_limit(Exponential(2.0)) == pytest.approx(0.5 * (1 - math.sqrt(3) / 2))
    assert kappa_limit(SubExponential()) == 0.5
    assert kappa_limit(SuperExponential()) == 0.0
    assert evt_limit_radius(Exponential(2.0)) == pytest.approx(math.sqrt(3) / 2)
    assert evt_limit_radius(SubExponential()) == 0.0
    assert evt_limit_radius(SuperExponential()) == 1.0
    with pytest.raises(ValueError):
        Exponential(1.0)
    with pytest.raises(TypeError):
        kappa_limit("fast")


def test_kappa_approaches_exponential_limit():
    gaps = [abs(kappa(2.0 ** d, d) - kappa_limit(Exponential(2.0))) for d in (10, 20, 40, 60)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


@pytest.mark.parametrize("d", [3, 4, 5, 10, 40, 301])
def test_weibull_rule_moments(d):
    delta = (d - 1) / 2
    z, w = weibull_rule(delta)
    for k in range(9):
        assert z ** k @ w == pytest.approx(special.gamma(1 + k / delta), rel=1e-13)


def test_weibull_rule_against_mpmath_integral():
    delta = 2.5
    z, w = weibull_rule(delta)
    f = lambda x: (0.3 + x) ** 1.5  # noqa: E731
    ref = mp.quad(lambda x: (mp.mpf(0.3) + x) ** 1.5 * delta * x ** (delta - 1)
                  * mp.exp(-x ** delta), [0, 1, 3, mp.inf])
    assert f(z) @ w == pytest.approx(float(ref), rel=1e-12)


def test_evt_distortion_examples():
    assert evt_distortion(PointMass(1.0, 3), 0.98, 100, 3, 2) == pytest.approx(0.0396, rel=1e-12)
    for target in (PointMass(1.0, 7), BallPower(1.0, 7), ScaledChi(1.0, 7)):
        for s in (1, 2, 3, 4):
            assert evt_distortion(target, 0.0, 50, 7, s) == pytest.approx(target.moment(s), rel=1e-9)


@pytest.mark.parametrize("s", [1, 3, 2.5])
def test_evt_distortion_general_s_against_mpmath(s):
    d, n, a = 8, 300, 0.8
    kap = kappa(n, d)
    delta = (d - 1) / 2
    ref = mp.quad(lambda z: ((1 - a) ** 2 + 4 * a * kap * z) ** (s / 2) * delta * z ** (delta - 1)
                  * mp.exp(-z ** delta), [0, 1, 3, mp.inf])
    assert evt_distortion(PointMass(1.0, d), a, n, d, s) == pytest.approx(float(ref), rel=1e-11)


def test_optimal_radius_examples():
    assert evt_optimal_radius(PointMass(1.0, 3), 100, 3, 2) == pytest.approx(0.98, rel=1e-14)
    # exact optimum (n-1)/(n+1) vs approximation
    assert abs(evt_optimal_radius(PointMass(1.0, 3), 100, 3, 2) - 99 / 101) < 3e-4


@pytest.mark.parametrize("target", [PointMass(1.0, 10), BallPower(1.0, 10), ScaledChi(1.0, 10)],
                         ids=repr)
@pytest.mark.parametrize("s", [2, 4])
def test_optimal_radius_matches_golden_section(target, s):
    a = evt_optimal_radius(target, 1000, 10, s)
    g, _ = golden_section(lambda x: evt_distortion(target, x, 1000, 10, s),
                          SearchConfig(0.0, 1.5, tol=1e-9))
    assert a == pytest.approx(g, abs=1e-6)


def test_optimal_radius_general_s():
    target = PointMass(1.0, 10)
    a3 = evt_optimal_radius(target, 1000, 10, 3)
    left = evt_distortion(target, a3 - 1e-3, 1000, 10, 3)
    right = evt_distortion(target, a3 + 1e-3, 1000, 10, 3)
    mid = evt_distortion(target, a3, 1000, 10, 3)
    assert mid <= left and mid <= right


def weibull_sample(delta, size, seed):
    return make_rng(seed).weibull(delta, size)


def test_pointwise_moments_against_weibull_sampling():
    d, n, a, r = 7, 200, 0.8, 0.9
    delta = (d - 1) / 2
    kap = kappa(n, d)
    xi = weibull_sample(delta, 2_000_000, 3)
    for s in (2, 4):
        x = ((r - a) ** 2 + 4 * a * r * kap * xi) ** (s / 2)
        mean, var = evt_pointwise_moments(r, a, n, d, s)
        assert mean == pytest.approx(x.mean(), rel=5 * x.std() / math.sqrt(x.size) / x.mean())
        assert var == pytest.approx(x.var(), rel=0.01)


def test_var4_exact_against_quadrature_and_printed_variant():
    d, n, a = 9, 1000, 0.85
    kap = kappa(n, d)
    delta = (d - 1) / 2
    dens = lambda z: delta * z ** (delta - 1) * mp.exp(-z ** delta)  # noqa: E731
    y = lambda z: ((1 - a) ** 2 + 4 * a * kap * z) ** 2  # noqa: E731
    m1 = mp.quad(lambda z: y(z) * dens(z), [0, 1, 3, mp.inf])
    m2 = mp.quad(lambda z: y(z) ** 2 * dens(z), [0, 1, 3, mp.inf])
    ref = float(m2 - m1 ** 2)
    _, exact = evt_pointwise_moments(1.0, a, n, d, 4)
    _, printed = evt_pointwise_moments(1.0, a, n, d, 4, var4="printed")
    assert exact == pytest.approx(ref, rel=1e-9)
    assert abs(printed - ref) > 1e-3 * ref


def test_pointwise_moment_examples():
    n, a = 50, 0.6
    _, var = evt_pointwise_moments(1.0, a, n, 3, 2)
    assert var == pytest.approx(16 * a * a / n ** 2, rel=1e-12)
    mean, _ = evt_pointwise_moments(1.0, a, n, 8, 2)
    assert mean == pytest.approx(evt_distortion(PointMass(1.0, 8), a, n, 8, 2), rel=1e-12)
    assert evt_pointwise_moments(1.0, a, 10, 8, 3)[1] is None
    vars_ = [evt_pointwise_moments(1.0, a, n, 8, 2)[1] for n in (10, 100, 1000, 10000)]
    assert all(b < a for a, b in zip(vars_, vars_[1:]))


def test_quantile_identities():
    gamma = 1 - math.exp(-1)
    for d in (3, 8, 21):
        kap = kappa(500, d)
        q, a_star = evt_quantile(gamma, 0.9, 500, d)
        assert q == pytest.approx(math.sqrt(0.01 + 4 * 0.9 * kap), rel=1e-12)
        q_star, _ = evt_quantile(gamma, a_star, 500, d)
        assert q_star ** 2 == pytest.approx(4 * kap * (1 - kap), rel=1e-12)
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError):
            evt_quantile(bad, 0.9, 100, 5)


def test_mean_level_limit():
    assert evt_mean_level(10 ** 4) == pytest.approx(1 - math.exp(-math.exp(-np.euler_gamma)),
                                                    abs=1e-3)
    # d=3: F(Gamma(2)) = 1 - e^{-1}
    assert evt_mean_level(3) == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_summary():
    summ = evt_summary(PointMass(1.0, 7), 1000, 7, 2)
    assert summ.delta == 3.0 and summ.delta_floor == 3
    lo, hi = summ.kappa_bounds
    assert lo <= summ.kappa <= hi and summ.a_hat >= 0
    assert evt_summary(PointMass(1.0, 4), 100, 4, 2).kappa_bounds is None
