"""Acceptance gate: one test per criterion, each reporting PASS/FAIL with detail."""

import math
import time

import numpy as np
import pytest
from scipy import special

from sphquant import (
    BallPower,
    DistortionQuery,
    NormalScaled,
    PointMass,
    ScaledChi,
    SearchConfig,
    SphereUniform,
    beta_min_check,
    crossover_size,
    evt_distortion,
    evt_optimal_radius,
    expected_distortion,
    factorial_covering_radius,
    factorial_distortion,
    factorial_optimal,
    golden_section,
    kappa,
    kappa_bounds,
    mc_distortion,
    mixture_distortion,
    optimal_parameter,
)


def sphere_query(d, n, s):
    return DistortionQuery(d, n, s, PointMass(1.0, d), SphereUniform(1.0, d))


def test_c01_closed_form_d3(acceptance):
    t0 = time.perf_counter()
    worst_a = worst_d = 0.0
    for n in (3, 9, 99, 999):
        a, dist = optimal_parameter(sphere_query(3, n, 2))
        worst_a = max(worst_a, abs(a - (n - 1) / (n + 1)))
        worst_d = max(worst_d, abs(dist - ((1 - a) ** 2 + 4 * a / (n + 1))))
    elapsed = time.perf_counter() - t0
    ok = worst_a < 1e-4 and worst_d < 1e-8 and elapsed < 10
    acceptance(1, ok, f"max|a*-(n-1)/(n+1)|={worst_a:.2e} max|D*-closed|={worst_d:.2e} "
                      f"time={elapsed:.2f}s")
    assert ok


def test_c02_d3_s4_asymptote(acceptance):
    n = 10 ** 4
    a, _ = optimal_parameter(sphere_query(3, n, 4))
    err = abs(a - (1 - 4 / n + 16 / n ** 2))
    acceptance(2, err < 1e-3, f"|a*(3,1e4,4) - (1-4/n+16/n^2)|={err:.2e}")
    assert err < 1e-3


def test_c03_kappa_identities_and_bounds(acceptance):
    t0 = time.perf_counter()
    ns = np.unique(np.round(np.logspace(np.log10(2), 5, 200)).astype(int))
    err3 = max(abs(kappa(int(n), 3) - 1.0 / n) for n in ns)
    bracket = all(
        lo <= kappa(n, d) <= hi
        for d in (5, 7, 11, 21)
        for n in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5)
        for lo, hi in [kappa_bounds(n, d)]
    )
    elapsed = time.perf_counter() - t0
    ok = err3 < 1e-12 and bracket and elapsed < 5
    acceptance(3, ok, f"max|kappa(n,3)-1/n|={err3:.2e} bounds bracket={bracket} "
                      f"time={elapsed:.2f}s")
    assert ok


def test_c04_exponential_regime(acceptance):
    e_kappa = abs(kappa(2.0 ** 60, 60) - 0.066987)
    e_rad = {s: abs(evt_optimal_radius(PointMass(1.0, 20), 2 ** 20, 20, s) - math.sqrt(3) / 2)
             for s in (2, 4)}
    ok = e_kappa < 0.01 and all(v < 0.02 for v in e_rad.values())
    acceptance(4, ok, f"|kappa(2^60,60)-0.066987|={e_kappa:.4f} "
                      f"|a_hat-sqrt(3)/2| s=2:{e_rad[2]:.4f} s=4:{e_rad[4]:.4f}")
    assert ok


def test_c05_evt_closed_vs_quadrature(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240501)
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(3, 31))
        kind = rng.integers(3)
        target = (PointMass(1.0, d), BallPower(1.0, d), ScaledChi(1.0, d))[kind]
        a = float(rng.uniform(0.0, 1.5))
        n = int(round(10 ** rng.uniform(math.log10(2), 5)))
        for s in (2, 4):
            c = evt_distortion(target, a, n, d, s, method="closed")
            q = evt_distortion(target, a, n, d, s, method="quadrature")
            worst = max(worst, abs(c - q))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and elapsed < 30
    acceptance(5, ok, f"max|closed-quadrature|={worst:.2e} over 50 tuples x s in {{2,4}} "
                      f"time={elapsed:.2f}s")
    assert ok


def test_c06_corollary_identity(acceptance):
    worst = 0.0
    for d in range(3, 31):
        for target in (PointMass(1.0, d), BallPower(1.0, d), ScaledChi(1.0, d)):
            for n in (10, 1000, 10 ** 5):
                a = evt_optimal_radius(target, n, d, 2)
                e2 = evt_distortion(target, a, n, d, 2)
                worst = max(worst, abs(e2 + a * a - target.moment(2)))
    acceptance(6, worst < 1e-12, f"max|E2(a_hat)+a_hat^2-M2|={worst:.2e}")
    assert worst < 1e-12


def test_c07_factorial_closed_forms(acceptance):
    b2, v2 = factorial_optimal(3, 2)
    exact3 = b2 == 0.5 and v2 == 0.25 and factorial_distortion(3, 0.5, 2) == 0.25
    cr_ok = all(
        factorial_optimal(d, math.inf) == (1 / d, math.sqrt(1 - 1 / d))
        and abs(factorial_covering_radius(d, 1 / d) - math.sqrt(1 - 1 / d))
        <= 2 * math.ulp(math.sqrt(1 - 1 / d))
        for d in range(2, 201)
    )
    lim = abs(math.sqrt(200) * factorial_optimal(200, 2)[0] - math.sqrt(2 / math.pi))
    ok = exact3 and cr_ok and lim < 0.005
    acceptance(7, ok, f"b2*(3)=1/2,D=1/4 exact={exact3} CR(b_inf)=sqrt(1-1/d)={cr_ok} "
                      f"|sqrt(200)b2*-sqrt(2/pi)|={lim:.4f}")
    assert ok


def test_c08_monte_carlo_agreement(acceptance):
    t0 = time.perf_counter()
    d, n = 10, 100
    a, exact = optimal_parameter(sphere_query(d, n, 2))
    inside = 0
    for seed in range(100):
        rep = mc_distortion(SphereUniform(a, d), PointMass(1.0, d), 2, 10 ** 5, seed=seed, n=n)
        inside += abs(rep.estimate - exact) <= 3 * rep.std_error
    elapsed = time.perf_counter() - t0
    ok = inside >= 99 and elapsed < 120
    acceptance(8, ok, f"{inside}/100 replications within 3 SE of D={exact:.6f} "
                      f"time={elapsed:.1f}s")
    assert ok


def test_c09_beta_minimum(acceptance):
    passes = sum(bool(beta_min_check(0.9, 0.7, 50, 7, 20000, seed=s).passed) for s in range(100))
    a, n = 0.7, 50
    rep = beta_min_check(1.0, a, n, 3, 20000, seed=12345)
    target = (1 - a) ** 2 + 4 * a / (n + 1)
    z = abs(rep.geometric_mean - target) / rep.geometric_se
    ok = passes >= 95 and z <= 3
    acceptance(9, ok, f"KS passes {passes}/100; d=3 mean z-score={z:.2f}")
    assert ok


def test_c10_mixture_optimum(acceptance):
    alpha, _ = golden_section(lambda x: mixture_distortion(10, 20, 10, x, 1.0),
                              SearchConfig(0.0, 1.0, tol=1e-6))
    err = abs(alpha - 0.846)
    acceptance(10, err <= 0.01, f"alpha*={alpha:.5f} (target 0.846 +- 0.01)")
    assert err <= 0.01


def test_c11_sigma_star_moderate_n(acceptance):
    d = 5
    q = DistortionQuery(d, 1000, 2, ScaledChi(1.0, d), NormalScaled(1.0, d))
    sigma, _ = optimal_parameter(q)
    ok = 1.17 <= sigma <= 1.20 and sigma < 1.4
    acceptance(11, ok, f"sigma*(5,1e3,2)={sigma:.5f} (required in [1.17, 1.20], < 1.4)")
    assert ok


@pytest.mark.slow
def test_c12_crossover_scaling(acceptance):
    t0 = time.perf_counter()
    dims = list(range(3, 9))
    stars = []
    for d in dims:
        res = crossover_size(d, 2, SphereUniform(1.0, d), NormalScaled(1.0, d), 10 ** 5,
                             ScaledChi(1.0, d))
        stars.append(res.n_star)
    elapsed = time.perf_counter() - t0
    found = all(x is not None for x in stars)
    slope = np.polyfit(dims, np.log(stars), 1)[0] if found else float("nan")
    monotone = found and all(b > a for a, b in zip(stars, stars[1:]))
    ok = found and 0.6 <= slope <= 0.9 and elapsed <= 1800
    acceptance(12, ok, f"n*={stars} slope={slope:.4f} (log 2.08=0.732) increasing={monotone} "
                       f"time={elapsed:.0f}s")
    assert ok


def test_c13_evt_accuracy_trend(acceptance):
    d = 10
    details, ok = [], True
    for s in (2, 4):
        errs = []
        for n in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5):
            a, exact = optimal_parameter(sphere_query(d, n, s))
            approx = evt_distortion(PointMass(1.0, d), a, n, d, s)
            errs.append(abs(1 - (approx / exact) ** (1 / s)))
        dec = all(b < a for a, b in zip(errs, errs[1:]))
        ok = ok and dec and errs[-1] < 0.05
        details.append(f"s={s}: " + ",".join(f"{e:.3e}" for e in errs) + f" decreasing={dec}")
    acceptance(13, ok, "; ".join(details))
    assert ok
