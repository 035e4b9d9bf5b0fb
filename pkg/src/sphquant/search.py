"""One-dimensional optimisation of quantiser parameters and crossover search."""

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .engine import DistortionQuery, expected_distortion
from .models import NormalScaled, SphereWithAtom

__all__ = [
    "SearchConfig",
    "ConvergenceWarning",
    "golden_section",
    "parameter_range",
    "optimal_parameter",
    "CrossoverResult",
    "crossover_size",
]

log = logging.getLogger(__name__)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SearchConfig:
    lo: float
    hi: float
    tol: float = 1e-6
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("SearchConfig needs lo < hi")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 3:
            raise ValueError("max_iter must be >= 3")


def golden_section(f, cfg):
    """Golden-section minimisation of a unimodal ``f`` on ``[cfg.lo, cfg.hi]``.

    Returns
    -------
    (x, fx)
        Best point seen and its value. Warns with :class:`ConvergenceWarning`
        when ``max_iter`` evaluations do not shrink the bracket below ``tol``.
    """
    a, b = float(cfg.lo), float(cfg.hi)
    c = b - _INVPHI * (b - a)
    e = a + _INVPHI * (b - a)
    fc, fe = f(c), f(e)
    evals = 2
    best = min((fc, c), (fe, e))
    while b - a > cfg.tol:
        if evals >= cfg.max_iter:
            warnings.warn(f"golden_section stopped after {evals} evaluations with "
                          f"bracket width {b - a:.3g} > tol {cfg.tol:.3g}",
                          ConvergenceWarning, stacklevel=2)
            break
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, e, fe
            e = a + _INVPHI * (b - a)
            fe = f(e)
            best = min(best, (fe, e))
        evals += 1
    return best[1], best[0]


def parameter_range(q):
    """Search interval for the free parameter of ``q.quantiser``."""
    fam = q.quantiser
    if isinstance(fam, SphereWithAtom):
        return 0.0, 1.0
    target = q.target
    top = target.a if not target.continuous else float(target.quantile(1.0 - 1e-6))
    hi = 1.5 * top
    if isinstance(fam, NormalScaled):
        # the optimum is never near 0 and tiny scales are costly to evaluate
        return 1e-2 * hi, hi
    return 0.0, hi


def optimal_parameter(q, cfg=None, coarse=33, method="auto"):
    """Optimise the family parameter of ``q.quantiser`` for the distortion.

    A ``coarse``-point scan over the parameter range brackets the minimum,
    then golden-section search refines it.

    Parameters
    ----------
    q : DistortionQuery
        Template; the current parameter value of the quantiser is ignored.
    cfg : SearchConfig, optional
        Overrides the default range and tolerance.
    coarse : int
        Scan size; 0 or 1 skips the scan.

    Returns
    -------
    (value, distortion)
    """
    lo, hi = parameter_range(q)
    tol, max_iter = 1e-6, 200
    if cfg is not None:
        lo, hi, tol, max_iter = cfg.lo, cfg.hi, cfg.tol, cfg.max_iter

    def objective(x):
        return expected_distortion(q.with_quantiser(q.quantiser.with_value(x)), method=method)

    if coarse and coarse > 1:
        grid = np.linspace(lo, hi, int(coarse))
        vals = np.array([objective(x) for x in grid])
        i = int(np.argmin(vals))
        inner = vals[1:-1]
        # more than one strict local minimum suggests multimodality
        n_min = int(np.sum((inner < vals[:-2]) & (inner < vals[2:])))
        if n_min > 1:
            log.warning("distortion is not unimodal on the scan; keeping the global scan minimum")
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    return golden_section(objective, SearchConfig(lo, hi, tol, max_iter))


@dataclass
class CrossoverResult:
    """Outcome of :func:`crossover_size`.

    ``n_star`` is None when no sign change was found; ``scan`` records every
    evaluated ``(n, D_A, D_B)`` in evaluation order.
    """

    n_star: int | None
    message: str
    scan: list = field(default_factory=list)


def crossover_size(d, s, family_a, family_b, n_hi, target, coarse=17, tol=1e-5, quad=None,
                   patience=3):
    """Largest ``n <= n_hi`` at which optimised ``family_a`` beats ``family_b``.

    A doubling scan ``n = 2, 4, 8, ...`` finds the last ``n`` where ``A`` wins
    (``D_A* < D_B*``); the scan stops once ``A`` has lost at ``patience``
    consecutive points. Bisection on ``log n`` then locates the sign change
    after that ``n``. Optimal values are memoised per ``(family, n)``.
    """
    from .quadrature import QuadratureConfig

    quad = quad or QuadratureConfig()
    memo = {}

    def best(fam, n):
        key = (type(fam).__name__, n)
        if key not in memo:
            q = DistortionQuery(d, n, s, target, fam, quad)
            memo[key] = optimal_parameter(q, SearchConfig(*parameter_range(q), tol=tol),
                                          coarse=coarse)[1]
        return memo[key]

    scan = []

    def gap(n):
        da, db = best(family_a, n), best(family_b, n)
        scan.append((n, da, db))
        log.info("crossover scan d=%s n=%s D_A=%.12g D_B=%.12g", d, n, da, db)
        return da - db

    if type(family_a) is type(family_b):
        return CrossoverResult(None, "identical families: no crossover", scan)
    n_hi = int(n_hi)
    # doubling scan: locate the last n where A wins, stop after `patience`
    # consecutive points where it does not
    last_neg, first_pos, misses, n = None, None, 0, 2
    while True:
        if gap(n) < 0:
            last_neg, first_pos, misses = n, None, 0
        else:
            if last_neg is not None and first_pos is None:
                first_pos = n
            misses += 1
        if n >= n_hi or (last_neg is not None and misses >= patience):
            break
        n = min(2 * n, n_hi)
    if last_neg is None:
        return CrossoverResult(None, f"family A never better on the scan up to {n}", scan)
    if first_pos is None:
        return CrossoverResult(None, f"no crossover <= {n_hi}", scan)
    lo, hi = last_neg, first_pos
    while hi - lo > 1:
        mid = int(round(math.sqrt(lo * hi)))
        mid = min(max(mid, lo + 1), hi - 1)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return CrossoverResult(lo, "ok", scan)
