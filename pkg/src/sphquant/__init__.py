"""Non-asymptotic quantisation of spherically symmetric distributions.

Exact expected distortions of random i.i.d. quantisers, their optimisation,
extreme-value approximations and Monte-Carlo validation.
"""

from .designs import (
    FactorialDesign,
    factorial_covering_radius,
    factorial_distortion,
    factorial_optimal,
)
from .engine import (
    DistortionQuery,
    distance_quantile,
    expected_distortion,
    expected_distortion_via_cdf,
    hit_probability,
    mean_distance_cdf,
    mixture_distortion,
    nu_factor,
    pointwise_distortion,
    sphere_closed_form,
)
from .evt import (
    EvtSummary,
    Exponential,
    GrowthRegime,
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
)
from .models import (
    BallPower,
    BallUniform,
    NormalScaled,
    PointMass,
    ScaledChi,
    SphereUniform,
    SphereWithAtom,
    family_from_name,
    law_from_json,
    law_to_json,
    radial_cdf,
    radial_moment,
    radial_quantile,
    target_from_name,
)
from .montecarlo import McReport, beta_min_check, mc_distortion, sample_quantiser
from .quadrature import QuadratureConfig, QuadratureError
from .search import SearchConfig, crossover_size, golden_section, optimal_parameter
from .specfun import inv_reg_inc_beta, ln_beta, ln_gamma, reg_inc_beta, reg_inc_gamma

__version__ = "0.1.0"
