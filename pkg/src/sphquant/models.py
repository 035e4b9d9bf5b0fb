"""Radial laws of ``||U||`` / ``||X||`` and spherically symmetric quantiser families.

A spherically symmetric law on R^d is fully described by the distribution of
its norm, so both the target measure and the quantiser distribution are
represented here by a :class:`RadialLaw`.
"""

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .specfun import reg_inc_gamma

__all__ = [
    "RadialLaw",
    "PointMass",
    "BallPower",
    "ScaledChi",
    "QuantiserFamily",
    "SphereUniform",
    "BallUniform",
    "NormalScaled",
    "SphereWithAtom",
    "radial_moment",
    "radial_cdf",
    "radial_quantile",
    "target_from_name",
    "family_from_name",
    "law_from_json",
    "law_to_json",
]

# Tail mass dropped when truncating the chi support for quadrature.
CHI_TAIL = 1e-14


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


class RadialLaw:
    """Base class for the distribution of a Euclidean norm in dimension ``d``."""

    d: int
    continuous = True

    def cdf(self, rho):
        raise NotImplementedError

    def pdf(self, rho):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def moment(self, k):
        raise NotImplementedError

    def support(self):
        """``(lo, hi)`` interval used for quadrature (possibly truncated)."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(RadialLaw):
    """All mass at radius ``a`` (uniform law on the sphere of radius ``a``)."""

    a: float
    d: int
    continuous = False

    def __post_init__(self):
        _check_dim(self.d)
        if not self.a >= 0:
            raise ValueError("PointMass radius must be >= 0")

    def cdf(self, rho):
        out = np.where(np.asarray(rho, dtype=float) >= self.a, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out

    def pdf(self, rho):
        raise TypeError("PointMass has no density")

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        _check_prob(p)
        out = np.where(p > 0, self.a, 0.0)
        return float(out) if out.ndim == 0 else out

    def moment(self, k):
        return 1.0 if k == 0 else float(self.a) ** k

    def support(self):
        return (float(self.a), float(self.a))

    def to_dict(self):
        return {"variant": "PointMass", "params": {"a": self.a}, "d": self.d}


@dataclass(frozen=True)
class BallPower(RadialLaw):
    """Norm of a uniform point in the ball of radius ``b``: density ``d r^{d-1}/b^d``."""

    b: float
    d: int

    def __post_init__(self):
        _check_dim(self.d)
        if not self.b > 0:
            raise ValueError("BallPower radius must be > 0")

    def cdf(self, rho):
        x = np.clip(np.asarray(rho, dtype=float) / self.b, 0.0, 1.0)
        out = x ** self.d
        return float(out) if out.ndim == 0 else out

    def pdf(self, rho):
        rho = np.asarray(rho, dtype=float)
        inside = (rho >= 0) & (rho <= self.b)
        out = np.where(inside, self.d * np.clip(rho, 0, None) ** (self.d - 1) / self.b ** self.d, 0.0)
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        _check_prob(p)
        out = self.b * p ** (1.0 / self.d)
        return float(out) if out.ndim == 0 else out

    def moment(self, k):
        return self.d * self.b ** k / (self.d + k)

    def support(self):
        return (0.0, float(self.b))

    def to_dict(self):
        return {"variant": "BallPower", "params": {"b": self.b}, "d": self.d}


@dataclass(frozen=True)
class ScaledChi(RadialLaw):
    """Norm of ``N(0, sigma^2 I_d / d)``; ``d ||X||^2 / sigma^2`` is chi-square(d)."""

    sigma: float
    d: int

    def __post_init__(self):
        _check_dim(self.d)
        if not self.sigma > 0:
            raise ValueError("ScaledChi scale must be > 0")

    def cdf(self, rho):
        rho = np.clip(np.asarray(rho, dtype=float), 0.0, None)
        return reg_inc_gamma(self.d / 2.0, self.d * (rho / self.sigma) ** 2 / 2.0)

    def pdf(self, rho):
        rho = np.asarray(rho, dtype=float)
        x = np.clip(rho, 0.0, None) / self.sigma
        d = self.d
        with np.errstate(divide="ignore"):
            log_psi = (
                (d / 2.0) * math.log(d)
                - (d / 2.0 - 1.0) * math.log(2.0)
                - special.gammaln(d / 2.0)
                + (d - 1) * np.log(x)
                - d * x * x / 2.0
            )
        out = np.where(rho > 0, np.exp(log_psi) / self.sigma, 0.0)
        return float(out) if out.ndim == 0 else out

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        _check_prob(p)
        out = self.sigma * np.sqrt(2.0 * special.gammaincinv(self.d / 2.0, p) / self.d)
        return float(out) if out.ndim == 0 else out

    def moment(self, k):
        if k == 0:
            return 1.0
        d = self.d
        return float(
            self.sigma ** k * (2.0 / d) ** (k / 2.0)
            * math.exp(special.gammaln((k + d) / 2.0) - special.gammaln(d / 2.0))
        )

    def support(self):
        return (float(self.quantile(CHI_TAIL)), float(self.quantile(1.0 - CHI_TAIL)))

    def to_dict(self):
        return {"variant": "ScaledChi", "params": {"sigma": self.sigma}, "d": self.d}


def _check_prob(p):
    if np.any(~((p >= 0) & (p <= 1))):
        raise ValueError("probability must lie in [0, 1]")


def radial_moment(law, k):
    """``E{r^k}`` for a radial law."""
    if k < 0:
        raise ValueError("moment order must be >= 0")
    return law.moment(k)


def radial_cdf(law, rho):
    return law.cdf(rho)


def radial_quantile(law, p):
    return law.quantile(p)


# ---------------------------------------------------------------- quantisers


class QuantiserFamily:
    """One-parameter spherically symmetric law of the i.i.d. quantiser points.

    ``param`` names the scalar that is optimised by :mod:`sphquant.search`.
    """

    param: str
    d: int

    @property
    def value(self):
        return getattr(self, self.param)

    def with_value(self, value):
        return replace(self, **{self.param: float(value)})

    def radial_law(self):
        raise NotImplementedError

    def max_radius(self):
        raise NotImplementedError

    def to_dict(self):
        params = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "d"}
        return {"variant": type(self).__name__, "params": params, "d": self.d}


@dataclass(frozen=True)
class SphereUniform(QuantiserFamily):
    """Uniform on the sphere of radius ``a``."""

    a: float
    d: int
    param = "a"

    def __post_init__(self):
        _check_dim(self.d)
        if not self.a >= 0:
            raise ValueError("sphere radius must be >= 0")

    def radial_law(self):
        return PointMass(self.a, self.d)

    def max_radius(self):
        return float(self.a)


@dataclass(frozen=True)
class BallUniform(QuantiserFamily):
    """Uniform in the ball of radius ``b``."""

    b: float
    d: int
    param = "b"

    def __post_init__(self):
        _check_dim(self.d)
        if not self.b >= 0:
            raise ValueError("ball radius must be >= 0")

    def radial_law(self):
        return PointMass(0.0, self.d) if self.b == 0 else BallPower(self.b, self.d)

    def max_radius(self):
        return float(self.b)


@dataclass(frozen=True)
class NormalScaled(QuantiserFamily):
    """Isotropic normal ``N(0, sigma^2 I_d / d)``."""

    sigma: float
    d: int
    param = "sigma"

    def __post_init__(self):
        _check_dim(self.d)
        if not self.sigma >= 0:
            raise ValueError("normal scale must be >= 0")

    def radial_law(self):
        return PointMass(0.0, self.d) if self.sigma == 0 else ScaledChi(self.sigma, self.d)

    def max_radius(self):
        return 0.0 if self.sigma == 0 else self.radial_law().support()[1]


@dataclass(frozen=True)
class SphereWithAtom(QuantiserFamily):
    """Mixture ``alpha * Uniform(S(a)) + (1 - alpha) * delta_0``."""

    alpha: float
    a: float
    d: int
    param = "alpha"

    def __post_init__(self):
        _check_dim(self.d)
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not self.a >= 0:
            raise ValueError("sphere radius must be >= 0")

    def radial_law(self):
        raise TypeError("SphereWithAtom has a two-atom radial law; use its fields")

    def max_radius(self):
        return float(self.a)


_TARGETS = {
    "sphere": lambda d, scale=1.0: PointMass(scale, d),
    "ball": lambda d, scale=1.0: BallPower(scale, d),
    "normal": lambda d, scale=1.0: ScaledChi(scale, d),
}

_FAMILIES = {
    "sphere": lambda d, v=1.0: SphereUniform(v, d),
    "ball": lambda d, v=1.0: BallUniform(v, d),
    "normal": lambda d, v=1.0: NormalScaled(v, d),
    "atom-sphere": lambda d, v=1.0, a=1.0: SphereWithAtom(v, a, d),
}


def target_from_name(name, d, scale=1.0):
    """``'sphere' | 'ball' | 'normal'`` -> unit-scale target radial law."""
    try:
        return _TARGETS[name](d, scale)
    except KeyError:
        raise ValueError(f"unknown target {name!r}; expected one of {sorted(_TARGETS)}") from None


def family_from_name(name, d, value=1.0, **kw):
    """``'sphere' | 'ball' | 'normal' | 'atom-sphere'`` -> quantiser family."""
    try:
        return _FAMILIES[name](d, value, **kw)
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(_FAMILIES)}") from None


_VARIANTS = {
    "PointMass": PointMass,
    "BallPower": BallPower,
    "ScaledChi": ScaledChi,
    "SphereUniform": SphereUniform,
    "BallUniform": BallUniform,
    "NormalScaled": NormalScaled,
    "SphereWithAtom": SphereWithAtom,
}


def law_to_json(obj):
    """Serialise a radial law or quantiser family to a JSON string."""
    return json.dumps(obj.to_dict(), sort_keys=True)


def law_from_json(text_or_dict):
    """Inverse of :func:`law_to_json`; accepts a JSON string or a dict."""
    cfg = json.loads(text_or_dict) if isinstance(text_or_dict, str) else dict(text_or_dict)
    try:
        cls = _VARIANTS[cfg["variant"]]
    except KeyError:
        raise ValueError(f"unknown or missing variant in {cfg!r}") from None
    params = {k: float(v) for k, v in cfg.get("params", {}).items()}
    return cls(d=int(cfg["d"]), **params)
