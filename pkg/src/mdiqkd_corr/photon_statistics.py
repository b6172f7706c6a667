"""Photon-number statistics of phase-randomized weak coherent pulses.

The mean photon number actually emitted in a round may differ from the
selected setting.  Two descriptions of that deviation are supported: a
worst-case interval around the setting, and a truncated Gaussian density
over the admissible intensities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

from scipy.integrate import quad
from scipy.special import gammainc

if TYPE_CHECKING:  # pragma: no cover
    from .correlation_overlap import CorrelationSpec

__all__ = [
    "DegenerateTruncationError",
    "IntensityInterval",
    "ProbabilityInterval",
    "TruncatedGaussianParams",
    "photon_number_cutoff",
    "pnm_actual",
    "pnm_interval",
    "poisson_pmf",
    "tg_pdf",
    "tg_photon_prob",
]

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Below this mass the truncation window is numerically empty.
_MIN_TRUNCATION_MASS = 1e-300

# Standardized integration window; the clipped tails hold < 1e-340 of the
# Gaussian mass, beneath float64 resolution.
_T_CUT = 40.0


class DegenerateTruncationError(ValueError):
    """The truncation window carries (numerically) zero Gaussian mass."""


@dataclass(frozen=True)
class IntensityInterval:
    """Admissible range of the actual mean photon number, 0 <= lo <= hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lo <= self.hi:
            raise ValueError(f"invalid intensity interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class ProbabilityInterval:
    """Closed probability interval, 0 <= lo <= hi <= 1."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"invalid probability interval [{self.lo}, {self.hi}]")

    def contains(self, p: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= p <= self.hi + slack


@dataclass(frozen=True)
class TruncatedGaussianParams:
    """Gaussian of mean ``gamma`` and deviation ``sigma`` restricted to the
    window (lambda_lo, lambda_hi); intensities are nonnegative."""

    gamma: float
    sigma: float
    lambda_lo: float
    lambda_hi: float

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if not 0.0 <= self.lambda_lo < self.lambda_hi:
            raise ValueError("window must satisfy 0 <= lambda_lo < lambda_hi")


def poisson_pmf(n: int, alpha: float) -> float:
    """Probability of n photons in a pulse of mean photon number alpha."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    if alpha < 0.0:
        raise ValueError("intensity must be nonnegative")
    if alpha == 0.0:
        return 1.0 if n == 0 else 0.0
    if n == 0:
        return math.exp(-alpha)
    # log-domain keeps large n finite
    return math.exp(n * math.log(alpha) - alpha - math.lgamma(n + 1.0))


@lru_cache(maxsize=None)
def photon_number_cutoff(max_intensity: float, tail: float = 1e-12) -> int:
    """Smallest photon-number cutoff whose Poisson tail mass is below ``tail``.

    Floored at 25: for every intensity in play here that already pushes the
    discarded mass below 1e-35, far beneath the tightest downstream
    tolerance.
    """
    if max_intensity < 0.0:
        raise ValueError("intensity must be nonnegative")
    n = 25
    # gammainc(n+1, x) is the Poisson survival probability P(X > n)
    while gammainc(n + 1.0, max_intensity) >= tail:
        n += 1
        if n > 10_000:
            raise ValueError("photon-number cutoff did not converge")
    return n


def _pmf_min(n: int, iv: IntensityInterval) -> float:
    # P(0|x) decreases in x; for n >= 1 the pmf is unimodal with mode at
    # x = n, so the minimum always sits on an endpoint.
    if n == 0:
        return poisson_pmf(0, iv.hi)
    return min(poisson_pmf(n, iv.lo), poisson_pmf(n, iv.hi))


def _pmf_max(n: int, iv: IntensityInterval) -> float:
    if n == 0:
        return poisson_pmf(0, iv.lo)
    return poisson_pmf(n, min(max(iv.lo, float(n)), iv.hi))


def pnm_interval(
    n: int, m: int, a: IntensityInterval, b: IntensityInterval
) -> ProbabilityInterval:
    """Range of the joint probability that Alice emits n photons and Bob m
    photons, with the two intensities confined independently to a and b.

    Below the Poisson mode (every interval endpoint < n) this reproduces the
    four-way endpoint case split exactly; the unimodal extremization keeps
    the result valid when an interval crosses the mode.
    """
    return ProbabilityInterval(
        _pmf_min(n, a) * _pmf_min(m, b),
        _pmf_max(n, a) * _pmf_max(m, b),
    )


def _normal_cdf(t: float) -> float:
    return 0.5 * math.erfc(-t / _SQRT2)


def _normal_mass(t_lo: float, t_hi: float) -> float:
    """P(t_lo < T < t_hi) for standard normal T, stable in far tails."""
    if t_lo >= 0.0:
        return 0.5 * (math.erfc(t_lo / _SQRT2) - math.erfc(t_hi / _SQRT2))
    if t_hi <= 0.0:
        return 0.5 * (math.erfc(-t_hi / _SQRT2) - math.erfc(-t_lo / _SQRT2))
    return _normal_cdf(t_hi) - _normal_cdf(t_lo)


@lru_cache(maxsize=None)
def _tg_mass(params: TruncatedGaussianParams) -> float:
    t_lo = (params.lambda_lo - params.gamma) / params.sigma
    t_hi = (params.lambda_hi - params.gamma) / params.sigma
    mass = _normal_mass(t_lo, t_hi)
    if mass < _MIN_TRUNCATION_MASS:
        raise DegenerateTruncationError(
            f"window ({params.lambda_lo}, {params.lambda_hi}) holds no Gaussian "
            f"mass (got {mass:.3e})"
        )
    return mass


def tg_pdf(params: TruncatedGaussianParams, x: float) -> float:
    """Truncated-Gaussian density at x; zero outside the window."""
    mass = _tg_mass(params)
    if x <= params.lambda_lo or x >= params.lambda_hi:
        return 0.0
    t = (x - params.gamma) / params.sigma
    return math.exp(-0.5 * t * t) / (params.sigma * _SQRT2PI * mass)


def tg_expect(params: TruncatedGaussianParams, fn) -> float:
    """Expectation of fn(intensity) under the truncated Gaussian.

    Integrates in standardized units so arbitrarily narrow windows stay well
    conditioned; deterministic Gauss-Kronrod quadrature.
    """
    mass = _tg_mass(params)
    gamma, sigma = params.gamma, params.sigma
    lo = max((params.lambda_lo - gamma) / sigma, -_T_CUT)
    hi = min((params.lambda_hi - gamma) / sigma, _T_CUT)

    def integrand(t: float) -> float:
        x = gamma + sigma * t
        if x < 0.0:  # endpoint rounding guard
            x = 0.0
        return math.exp(-0.5 * t * t) / (_SQRT2PI * mass) * fn(x)

    pts = [0.0] if lo < 0.0 < hi else None
    value, _ = quad(integrand, lo, hi, epsabs=1e-300, epsrel=1e-11, limit=200, points=pts)
    return value


@lru_cache(maxsize=None)
def tg_photon_prob(n: int, params: TruncatedGaussianParams) -> float:
    """Probability of emitting n photons when the intensity itself is
    truncated-Gaussian distributed."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    value = tg_expect(params, lambda x: poisson_pmf(n, x))
    return min(max(value, 0.0), 1.0)


def pnm_actual(
    n: int, m: int, model: "CorrelationSpec", a: float, b: float
) -> ProbabilityInterval:
    """Range of the joint emission probability for settings (a, b) under a
    correlation model.

    Worst-case interval models produce genuine intervals; truncated-Gaussian
    models are point estimates, so lo == hi and the value factorizes into
    the two single-party probabilities.
    """
    if model.uses_truncated_gaussian:
        p = _tg_party_prob(n, model, a) * _tg_party_prob(m, model, b)
        p = min(p, 1.0)
        return ProbabilityInterval(p, p)
    return pnm_interval(n, m, model.interval_for(a), model.interval_for(b))


def _tg_party_prob(n: int, model: "CorrelationSpec", a: float) -> float:
    params = model.tg_for(a)
    if params is None:
        if a == 0.0:
            return poisson_pmf(n, 0.0)  # a vacuum setting cannot deviate
        raise ValueError(f"no truncated-Gaussian parameters for intensity {a}")
    return tg_photon_prob(n, params)
