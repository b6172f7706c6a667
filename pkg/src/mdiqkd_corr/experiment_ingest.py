"""Correlation-parameter extraction from measured click-rate histograms.

Pipeline: per-pattern click-rate histograms -> calibrated intensity
distributions -> weighted mixture over the pattern family -> Gaussian fits
-> variance deconvolution of the correlation component -> maximum relative
deviation and a truncated-Gaussian description of the actual intensity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .photon_statistics import IntensityInterval, TruncatedGaussianParams

__all__ = [
    "ClickHistogram",
    "GroupWeights",
    "IngestResult",
    "IntensityDistribution",
    "clicks_to_intensity",
    "delta_from_distribution",
    "extract_correlation_component",
    "fit_gaussian",
    "ingest_pipeline",
    "weighted_mixture",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClickHistogram:
    """Click-rate histogram of one intensity pattern (e.g. 'VS', 'D1S')."""

    pattern: str
    bin_centers: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        centers = np.asarray(self.bin_centers, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if centers.ndim != 1 or centers.shape != counts.shape:
            raise ValueError(f"{self.pattern}: bin_centers and counts must be equal-length 1-D")
        if centers.size == 0:
            raise ValueError(f"{self.pattern}: histogram is empty")
        if np.any(np.diff(centers) <= 0.0):
            raise ValueError(f"{self.pattern}: bin centers must be strictly increasing")
        if np.any(counts < 0.0):
            raise ValueError(f"{self.pattern}: counts must be nonnegative")
        if not np.any(counts > 0.0):
            raise ValueError(f"{self.pattern}: counts are all zero")
        object.__setattr__(self, "bin_centers", centers)
        object.__setattr__(self, "counts", counts)

    @property
    def mean(self) -> float:
        return float(np.average(self.bin_centers, weights=self.counts))


@dataclass(frozen=True)
class GroupWeights:
    """Sending and detection weights of one pattern group; the effective
    weight is their product, normalized over the group family."""

    w_send: float
    w_det: float = 1.0

    def __post_init__(self) -> None:
        if self.w_send < 0.0 or self.w_det < 0.0:
            raise ValueError("weights must be nonnegative")

    @property
    def w(self) -> float:
        return self.w_send * self.w_det


@dataclass(frozen=True, eq=False)
class IntensityDistribution:
    """Distribution of the emitted mean photon number, sample-backed."""

    mean: float
    sigma: float
    support: IntensityInterval
    values: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if not self.support.lo <= self.mean <= self.support.hi:
            raise ValueError("support must contain the mean")


def _from_samples(values: np.ndarray, weights: np.ndarray) -> IntensityDistribution:
    lo, hi = float(values.min()), float(values.max())
    mean = float(np.average(values, weights=weights))
    mean = min(max(mean, lo), hi)  # guard summation rounding at the edges
    var = float(np.average((values - mean) ** 2, weights=weights))
    return IntensityDistribution(
        mean=mean,
        sigma=math.sqrt(max(var, 0.0)),
        support=IntensityInterval(lo, hi),
        values=values,
        weights=weights,
    )


def clicks_to_intensity(h: ClickHistogram, calibration: float) -> IntensityDistribution:
    """Map a click-rate histogram to an intensity distribution via the
    linear click-rate -> photon-number calibration."""
    if calibration <= 0.0:
        raise ValueError("calibration must be positive")
    values = h.bin_centers * calibration
    return _from_samples(values, h.counts.copy())


def weighted_mixture(
    dists: Sequence[IntensityDistribution], weights: Sequence[GroupWeights]
) -> IntensityDistribution:
    """Pool sample-backed distributions with weights normalized to one."""
    if len(dists) != len(weights):
        raise ValueError("need one weight per distribution")
    if not dists:
        raise ValueError("need at least one distribution")
    total = sum(gw.w for gw in weights)
    if total <= 0.0:
        raise ValueError("weights are all zero")
    values = []
    pooled_weights = []
    for dist, gw in zip(dists, weights):
        if dist.values is None or dist.weights is None:
            raise ValueError("mixture components must be sample-backed")
        share = gw.w / total
        if share == 0.0:
            continue
        wsum = float(dist.weights.sum())
        values.append(dist.values)
        pooled_weights.append(dist.weights * (share / wsum))
    return _from_samples(np.concatenate(values), np.concatenate(pooled_weights))


def fit_gaussian(d: IntensityDistribution) -> tuple[float, float]:
    """Weighted maximum-likelihood Gaussian fit: weighted mean and weighted
    standard deviation with total-weight normalization."""
    if d.values is not None and d.weights is not None:
        mask = d.weights > 0.0
        if np.unique(d.values[mask]).size < 2:
            logger.warning("degenerate fit input (single support point); sigma = 0")
            return (d.mean, 0.0)
        mean = float(np.average(d.values, weights=d.weights))
        var = float(np.average((d.values - mean) ** 2, weights=d.weights))
        return (mean, math.sqrt(max(var, 0.0)))
    return (d.mean, d.sigma)


def extract_correlation_component(
    total: tuple[float, float], fluct: tuple[float, float]
) -> tuple[float, float]:
    """Deconvolve the deviation caused solely by correlations, assuming the
    random-fluctuation and correlation components are independent.

    mean subtracts; variance subtracts, clamped at zero (flagged) when the
    fluctuation spread already exceeds the total.
    """
    mean_c = total[0] - fluct[0]
    var_c = total[1] ** 2 - fluct[1] ** 2
    if var_c < 0.0:
        logger.warning(
            "fluctuation spread %g exceeds total %g; correlation sigma clamped to 0",
            fluct[1],
            total[1],
        )
        var_c = 0.0
    return (mean_c, math.sqrt(var_c))


def delta_from_distribution(
    corr: tuple[float, float], nominal: float, k_sigma: float = 3.0
) -> tuple[float, TruncatedGaussianParams | None]:
    """Maximum relative deviation and truncated-Gaussian parameters from the
    correlation component around a nominal setting.

    The deviation range is mean_c +- k_sigma * sigma_c; the truncated
    Gaussian is centered at nominal + mean_c with that range as support
    (floored at zero).  A zero-width component yields delta 0 and no
    truncated-Gaussian parameters.
    """
    if nominal <= 0.0:
        raise ValueError("nominal intensity must be positive")
    if k_sigma <= 0.0:
        raise ValueError("k_sigma must be positive")
    mean_c, sigma_c = corr
    lo = mean_c - k_sigma * sigma_c
    hi = mean_c + k_sigma * sigma_c
    delta_max = max(abs(lo), abs(hi)) / nominal
    if sigma_c <= 0.0 or lo == hi:
        return (delta_max, None)
    params = TruncatedGaussianParams(
        gamma=nominal + mean_c,
        sigma=sigma_c,
        lambda_lo=max(nominal + lo, 0.0),
        lambda_hi=nominal + hi,
    )
    return (delta_max, params)


@dataclass(frozen=True)
class IngestResult:
    """End-to-end outputs of the histogram ingestion pipeline."""

    calibration: float
    reference_fit: tuple[float, float]
    combined_fit: tuple[float, float]
    correlation: tuple[float, float]
    deviation_range: tuple[float, float]
    delta_max: float
    tg_params: TruncatedGaussianParams | None

    @property
    def rel_mean_shift(self) -> float:
        return self.correlation[0] / self.reference_fit[0]

    @property
    def rel_sigma(self) -> float:
        return self.correlation[1] / self.reference_fit[0]

    @property
    def rel_lo(self) -> float:
        return self.deviation_range[0] / self.reference_fit[0]

    @property
    def rel_hi(self) -> float:
        return self.deviation_range[1] / self.reference_fit[0]


def ingest_pipeline(
    histograms: Mapping[str, ClickHistogram],
    weights: Mapping[str, GroupWeights],
    reference_group: str,
    nominal: float,
    k_sigma: float = 3.0,
) -> IngestResult:
    """Run the full extraction on a family of pattern histograms.

    The reference group carries random fluctuations only; its grand mean
    fixes the click-to-intensity calibration against the nominal setting.
    """
    if reference_group not in histograms:
        raise KeyError(f"reference group {reference_group!r} missing from data")
    missing = sorted(set(weights) - set(histograms))
    if missing:
        raise KeyError(f"histograms missing for groups: {', '.join(missing)}")
    if reference_group not in weights:
        raise KeyError(f"reference group {reference_group!r} missing from weights")

    ref_mean_clicks = histograms[reference_group].mean
    if ref_mean_clicks <= 0.0:
        raise ValueError("reference group has nonpositive mean click rate")
    calibration = nominal / ref_mean_clicks

    labels = sorted(weights)
    dists = {g: clicks_to_intensity(histograms[g], calibration) for g in labels}
    reference_fit = fit_gaussian(dists[reference_group])
    combined = weighted_mixture([dists[g] for g in labels], [weights[g] for g in labels])
    combined_fit = fit_gaussian(combined)
    correlation = extract_correlation_component(combined_fit, reference_fit)
    mean_c, sigma_c = correlation
    deviation_range = (mean_c - k_sigma * sigma_c, mean_c + k_sigma * sigma_c)
    delta_max, tg_params = delta_from_distribution(correlation, nominal, k_sigma)
    return IngestResult(
        calibration=calibration,
        reference_fit=reference_fit,
        combined_fit=combined_fit,
        correlation=correlation,
        deviation_range=deviation_range,
        delta_max=delta_max,
        tg_params=tg_params,
    )
