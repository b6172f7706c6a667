"""Overlap between reference (uncorrelated) and actual (correlated) emission
statistics.

The squared overlap ``tau`` quantifies, per intensity pair, how far yields
and error probabilities observed under correlated emission can drift from
their uncorrelated counterparts.  For the worst-case interval model the
per-round actual statistics are pinned down only by endpoint bounds; for the
truncated-Gaussian model the per-round overlap is averaged over the known
intensity density.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable

from .photon_statistics import (
    IntensityInterval,
    TruncatedGaussianParams,
    photon_number_cutoff,
    pnm_actual,
    pnm_interval,
    poisson_pmf,
    tg_expect,
)

__all__ = [
    "CorrelationSpec",
    "IntensityProtocol",
    "ModelKind",
    "bhattacharyya_lower",
    "tau_lower",
    "tau_table",
    "tg_scaled_spec",
    "tg_sweep_spec",
    "worst_case_spec",
]

# record -> (lo, hi) interval for a given setting; enables per-record bounds
RecordIntervalFn = Callable[[float, tuple[float, ...]], tuple[float, float]]


class ModelKind(Enum):
    WORST_CASE_INTERVAL = "worst_case_interval"
    TRUNCATED_GAUSSIAN = "truncated_gaussian"


@dataclass(frozen=True)
class IntensityProtocol:
    """Three-intensity decoy protocol: intensities mu > nu > omega >= 0,
    their selection probabilities, and the Z-basis probabilities.

    The asymptotic key rate does not depend on the probabilities; defaults
    put almost all weight on the signal setting, with a small epsilon that
    only avoids degenerate weights.
    """

    mu: float
    nu: float
    omega: float
    p_mu: float = 1.0 - 2e-6
    p_nu: float = 1e-6
    p_omega: float = 1e-6
    q_z_alice: float = 1.0
    q_z_bob: float = 1.0

    def __post_init__(self) -> None:
        if not self.mu > self.nu > self.omega >= 0.0:
            raise ValueError("intensities must satisfy mu > nu > omega >= 0")
        for name in ("p_mu", "p_nu", "p_omega", "q_z_alice", "q_z_bob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} must lie in [0, 1]")
        if abs(self.p_mu + self.p_nu + self.p_omega - 1.0) > 1e-12:
            raise ValueError("intensity probabilities must sum to 1")

    @property
    def intensities(self) -> tuple[float, float, float]:
        return (self.mu, self.nu, self.omega)

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return (self.p_mu, self.p_nu, self.p_omega)


@dataclass(frozen=True)
class CorrelationSpec:
    """Correlation model: range ``xi`` (rounds), maximum relative deviation
    ``delta_max``, and the assumed distribution of the actual intensity.

    Worst-case models confine the actual intensity of setting a to
    [a (1 - delta_max)^xi, a (1 + delta_max)^xi]: the relative deviation is
    compounded over the xi rounds that can influence a pulse, the
    conservative reading of a finite correlation range.  Truncated-Gaussian models carry explicit
    per-setting densities.
    """

    xi: int = 1
    delta_max: float = 0.0
    model_kind: ModelKind = ModelKind.WORST_CASE_INTERVAL
    tg_params: tuple[tuple[float, TruncatedGaussianParams], ...] = ()
    record_intervals: RecordIntervalFn | None = None
    # 'mixture' scores the overlap against the record-averaged photon-number
    # statistics; 'averaged' averages the per-record overlap instead, which
    # by concavity can only be smaller (more conservative).
    tg_tau_semantics: str = "mixture"

    def __post_init__(self) -> None:
        if self.xi < 0:
            raise ValueError("xi must be a nonnegative integer")
        if self.delta_max < 0.0:
            raise ValueError("delta_max must be nonnegative")
        if self.tg_tau_semantics not in ("mixture", "averaged"):
            raise ValueError("tg_tau_semantics must be 'mixture' or 'averaged'")
        if self.model_kind is ModelKind.TRUNCATED_GAUSSIAN:
            if not self.tg_params:
                raise ValueError("truncated-Gaussian model needs per-setting parameters")
            for setting, params in self.tg_params:
                lo = max(setting * (1.0 - self.delta_max), 0.0)
                hi = setting * (1.0 + self.delta_max)
                slack = 1e-9 * max(1.0, hi)
                if params.lambda_lo < lo - slack or params.lambda_hi > hi + slack:
                    raise ValueError(
                        f"TG support for setting {setting} exceeds the "
                        f"delta_max={self.delta_max} envelope"
                    )

    @property
    def uses_truncated_gaussian(self) -> bool:
        return self.model_kind is ModelKind.TRUNCATED_GAUSSIAN

    @property
    def is_exact(self) -> bool:
        """True when the model admits no deviation at all."""
        return (
            self.model_kind is ModelKind.WORST_CASE_INTERVAL
            and self.record_intervals is None
            and (self.delta_max == 0.0 or self.xi == 0)
        )

    def interval_for(self, a: float) -> IntensityInterval:
        lo = a * (1.0 - self.delta_max) ** self.xi
        hi = a * (1.0 + self.delta_max) ** self.xi
        return IntensityInterval(max(lo, 0.0), hi)

    def tg_for(self, a: float) -> TruncatedGaussianParams | None:
        for setting, params in self.tg_params:
            if setting == a:
                return params
        return None

    def max_effective_intensity(self, settings: Iterable[float]) -> float:
        values = [0.0]
        for a in settings:
            if self.uses_truncated_gaussian:
                params = self.tg_for(a)
                values.append(params.lambda_hi if params is not None else a)
            else:
                values.append(self.interval_for(a).hi)
            values.append(a)
        return max(values)


def worst_case_spec(delta_max: float, xi: int = 1) -> CorrelationSpec:
    """Worst-case interval model with relative deviation delta_max."""
    return CorrelationSpec(xi=xi, delta_max=delta_max)


def tg_scaled_spec(
    intensities: Iterable[float],
    rel_mean_shift: float,
    rel_sigma: float,
    rel_lo: float,
    rel_hi: float,
    xi: int = 1,
    tau_semantics: str = "mixture",
) -> CorrelationSpec:
    """Truncated-Gaussian model whose parameters scale with each setting a:
    mean a(1 + rel_mean_shift), deviation a*rel_sigma, support
    [a(1 + rel_lo), a(1 + rel_hi)] floored at zero.

    This propagates a relative deviation structure measured on one setting
    to the whole intensity set.
    """
    if rel_sigma <= 0.0:
        raise ValueError("rel_sigma must be positive")
    if not rel_lo < rel_hi:
        raise ValueError("rel_lo must be below rel_hi")
    delta = max(abs(rel_lo), abs(rel_hi))
    params = []
    for a in sorted(set(intensities), reverse=True):
        if a == 0.0:
            continue  # vacuum setting cannot deviate
        params.append(
            (
                a,
                TruncatedGaussianParams(
                    gamma=a * (1.0 + rel_mean_shift),
                    sigma=a * rel_sigma,
                    lambda_lo=max(a * (1.0 + rel_lo), 0.0),
                    lambda_hi=a * (1.0 + rel_hi),
                ),
            )
        )
    return CorrelationSpec(
        xi=xi,
        delta_max=delta,
        model_kind=ModelKind.TRUNCATED_GAUSSIAN,
        tg_params=tuple(params),
        tg_tau_semantics=tau_semantics,
    )


def tg_sweep_spec(
    intensities: Iterable[float],
    delta_max: float,
    xi: int = 1,
    tau_semantics: str = "mixture",
) -> CorrelationSpec:
    """Truncated-Gaussian model commensurate with a worst-case sweep at the
    same delta_max: centered on the setting, sigma = delta_max * a / 3,
    support a(1 +- delta_max), so the 3-sigma mass matches the interval."""
    if delta_max < 0.0:
        raise ValueError("delta_max must be nonnegative")
    if delta_max == 0.0:
        return CorrelationSpec(xi=xi, delta_max=0.0)
    return tg_scaled_spec(
        intensities,
        0.0,
        delta_max / 3.0,
        -delta_max,
        delta_max,
        xi=xi,
        tau_semantics=tau_semantics,
    )


def bhattacharyya_lower(
    a: float, b: float, model: CorrelationSpec, n_max: int | None = None
) -> float:
    """Lower bound on the Bhattacharyya coefficient between the actual and
    reference joint photon-number distributions for settings (a, b).

    Sums sqrt(p_actual_lower * p_reference) over photon numbers up to the
    cutoff; dropped tail terms can only lower the bound.  A model with no
    deviation has identical distributions, so the exact value 1 is returned
    without summation noise.
    """
    if model.is_exact:
        return 1.0
    if n_max is None:
        n_max = photon_number_cutoff(model.max_effective_intensity((a, b)))
    terms = []
    for n in range(n_max + 1):
        pn_ref = poisson_pmf(n, a)
        for m in range(n_max + 1):
            lo = pnm_actual(n, m, model, a, b).lo
            if lo == 0.0:
                continue
            terms.append(math.sqrt(lo * pn_ref * poisson_pmf(m, b)))
    return math.fsum(terms)


def _interval_bhattacharyya(
    a: float, b: float, iv_a: IntensityInterval, iv_b: IntensityInterval, n_max: int
) -> float:
    terms = []
    for n in range(n_max + 1):
        pn_ref = poisson_pmf(n, a)
        for m in range(n_max + 1):
            lo = pnm_interval(n, m, iv_a, iv_b).lo
            if lo == 0.0:
                continue
            terms.append(math.sqrt(lo * pn_ref * poisson_pmf(m, b)))
    return math.fsum(terms)


@lru_cache(maxsize=None)
def _tg_party_overlap(a: float, params: TruncatedGaussianParams, n_max: int) -> float:
    """Average single-party overlap between the round's actual Poisson
    statistics (intensity drawn from the truncated Gaussian) and the
    reference Poisson statistics at the setting a.

    Conditioned on the drawn intensity x the overlap is
    sum_n sqrt(P(n|x) P(n|a)); the truncated sum keeps the bound
    conservative.
    """

    def overlap(x: float) -> float:
        return math.fsum(
            math.sqrt(poisson_pmf(n, x) * poisson_pmf(n, a)) for n in range(n_max + 1)
        )

    return min(tg_expect(params, overlap), 1.0)


def _tg_overlap(a: float, model: CorrelationSpec, n_max: int) -> float:
    params = model.tg_for(a)
    if params is None:
        if a == 0.0:
            return 1.0  # vacuum emits vacuum regardless of correlations
        raise ValueError(f"no truncated-Gaussian parameters for intensity {a}")
    return _tg_party_overlap(a, params, n_max)


def _record_strings(
    protocol: IntensityProtocol, xi: int
) -> list[tuple[float, ...]]:
    return list(itertools.product(protocol.intensities, repeat=xi))


def tau_lower(
    a: float, b: float, protocol: IntensityProtocol, model: CorrelationSpec
) -> float:
    """Lower bound on the squared overlap for the settings pair (a, b).

    The weighted sum over future-setting strings collapses: the implemented
    models assign one deviation law per setting independent of the record,
    so every string carries the same Bhattacharyya coefficient and the
    selection weights total unity.  When per-record intervals are supplied
    the worst record is taken instead, which reduces to the collapsed value
    whenever all records share the global interval.
    """
    _check_coverage(model, protocol)
    if model.is_exact:
        return 1.0
    n_max = photon_number_cutoff(
        model.max_effective_intensity(protocol.intensities)
    )
    if model.uses_truncated_gaussian:
        if model.tg_tau_semantics == "averaged":
            bc = _tg_overlap(a, model, n_max) * _tg_overlap(b, model, n_max)
        else:
            bc = bhattacharyya_lower(a, b, model, n_max=n_max)
    elif model.record_intervals is not None:
        bc = min(
            _interval_bhattacharyya(
                a,
                b,
                IntensityInterval(*model.record_intervals(a, rec_a)),
                IntensityInterval(*model.record_intervals(b, rec_b)),
                n_max,
            )
            for rec_a in _record_strings(protocol, model.xi)
            for rec_b in _record_strings(protocol, model.xi)
        )
    else:
        bc = bhattacharyya_lower(a, b, model, n_max=n_max)
    bc = min(bc, 1.0)
    return bc * bc


def _check_coverage(model: CorrelationSpec, protocol: IntensityProtocol) -> None:
    if not model.uses_truncated_gaussian:
        return
    for a in protocol.intensities:
        if a > 0.0 and model.tg_for(a) is None:
            raise ValueError(
                f"truncated-Gaussian model lacks parameters for intensity {a}"
            )


@lru_cache(maxsize=None)
def tau_table(
    protocol: IntensityProtocol, model: CorrelationSpec
) -> tuple[tuple[float, float, float], ...]:
    """3x3 table of tau lower bounds over (mu, nu, omega) x (mu, nu, omega)."""
    return tuple(
        tuple(tau_lower(a, b, protocol, model) for b in protocol.intensities)
        for a in protocol.intensities
    )
