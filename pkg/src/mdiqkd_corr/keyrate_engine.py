"""Asymptotic secret-key-rate assembly, distance scans, and boundary search.

The rate pipeline: simulate (or accept) gain/QBER tables, bound the
per-pair overlaps, certify single-photon yield/error bounds in the actual
picture, and assemble secret bits per pulse.  Scans and bisections ride on
the monotonicity of the rate in distance and in the deviation strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel_model import ChannelParams, gain_qber_tables
from .correlation_overlap import (
    CorrelationSpec,
    IntensityProtocol,
    tau_table,
    tg_sweep_spec,
    worst_case_spec,
)
from .decoy_analysis import H11_PAIRS, Y11_PAIRS, single_photon_bounds
from .photon_statistics import pnm_actual

__all__ = [
    "BoundaryBracketError",
    "KeyRateAssessment",
    "KeyRateCurve",
    "KeyRatePoint",
    "POSITIVE_RATE_FLOOR",
    "assess_key_rate",
    "binary_entropy",
    "delta_boundary",
    "key_rate",
    "max_distance",
    "scan_distances",
]

# Rates below this are indistinguishable from zero; baseline rates near the
# cliff stay orders of magnitude above it.
POSITIVE_RATE_FLOOR = 1e-12

_DOMAIN_SLACK = 1e-9


class BoundaryBracketError(ValueError):
    """The boundary-search predicate already fails with no correlations."""


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy with the limits H2(0) = H2(1) = 0."""
    if not -_DOMAIN_SLACK <= x <= 1.0 + _DOMAIN_SLACK:
        raise ValueError(f"binary_entropy argument {x} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


@dataclass(frozen=True)
class KeyRatePoint:
    L_km: float
    rate: float

    def __post_init__(self) -> None:
        if self.rate < 0.0:
            raise ValueError("key rate must be nonnegative")

    @property
    def total_km(self) -> float:
        return 2.0 * self.L_km


@dataclass(frozen=True)
class KeyRateCurve:
    points: tuple[KeyRatePoint, ...]
    scenario_label: str

    def __post_init__(self) -> None:
        distances = [p.L_km for p in self.points]
        if any(b <= a for a, b in zip(distances, distances[1:])):
            raise ValueError("curve distances must be strictly increasing")

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def distances(self) -> np.ndarray:
        return np.array([p.L_km for p in self.points])


@dataclass(frozen=True)
class KeyRateAssessment:
    """Key rate with the diagnostics explaining a zero outcome."""

    rate: float
    zero_reason: str | None  # 'vacuous_tau' | 'decoy_clamp' | 'error_floor'
    p11: float
    y11_z: float
    y11_x: float
    h11_x: float
    y11_ref_z: float
    y11_ref_x: float
    h11_ref_x: float
    tau_min_y: float
    tau_min_h: float
    q_mu_mu: float
    e_mu_mu: float


def _p11_actual_lower(protocol: IntensityProtocol, model: CorrelationSpec) -> float:
    """Joint single-photon probability in the Z basis, worst-case lower end."""
    total = 0.0
    probs = protocol.probabilities
    for a, pa in zip(protocol.intensities, probs):
        for b, pb in zip(protocol.intensities, probs):
            total += pa * pb * pnm_actual(1, 1, model, a, b).lo
    return protocol.q_z_alice * protocol.q_z_bob * total


def assess_key_rate(
    protocol: IntensityProtocol,
    model: CorrelationSpec,
    ch: ChannelParams,
    tables_are: str = "reference",
) -> KeyRateAssessment:
    """Assemble the asymptotic key rate and report what limits it.

    Simulated tables describe the uncorrelated source, so they enter the
    decoy estimation as reference statistics by default; pass
    ``tables_are='actual'`` when the tables come from measurements of the
    correlated source.
    """
    z_table, x_table = gain_qber_tables(protocol, ch)
    taus = np.array(tau_table(protocol, model))
    z_bounds, x_bounds = single_photon_bounds(
        z_table, x_table, taus, protocol, tables_are=tables_are
    )
    p11 = _p11_actual_lower(protocol, model)

    y11_z = z_bounds.y11_lower
    y11_x = x_bounds.y11_lower
    h11_x = x_bounds.h11_upper
    if y11_x <= 0.0:
        ratio = 0.5  # vacuous: the privacy term vanishes anyway
    else:
        ratio = min(max(h11_x / y11_x, 0.0), 0.5)

    q_mu_mu = float(z_table.q[0, 0])
    e_mu_mu = float(z_table.e[0, 0])
    raw = p11 * y11_z * (1.0 - binary_entropy(ratio)) - q_mu_mu * ch.f_ec * binary_entropy(e_mu_mu)

    reason = None
    if raw <= 0.0:
        if z_bounds.y11_ref <= 0.0 or x_bounds.y11_ref <= 0.0:
            reason = "decoy_clamp"
        elif y11_z <= 0.0 or y11_x <= 0.0 or ratio >= 0.5:
            reason = "vacuous_tau"
        else:
            reason = "error_floor"

    tau_min_y = float(min(taus[i, j] for i, j in Y11_PAIRS))
    tau_min_h = float(min(taus[i, j] for i, j in H11_PAIRS))
    return KeyRateAssessment(
        rate=float(max(raw, 0.0)),
        zero_reason=reason,
        p11=p11,
        y11_z=y11_z,
        y11_x=y11_x,
        h11_x=h11_x,
        y11_ref_z=z_bounds.y11_ref,
        y11_ref_x=x_bounds.y11_ref,
        h11_ref_x=x_bounds.h11_ref,
        tau_min_y=tau_min_y,
        tau_min_h=tau_min_h,
        q_mu_mu=q_mu_mu,
        e_mu_mu=e_mu_mu,
    )


def key_rate(
    protocol: IntensityProtocol,
    model: CorrelationSpec,
    ch: ChannelParams,
    tables_are: str = "reference",
) -> float:
    """Secret bits per pulse (clamped at zero)."""
    return assess_key_rate(protocol, model, ch, tables_are=tables_are).rate


def scan_distances(
    protocol: IntensityProtocol,
    model: CorrelationSpec,
    ch_template: ChannelParams,
    L_grid: Sequence[float] | Iterable[float],
    scenario_label: str = "",
    tables_are: str = "reference",
) -> KeyRateCurve:
    """Key rate over an increasing grid of per-arm distances."""
    grid = [float(L) for L in L_grid]
    if not grid:
        raise ValueError("distance grid must be nonempty")
    points = tuple(
        KeyRatePoint(L, key_rate(protocol, model, ch_template.at_distance(L), tables_are=tables_are))
        for L in grid
    )
    return KeyRateCurve(points, scenario_label)


def max_distance(
    protocol: IntensityProtocol,
    model: CorrelationSpec,
    ch_template: ChannelParams,
    bracket: tuple[float, float] = (0.0, 300.0),
    tol_km: float = 0.05,
    tables_are: str = "reference",
) -> float:
    """Largest per-arm distance with a positive key rate, by bisection.

    Returns 0 when no distance yields a positive rate and the bracket top
    when the rate is still positive there.
    """

    def positive(L: float) -> bool:
        return (
            key_rate(protocol, model, ch_template.at_distance(L), tables_are=tables_are)
            > POSITIVE_RATE_FLOOR
        )

    lo, hi = bracket
    if not positive(lo):
        return 0.0
    if positive(hi):
        return hi
    while hi - lo > tol_km:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _spec_for_sweep(model_kind: str, delta: float, protocol: IntensityProtocol, xi: int) -> CorrelationSpec:
    if model_kind == "worst_case":
        return worst_case_spec(delta, xi=xi)
    if model_kind == "truncated_gaussian":
        return tg_sweep_spec(protocol.intensities, delta, xi=xi)
    raise ValueError("model_kind must be 'worst_case' or 'truncated_gaussian'")


def delta_boundary(
    protocol: IntensityProtocol,
    ch_template: ChannelParams,
    model_kind: str,
    predicate: tuple,
    xi: int = 1,
    bracket: tuple[float, float] = (0.0, 1.0),
    rtol: float = 1e-3,
    tables_are: str = "reference",
) -> float:
    """Largest delta_max for which the predicate still holds, by bisection.

    ``predicate`` is ('positive_at_L', km) or ('positive_anywhere',); a
    positive rate anywhere is checked at zero distance since the rate only
    falls with distance.  The pipeline is monotone in delta_max, which makes
    the bisection valid.
    """
    kind = predicate[0]
    if kind == "positive_at_L":
        L_eval = float(predicate[1])
    elif kind == "positive_anywhere":
        L_eval = 0.0
    else:
        raise ValueError(f"unknown predicate {predicate!r}")

    def holds(delta: float) -> bool:
        spec = _spec_for_sweep(model_kind, delta, protocol, xi)
        return (
            key_rate(protocol, spec, ch_template.at_distance(L_eval), tables_are=tables_are)
            > POSITIVE_RATE_FLOOR
        )

    lo, hi = bracket
    if not holds(lo):
        raise BoundaryBracketError(
            f"predicate {predicate!r} already fails at delta_max={lo}"
        )
    if holds(hi):
        return hi
    while hi - lo > rtol * max(hi, 1e-9):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo
