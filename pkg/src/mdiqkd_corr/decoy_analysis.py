"""Three-intensity decoy-state estimation of single-photon bounds.

Estimates the single-photon yield lower bound and error upper bound in
reference statistics by Gaussian elimination over the three intensity
settings, accepting interval-valued gain/QBER inputs, and transfers the
bounds to the correlated (actual) picture through the overlap table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation_overlap import IntensityProtocol
from .cs_bounds import G_minus, G_plus, ref_interval_from_actual

__all__ = [
    "GainQberTable",
    "RefIntervalTable",
    "SinglePhotonBounds",
    "H11_PAIRS",
    "Y11_PAIRS",
    "h11_ref_upper",
    "ref_intervals",
    "single_photon_bounds",
    "y11_ref_lower",
]

# Table index order is (mu, nu, omega) on both axes.
MU, NU, OMEGA = 0, 1, 2

# Intensity pairs feeding each single-photon formula.
Y11_PAIRS = ((MU, MU), (NU, NU), (OMEGA, OMEGA), (NU, OMEGA), (OMEGA, NU), (MU, OMEGA), (OMEGA, MU))
H11_PAIRS = ((NU, NU), (OMEGA, OMEGA), (NU, OMEGA), (OMEGA, NU))


@dataclass(frozen=True)
class GainQberTable:
    """Gain Q and QBER E for all nine intensity pairs of one basis."""

    basis: str
    q: np.ndarray
    e: np.ndarray

    def __post_init__(self) -> None:
        if self.basis not in ("Z", "X"):
            raise ValueError("basis must be 'Z' or 'X'")
        for name, arr in (("q", self.q), ("e", self.e)):
            if arr.shape != (3, 3):
                raise ValueError(f"{name} must be a 3x3 array")
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ValueError(f"{name} entries must lie in [0, 1]")

    @property
    def qe(self) -> np.ndarray:
        return self.q * self.e


@dataclass(frozen=True)
class RefIntervalTable:
    """Elementwise ranges of the reference gains and gain*QBER products."""

    q_lo: np.ndarray
    q_hi: np.ndarray
    qe_lo: np.ndarray
    qe_hi: np.ndarray


@dataclass(frozen=True)
class SinglePhotonBounds:
    """Certified single-photon bounds in the actual (correlated) picture."""

    y11_lower: float
    h11_upper: float
    basis: str
    y11_ref: float = 0.0
    h11_ref: float = 0.0


def ref_intervals(actual: GainQberTable, taus: np.ndarray) -> RefIntervalTable:
    """Elementwise reference-value ranges for a measured table under the
    per-pair squared overlaps."""
    taus = np.asarray(taus, dtype=float)
    q_lo = np.empty((3, 3))
    q_hi = np.empty((3, 3))
    qe_lo = np.empty((3, 3))
    qe_hi = np.empty((3, 3))
    qe = actual.qe
    for i in range(3):
        for j in range(3):
            q_lo[i, j], q_hi[i, j] = ref_interval_from_actual(actual.q[i, j], taus[i, j])
            qe_lo[i, j], qe_hi[i, j] = ref_interval_from_actual(qe[i, j], taus[i, j])
    return RefIntervalTable(q_lo, q_hi, qe_lo, qe_hi)


def point_intervals(table: GainQberTable) -> RefIntervalTable:
    """Degenerate interval table: the entries are taken at face value."""
    qe = table.qe
    return RefIntervalTable(table.q.copy(), table.q.copy(), qe.copy(), qe.copy())


def _y11_coefficients(protocol: IntensityProtocol) -> dict[tuple[int, int], float]:
    mu, nu, om = protocol.intensities
    c1 = (mu**2 - om**2) * (mu - om)  # weight of the nu/omega block
    c2 = (nu**2 - om**2) * (nu - om)  # weight of the mu/omega block
    return {
        (NU, NU): c1 * math.exp(2.0 * nu),
        (OMEGA, OMEGA): (c1 - c2) * math.exp(2.0 * om),
        (NU, OMEGA): -c1 * math.exp(nu + om),
        (OMEGA, NU): -c1 * math.exp(nu + om),
        (MU, MU): -c2 * math.exp(2.0 * mu),
        (MU, OMEGA): c2 * math.exp(mu + om),
        (OMEGA, MU): c2 * math.exp(mu + om),
    }


def y11_ref_lower(intervals: RefIntervalTable, protocol: IntensityProtocol) -> float:
    """Lower bound on the reference single-photon yield.

    Evaluates the Gaussian-elimination combination with sign-directed
    endpoint selection: every gain entering with a positive net coefficient
    takes its lower endpoint and vice versa, which minimizes the expression
    over the interval box.  Clamped to [0, 1]; a result stuck at 0 means no
    single-photon yield is certifiable.
    """
    mu, nu, om = protocol.intensities
    if not mu > nu > om:
        raise ValueError("decoy elimination requires mu > nu > omega")
    denom = (mu - om) ** 2 * (nu - om) ** 2 * (mu - nu)
    num = 0.0
    for (i, j), coef in _y11_coefficients(protocol).items():
        value = intervals.q_lo[i, j] if coef >= 0.0 else intervals.q_hi[i, j]
        num += coef * value
    return float(min(max(num / denom, 0.0), 1.0))


def h11_ref_upper(intervals: RefIntervalTable, protocol: IntensityProtocol) -> float:
    """Upper bound on the reference single-photon error probability, with
    endpoint selection maximizing the expression; clamped to [0, 1]."""
    mu, nu, om = protocol.intensities
    if not mu > nu > om:
        raise ValueError("decoy elimination requires mu > nu > omega")
    num = (
        math.exp(2.0 * nu) * intervals.qe_hi[NU, NU]
        + math.exp(2.0 * om) * intervals.qe_hi[OMEGA, OMEGA]
        - math.exp(nu + om) * (intervals.qe_lo[NU, OMEGA] + intervals.qe_lo[OMEGA, NU])
    )
    return float(min(max(num / (nu - om) ** 2, 0.0), 1.0))


def _tau_min(taus: np.ndarray, pairs) -> float:
    return float(min(taus[i, j] for i, j in pairs))


def single_photon_bounds(
    z_table: GainQberTable,
    x_table: GainQberTable,
    taus: np.ndarray,
    protocol: IntensityProtocol,
    tables_are: str = "reference",
) -> tuple[SinglePhotonBounds, SinglePhotonBounds]:
    """Single-photon bounds in the actual picture, per basis (Z, X).

    ``tables_are`` states which picture the gain/QBER tables describe.
    Simulated tables model the ideal uncorrelated source and are therefore
    reference statistics, entering the decoy elimination at face value.
    Measured tables are actual statistics and are first confined to
    reference-side intervals through the per-pair overlaps.  Either way the
    resulting reference bounds transfer to the actual picture through the
    minimum overlap among the contributing pairs.
    """
    taus = np.asarray(taus, dtype=float)
    if tables_are not in ("reference", "actual"):
        raise ValueError("tables_are must be 'reference' or 'actual'")
    tau_y = _tau_min(taus, Y11_PAIRS)
    tau_h = _tau_min(taus, H11_PAIRS)
    results = []
    for table in (z_table, x_table):
        if tables_are == "actual":
            intervals = ref_intervals(table, taus)
        else:
            intervals = point_intervals(table)
        y_ref = y11_ref_lower(intervals, protocol)
        h_ref = h11_ref_upper(intervals, protocol)
        results.append(
            SinglePhotonBounds(
                y11_lower=G_minus(y_ref, tau_y),
                h11_upper=G_plus(h_ref, tau_h),
                basis=table.basis,
                y11_ref=y_ref,
                h11_ref=h_ref,
            )
        )
    return results[0], results[1]
