"""Symmetric MDI channel simulation: gain and QBER tables.

Models two identical fiber arms feeding an untrusted Bell-state measurement
with threshold detectors, background counts and polarization misalignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .correlation_overlap import IntensityProtocol
from .decoy_analysis import GainQberTable

__all__ = [
    "ChannelParams",
    "GainQberPoint",
    "bessel_i0",
    "gain_qber",
    "gain_qber_tables",
]

# Below this total click probability the QBER is statistically meaningless.
_DEGENERATE_GAIN = 1e-300


@dataclass(frozen=True)
class ChannelParams:
    """Detector and fiber parameters; L_km is the per-arm distance from
    Alice (or Bob) to the measurement node."""

    eta_d: float = 0.53
    alpha_db_per_km: float = 0.2
    L_km: float = 0.0
    Y0: float = 4e-8
    e_d: float = 0.0108
    f_ec: float = 1.16

    def __post_init__(self) -> None:
        for name in ("eta_d", "Y0", "e_d"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} must lie in [0, 1]")
        if self.L_km < 0.0:
            raise ValueError("L_km must be nonnegative")
        if self.alpha_db_per_km < 0.0:
            raise ValueError("alpha_db_per_km must be nonnegative")
        if self.f_ec < 1.0:
            raise ValueError("f_ec must be at least 1")

    @property
    def eta(self) -> float:
        """Total per-arm transmittance including detector efficiency."""
        return self.eta_d * 10.0 ** (-self.alpha_db_per_km * self.L_km / 10.0)

    def at_distance(self, L_km: float) -> "ChannelParams":
        return replace(self, L_km=L_km)


class GainQberPoint(NamedTuple):
    q: float
    e: float
    degenerate: bool


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero.

    Power series summed to 1e-16 relative; |x| < 700 guards overflow.
    """
    if abs(x) >= 700.0:
        raise ValueError("bessel_i0 argument must satisfy |x| < 700")
    quarter = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 1
    while True:
        term *= quarter / (k * k)
        total += term
        if term <= 1e-16 * total:
            return total
        k += 1


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def gain_qber(a: float, b: float, ch: ChannelParams) -> GainQberPoint:
    """Gain and QBER for the intensity pair (a, b).

    Sums the post-selected Bell-outcome click probabilities for matching
    (HH) and orthogonal (HV) encodings; matching encodings click only
    through misalignment and background counts, so they carry the errors.
    """
    if a < 0.0 or b < 0.0:
        raise ValueError("intensities must be nonnegative")
    if b > a:  # the model is swap-symmetric; ordering makes that exact
        a, b = b, a
    eta = ch.eta
    e_d = ch.e_d
    ga2 = a * eta
    gb2 = b * eta
    beta = math.sqrt(ga2 * gb2)
    gam = ga2 + gb2
    lam = beta * math.sqrt(e_d * (1.0 - e_d))
    zeta = ga2 + e_d * (gb2 - ga2)

    v = 1.0 - ch.Y0
    pre = 2.0 * math.exp(-gam / 2.0) * v * v
    # terms shared by both Bell outcomes of each encoding
    base_hh = (
        v * v * math.exp(-gam / 2.0)
        - v * math.exp(-gam * (1.0 - e_d) / 2.0) * bessel_i0(e_d * beta)
        - v * math.exp(-gam * e_d / 2.0) * bessel_i0(beta - e_d * beta)
    )
    base_hv = (
        v * v * math.exp(-gam / 2.0)
        - v * math.exp(-zeta / 2.0) * bessel_i0(lam)
        - v * math.exp(-(gam - zeta) / 2.0) * bessel_i0(lam)
    )
    q_hh = pre * (bessel_i0(beta) + base_hh) + pre * (
        bessel_i0(beta - 2.0 * beta * e_d) + base_hh
    )
    q_hv = pre * (bessel_i0(2.0 * lam) + base_hv) + pre * (1.0 + base_hv)

    q_hh = max(q_hh, 0.0)
    q_hv = max(q_hv, 0.0)
    total = q_hh + q_hv
    q = _clamp01(total / 2.0)
    if total < _DEGENERATE_GAIN:
        return GainQberPoint(q, 0.5, True)
    return GainQberPoint(q, _clamp01(q_hh / total), False)


def gain_qber_tables(
    protocol: IntensityProtocol, ch: ChannelParams
) -> tuple[GainQberTable, GainQberTable]:
    """Gain/QBER tables for both bases over the nine intensity pairs.

    The click model is stated for the Z basis; the X-basis tables reuse the
    same expressions with the same misalignment, standard practice in this
    simulation lineage.
    """
    q = np.empty((3, 3))
    e = np.empty((3, 3))
    for i, a in enumerate(protocol.intensities):
        for j, b in enumerate(protocol.intensities):
            point = gain_qber(a, b, ch)
            q[i, j] = point.q
            e[i, j] = point.e
    z = GainQberTable("Z", q, e)
    x = GainQberTable("X", q.copy(), e.copy())
    return z, x
