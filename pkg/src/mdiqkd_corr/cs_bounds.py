"""Cauchy-Schwarz transfer between reference and actual detection statistics.

Given the squared overlap z between reference and actual emission
statistics, a bounded rate y observed in one picture confines its
counterpart in the other picture to [G_minus(y, z), G_plus(y, z)].
"""

from __future__ import annotations

import logging
import math

__all__ = [
    "G_minus",
    "G_plus",
    "actual_bound_from_ref",
    "g_pm",
    "ref_interval_from_actual",
]

logger = logging.getLogger(__name__)

# Tolerated float-noise overshoot on probability inputs.
_CLAMP_SLACK = 1e-9


def _unit(value: float, name: str) -> float:
    if not -_CLAMP_SLACK <= value <= 1.0 + _CLAMP_SLACK:
        raise ValueError(f"{name}={value} lies outside [0, 1]")
    if value < 0.0 or value > 1.0:
        clipped = min(max(value, 0.0), 1.0)
        logger.warning("%s=%r grazes [0, 1]; clamped to %r", name, value, clipped)
        return clipped
    return value


def g_pm(y: float, z: float, sign: str) -> float:
    """g_pm(y, z) = y + (1-z)(1-2y) +- 2 sqrt(z (1-z) y (1-y))."""
    y = _unit(y, "y")
    z = _unit(z, "z")
    base = y + (1.0 - z) * (1.0 - 2.0 * y)
    root = 2.0 * math.sqrt(max(z * (1.0 - z) * y * (1.0 - y), 0.0))
    if sign == "plus":
        return base + root
    if sign == "minus":
        return base - root
    raise ValueError("sign must be 'plus' or 'minus'")


def G_minus(y: float, z: float) -> float:
    """Lower transfer: g_-(y, z) when y > 1 - z, else 0."""
    y = _unit(y, "y")
    z = _unit(z, "z")
    if y > 1.0 - z:
        return min(max(g_pm(y, z, "minus"), 0.0), 1.0)
    return 0.0


def G_plus(y: float, z: float) -> float:
    """Upper transfer: g_+(y, z) when y < z, else 1."""
    y = _unit(y, "y")
    z = _unit(z, "z")
    if y < z:
        return min(max(g_pm(y, z, "plus"), 0.0), 1.0)
    return 1.0


def ref_interval_from_actual(q_act: float, tau: float) -> tuple[float, float]:
    """Range of the reference value compatible with an observed actual value
    under squared overlap tau; the interval always contains q_act."""
    return (G_minus(q_act, tau), G_plus(q_act, tau))


def actual_bound_from_ref(y_ref: float, tau: float, direction: str) -> float:
    """One-sided bound on the actual value given a reference-side bound."""
    if direction == "lower":
        return G_minus(y_ref, tau)
    if direction == "upper":
        return G_plus(y_ref, tau)
    raise ValueError("direction must be 'lower' or 'upper'")
