#!/usr/bin/env python3
"""Security boundaries: the largest tolerable deviation.

Bisects the maximum relative deviation for which the system still produces
key, either at a fixed distance or anywhere at all, under both correlation
models.
"""

from mdiqkd_corr import ChannelParams, IntensityProtocol
from mdiqkd_corr.keyrate_engine import delta_boundary

protocol = IntensityProtocol(mu=0.204, nu=0.035, omega=1e-4)
channel = ChannelParams()

searches = [
    ("worst_case", ("positive_at_L", 1.0)),
    ("worst_case", ("positive_anywhere",)),
    ("truncated_gaussian", ("positive_at_L", 1.0)),
    ("truncated_gaussian", ("positive_anywhere",)),
]

print("largest admissible relative deviation (signal setting 0.204):")
for model, predicate in searches:
    star = delta_boundary(protocol, channel, model, predicate)
    where = f"at {predicate[1]:g} km" if predicate[0] == "positive_at_L" else "anywhere"
    print(f"  {model:>20}, key {where:>10}: delta* = {star:.4g}")
