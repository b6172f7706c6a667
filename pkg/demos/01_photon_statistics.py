#!/usr/bin/env python3
"""Photon-number statistics under intensity deviations.

Walks through the three descriptions of an imperfect weak coherent source:
exact Poisson emission at the setting, worst-case interval bounds on the
joint photon-number probabilities, and the truncated-Gaussian point model.
"""

import math

from mdiqkd_corr import (
    IntensityInterval,
    TruncatedGaussianParams,
    pnm_interval,
    poisson_pmf,
    tg_pdf,
    tg_photon_prob,
)

MU = 0.207

print(f"Poisson emission at the signal setting mu = {MU}")
for n in range(5):
    print(f"  P({n} photons) = {poisson_pmf(n, MU):.6f}")
print(f"  total over n <= 25: {math.fsum(poisson_pmf(n, MU) for n in range(26)):.15f}")

print("\nWorst-case joint bounds at relative deviation 1e-3 (both parties on mu):")
iv = IntensityInterval(MU * (1 - 1e-3), MU * (1 + 1e-3))
for n, m in [(0, 0), (1, 0), (1, 1), (2, 1)]:
    out = pnm_interval(n, m, iv, iv)
    point = poisson_pmf(n, MU) * poisson_pmf(m, MU)
    print(f"  p({n},{m}) in [{out.lo:.8f}, {out.hi:.8f}]   (point value {point:.8f})")

print("\nTruncated-Gaussian intensity density fitted to a measured signal state:")
params = TruncatedGaussianParams(gamma=0.203, sigma=0.045, lambda_lo=0.068, lambda_hi=0.338)
for x in (0.05, 0.1, 0.203, 0.3, 0.35):
    print(f"  density({x:.3f}) = {tg_pdf(params, x):.4f}")
print("  photon-number law under that density:")
for n in range(4):
    print(f"    P({n}) = {tg_photon_prob(n, params):.6f}  (Poisson at setting: {poisson_pmf(n, 0.204):.6f})")
