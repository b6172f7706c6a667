#!/usr/bin/env python3
"""Generate the bundled sample click-rate dataset.

Synthesizes per-pattern click-rate histograms whose calibrated moment chain
reproduces the reference statistics used by the acceptance suite:

  SS fit             (0.204, 0.056)
  weighted S fit     (0.203, sqrt(0.056^2 + 0.045^2) ~ 0.0718)
  correlation comp.  (-0.001, 0.045)
  deviation range    [-0.136, 0.134]
  delta_max          0.136 / 0.204 ~ 0.6667

Component shapes are zero-truncated Gaussians with underlying parameters
solved so the discretized moments hit their targets exactly; clicks are the
intensities divided by the nominal calibration 0.204 / 1.8e-4.

Writes src/mdiqkd_corr/data/sample_clickrates.csv.  Deterministic.
"""

import math
import pathlib

import numpy as np
from scipy.optimize import root

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "mdiqkd_corr" / "data" / "sample_clickrates.csv"

WEIGHTS = {"VS": 0.061, "D1S": 0.253, "D2S": 0.083, "SS": 0.603}
NOMINAL = 0.204
SS_CLICK_MEAN = 1.8e-4
CALIBRATION = NOMINAL / SS_CLICK_MEAN

MIX_MEAN = 0.203
MIX_VAR = 0.056**2 + 0.045**2  # makes the correlation component exactly 0.045

# Fixed component means; D1S balances the mixture mean.
MEANS = {"VS": 0.182, "D2S": 0.210, "SS": NOMINAL}
SIGMAS = {"VS": 0.090, "D2S": 0.090, "SS": 0.056}

TOTAL_COUNTS = 2_000_000
GRID = np.arange(0.00075, 0.75, 0.0015)  # intensity-space bin centers


def solve_component(target_mean: float, target_sigma: float) -> np.ndarray:
    """Bin masses of a zero-truncated Gaussian whose discretized weighted
    moments equal the targets."""

    def discretized(params):
        m, s = params
        dens = np.exp(-0.5 * ((GRID - m) / s) ** 2)
        dens /= dens.sum()
        mean = float(np.dot(dens, GRID))
        var = float(np.dot(dens, (GRID - mean) ** 2))
        return dens, mean, var

    def residual(params):
        _, mean, var = discretized(params)
        return [
            (mean - target_mean) / target_mean,
            (var - target_sigma**2) / target_sigma**2,
        ]

    sol = root(residual, x0=[target_mean, target_sigma])
    if not sol.success or max(abs(r) for r in residual(sol.x)) > 1e-9:
        raise RuntimeError(f"moment solve failed: {sol.message}")
    dens, mean, var = discretized(sol.x)
    assert abs(mean - target_mean) < 1e-9 and abs(math.sqrt(var) - target_sigma) < 1e-9
    return dens


def main() -> None:
    w = WEIGHTS
    means = dict(MEANS)
    # mixture mean constraint fixes the D1S mean
    means["D1S"] = (
        MIX_MEAN - w["VS"] * means["VS"] - w["D2S"] * means["D2S"] - w["SS"] * means["SS"]
    ) / w["D1S"]

    between = sum(w[g] * means[g] ** 2 for g in w) - MIX_MEAN**2
    sigmas = dict(SIGMAS)
    within_known = (
        w["VS"] * sigmas["VS"] ** 2
        + w["D2S"] * sigmas["D2S"] ** 2
        + w["SS"] * sigmas["SS"] ** 2
    )
    var_d1s = (MIX_VAR - between - within_known) / w["D1S"]
    if var_d1s <= 0.0:
        raise RuntimeError("no admissible D1S variance")
    sigmas["D1S"] = math.sqrt(var_d1s)

    print("component targets:")
    for g in ("VS", "D1S", "D2S", "SS"):
        print(f"  {g}: mean={means[g]:.9f} sigma={sigmas[g]:.9f}")

    lines = [
        "# Sample click-rate histograms for the signal-terminated pattern family.",
        "# Columns: pattern,bin_center,count  (bin centers are per-pulse click rates)",
        "pattern,bin_center,count",
    ]
    for g in ("VS", "D1S", "D2S", "SS"):
        dens = solve_component(means[g], sigmas[g])
        counts = np.rint(dens * TOTAL_COUNTS).astype(int)
        for center, count in zip(GRID / CALIBRATION, counts):
            if count > 0:
                lines.append(f"{g},{float(center)!r},{int(count)}")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(lines) - 3} rows)")


if __name__ == "__main__":
    main()
