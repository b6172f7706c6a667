"""Security-analysis engine for decoy-state MDI QKD with intensity correlations.

Computes asymptotic secret-key-rate lower bounds for three-intensity
decoy-state MDI QKD transmitters whose emitted intensities are correlated
across rounds, and extracts the correlation parameters from measured
click-rate histograms.
"""

from .channel_model import ChannelParams, bessel_i0, gain_qber, gain_qber_tables
from .correlation_overlap import (
    CorrelationSpec,
    IntensityProtocol,
    ModelKind,
    bhattacharyya_lower,
    tau_lower,
    tau_table,
    tg_scaled_spec,
    tg_sweep_spec,
    worst_case_spec,
)
from .cs_bounds import G_minus, G_plus, actual_bound_from_ref, g_pm, ref_interval_from_actual
from .decoy_analysis import (
    GainQberTable,
    RefIntervalTable,
    SinglePhotonBounds,
    h11_ref_upper,
    ref_intervals,
    single_photon_bounds,
    y11_ref_lower,
)
from .experiment_ingest import (
    ClickHistogram,
    GroupWeights,
    IntensityDistribution,
    clicks_to_intensity,
    delta_from_distribution,
    extract_correlation_component,
    fit_gaussian,
    weighted_mixture,
)
from .keyrate_engine import (
    BoundaryBracketError,
    KeyRateAssessment,
    KeyRateCurve,
    KeyRatePoint,
    assess_key_rate,
    binary_entropy,
    delta_boundary,
    key_rate,
    max_distance,
    scan_distances,
)
from .photon_statistics import (
    DegenerateTruncationError,
    IntensityInterval,
    ProbabilityInterval,
    TruncatedGaussianParams,
    photon_number_cutoff,
    pnm_actual,
    pnm_interval,
    poisson_pmf,
    tg_pdf,
    tg_photon_prob,
)

__version__ = "0.1.0"
