import math
from pathlib import Path

import numpy as np
import pytest

from mdiqkd_corr.experiment_ingest import (
    ClickHistogram,
    GroupWeights,
    IntensityDistribution,
    clicks_to_intensity,
    delta_from_distribution,
    extract_correlation_component,
    fit_gaussian,
    ingest_pipeline,
    weighted_mixture,
)
from mdiqkd_corr.photon_statistics import IntensityInterval

DATA = Path(__file__).resolve().parents[1] / "src" / "mdiqkd_corr" / "data" / "sample_clickrates.csv"


def gaussian_histogram(pattern, mean, sigma, lo, hi, n_bins=400, total=1e6):
    centers = np.linspace(lo, hi, n_bins)
    dens = np.exp(-0.5 * ((centers - mean) / sigma) ** 2)
    counts = dens / dens.sum() * total
    return ClickHistogram(pattern, centers, counts)


class TestClickHistogram:
    def test_validation(self):
        with pytest.raises(ValueError):
            ClickHistogram("a", np.array([1.0, 2.0]), np.array([1.0]))
        with pytest.raises(ValueError):
            ClickHistogram("a", np.array([2.0, 1.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            ClickHistogram("a", np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        with pytest.raises(ValueError):
            ClickHistogram("a", np.array([1.0, 2.0]), np.array([1.0, -1.0]))

    def test_mean(self):
        h = ClickHistogram("a", np.array([1.0, 3.0]), np.array([1.0, 3.0]))
        assert h.mean == pytest.approx(2.5)


class TestClicksToIntensity:
    def test_single_bin_point(self):
        h = ClickHistogram("SS", np.array([0.204]), np.array([10.0]))
        d = clicks_to_intensity(h, 1.0)
        assert d.mean == pytest.approx(0.204)
        assert d.sigma == 0.0
        assert d.support == IntensityInterval(0.204, 0.204)

    def test_calibration_linearity(self):
        h = gaussian_histogram("SS", 1.8e-4, 2e-5, 1e-4, 2.6e-4)
        d1 = clicks_to_intensity(h, 1000.0)
        d2 = clicks_to_intensity(h, 2000.0)
        assert d2.mean == pytest.approx(2.0 * d1.mean, rel=1e-12)
        assert d2.sigma == pytest.approx(2.0 * d1.sigma, rel=1e-12)

    def test_nonpositive_calibration(self):
        h = ClickHistogram("SS", np.array([1.0]), np.array([1.0]))
        with pytest.raises(ValueError):
            clicks_to_intensity(h, 0.0)


class TestWeightedMixture:
    def test_single_component_unchanged(self):
        d = clicks_to_intensity(gaussian_histogram("a", 0.2, 0.01, 0.15, 0.25), 1.0)
        out = weighted_mixture([d], [GroupWeights(1.0)])
        assert out.mean == pytest.approx(d.mean, rel=1e-12)
        assert out.sigma == pytest.approx(d.sigma, rel=1e-12)

    def test_identical_components_any_weights(self):
        d = clicks_to_intensity(gaussian_histogram("a", 0.2, 0.01, 0.15, 0.25), 1.0)
        out = weighted_mixture([d, d], [GroupWeights(0.2), GroupWeights(5.0)])
        assert out.mean == pytest.approx(d.mean, rel=1e-12)
        assert out.sigma == pytest.approx(d.sigma, rel=1e-10)

    def test_mixture_mean_is_weighted_mean(self):
        d1 = clicks_to_intensity(gaussian_histogram("a", 0.18, 0.01, 0.13, 0.23), 1.0)
        d2 = clicks_to_intensity(gaussian_histogram("b", 0.22, 0.02, 0.13, 0.31), 1.0)
        out = weighted_mixture([d1, d2], [GroupWeights(0.3), GroupWeights(0.7)])
        expected = 0.3 * d1.mean + 0.7 * d2.mean
        assert out.mean == pytest.approx(expected, abs=1e-12)

    def test_weight_bookkeeping(self):
        w = GroupWeights(w_send=0.25, w_det=0.5)
        assert w.w == 0.125
        with pytest.raises(ValueError):
            GroupWeights(-0.1)

    def test_all_zero_weights(self):
        d = clicks_to_intensity(gaussian_histogram("a", 0.2, 0.01, 0.15, 0.25), 1.0)
        with pytest.raises(ValueError):
            weighted_mixture([d], [GroupWeights(0.0)])

    def test_length_mismatch(self):
        d = clicks_to_intensity(gaussian_histogram("a", 0.2, 0.01, 0.15, 0.25), 1.0)
        with pytest.raises(ValueError):
            weighted_mixture([d], [])


class TestFitGaussian:
    def test_sampling_oracle(self):
        rng = np.random.default_rng(42)
        samples = rng.normal(0.204, 0.056, size=10**6)
        d = IntensityDistribution(
            mean=float(samples.mean()),
            sigma=float(samples.std()),
            support=IntensityInterval(max(float(samples.min()), 0.0), float(samples.max())),
            values=samples,
            weights=np.ones_like(samples),
        )
        mean, sigma = fit_gaussian(d)
        assert abs(mean - 0.204) < 1e-3
        assert abs(sigma - 0.056) < 1e-3

    def test_degenerate_single_point(self, caplog):
        d = clicks_to_intensity(ClickHistogram("a", np.array([0.2]), np.array([5.0])), 1.0)
        mean, sigma = fit_gaussian(d)
        assert mean == pytest.approx(0.2)
        assert sigma == 0.0


class TestExtractCorrelationComponent:
    def test_reference_values(self):
        mean_c, sigma_c = extract_correlation_component((0.203, 0.072), (0.204, 0.056))
        assert mean_c == pytest.approx(-0.001, abs=1e-12)
        assert sigma_c == pytest.approx(math.sqrt(0.072**2 - 0.056**2), rel=1e-12)
        assert sigma_c == pytest.approx(0.0452, abs=5e-4)

    def test_identical_inputs(self):
        assert extract_correlation_component((0.2, 0.05), (0.2, 0.05)) == (0.0, 0.0)

    def test_clamped_when_fluctuations_dominate(self):
        mean_c, sigma_c = extract_correlation_component((0.2, 0.04), (0.201, 0.05))
        assert sigma_c == 0.0
        assert mean_c == pytest.approx(-0.001, abs=1e-12)

    def test_deconvolution_consistency(self):
        # convolve an independent fluctuation onto a known correlation
        rng = np.random.default_rng(3)
        n = 10**6
        fluct = rng.normal(0.2, 0.05, size=n)
        corr = rng.normal(-0.002, 0.03, size=n)
        total = fluct + corr
        mean_c, sigma_c = extract_correlation_component(
            (float(total.mean()), float(total.std())),
            (float(fluct.mean()), float(fluct.std())),
        )
        band = 3.0 * 0.05 / math.sqrt(n)
        assert abs(mean_c - (-0.002)) < 3 * band
        assert abs(sigma_c - 0.03) < 1e-3


class TestDeltaFromDistribution:
    def test_reference_values(self):
        delta, params = delta_from_distribution((-0.001, 0.045), 0.204)
        assert delta == pytest.approx(0.136 / 0.204, rel=1e-12)
        assert abs(delta - 0.666) < 1e-2
        assert params.gamma == pytest.approx(0.203, abs=1e-12)
        assert params.sigma == pytest.approx(0.045, abs=1e-12)
        assert params.lambda_lo == pytest.approx(0.068, abs=1e-12)
        assert params.lambda_hi == pytest.approx(0.338, abs=1e-12)

    def test_degenerate_component(self):
        delta, params = delta_from_distribution((0.0, 0.0), 0.204)
        assert delta == 0.0
        assert params is None

    def test_k_sigma_linearity(self):
        d3, _ = delta_from_distribution((0.0, 0.045), 0.204, k_sigma=3.0)
        d1, _ = delta_from_distribution((0.0, 0.045), 0.204, k_sigma=1.0)
        assert d1 == pytest.approx(d3 / 3.0, rel=1e-12)

    def test_scale_covariance(self):
        d1, _ = delta_from_distribution((-0.001, 0.045), 0.204)
        c = 3.7
        d2, _ = delta_from_distribution((-0.001 * c, 0.045 * c), 0.204 * c)
        assert d1 == pytest.approx(d2, rel=1e-12)

    def test_support_floor(self):
        _, params = delta_from_distribution((0.0, 0.2), 0.204)
        assert params.lambda_lo == 0.0

    def test_invalid_nominal(self):
        with pytest.raises(ValueError):
            delta_from_distribution((0.0, 0.01), 0.0)


class TestIngestPipeline:
    def load_bundle(self):
        from mdiqkd_corr.cli import load_click_histograms

        return load_click_histograms(DATA)

    def weights(self):
        return {
            "VS": GroupWeights(0.061),
            "D1S": GroupWeights(0.253),
            "D2S": GroupWeights(0.083),
            "SS": GroupWeights(0.603),
        }

    def test_bundled_dataset_reproduces_statistics(self):
        result = ingest_pipeline(self.load_bundle(), self.weights(), "SS", 0.204)
        assert result.reference_fit[0] == pytest.approx(0.204, abs=3e-3)
        assert result.reference_fit[1] == pytest.approx(0.056, abs=5e-3)
        assert result.combined_fit[0] == pytest.approx(0.203, abs=3e-3)
        assert result.combined_fit[1] == pytest.approx(0.072, abs=5e-3)
        assert result.correlation[0] == pytest.approx(-0.001, abs=2e-3)
        assert result.correlation[1] == pytest.approx(0.045, abs=5e-3)
        assert result.delta_max == pytest.approx(0.666, abs=1e-2)

    def test_identical_reference_and_family_gives_zero_delta(self):
        h = gaussian_histogram("SS", 1.8e-4, 1e-5, 1.2e-4, 2.4e-4)
        histos = {"SS": ClickHistogram("SS", h.bin_centers, h.counts.copy())}
        result = ingest_pipeline(histos, {"SS": GroupWeights(1.0)}, "SS", 0.204)
        assert result.delta_max == pytest.approx(0.0, abs=1e-12)
        assert result.tg_params is None

    def test_missing_reference_group(self):
        histos = self.load_bundle()
        histos.pop("SS")
        with pytest.raises(KeyError):
            ingest_pipeline(histos, self.weights(), "SS", 0.204)

    def test_missing_weighted_group(self):
        histos = self.load_bundle()
        histos.pop("VS")
        with pytest.raises(KeyError):
            ingest_pipeline(histos, self.weights(), "SS", 0.204)
