import pytest

from mdiqkd_corr.correlation_overlap import (
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
from mdiqkd_corr.photon_statistics import TruncatedGaussianParams


class TestIntensityProtocol:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            IntensityProtocol(mu=0.01, nu=0.05, omega=1e-4)
        with pytest.raises(ValueError):
            IntensityProtocol(mu=0.2, nu=0.2, omega=1e-4)

    def test_probability_normalization(self):
        with pytest.raises(ValueError):
            IntensityProtocol(mu=0.2, nu=0.05, omega=0.0, p_mu=0.5, p_nu=0.2, p_omega=0.2)

    def test_defaults_valid(self):
        p = IntensityProtocol(mu=0.207, nu=0.035, omega=1e-4)
        assert p.intensities == (0.207, 0.035, 1e-4)
        assert abs(sum(p.probabilities) - 1.0) < 1e-12


class TestCorrelationSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            CorrelationSpec(xi=-1)
        with pytest.raises(ValueError):
            CorrelationSpec(delta_max=-0.1)
        with pytest.raises(ValueError):
            CorrelationSpec(model_kind=ModelKind.TRUNCATED_GAUSSIAN)
        with pytest.raises(ValueError):
            CorrelationSpec(tg_tau_semantics="bogus")

    def test_tg_support_envelope_enforced(self):
        params = TruncatedGaussianParams(gamma=0.2, sigma=0.01, lambda_lo=0.1, lambda_hi=0.3)
        with pytest.raises(ValueError):
            CorrelationSpec(
                delta_max=0.1,  # envelope [0.18, 0.22] excludes the support
                model_kind=ModelKind.TRUNCATED_GAUSSIAN,
                tg_params=((0.2, params),),
            )

    def test_interval_compounding(self):
        spec1 = worst_case_spec(0.01, xi=1)
        spec2 = worst_case_spec(0.01, xi=2)
        iv1 = spec1.interval_for(0.2)
        iv2 = spec2.interval_for(0.2)
        assert iv1.lo == pytest.approx(0.2 * 0.99)
        assert iv2.lo == pytest.approx(0.2 * 0.99**2)
        assert iv2.hi == pytest.approx(0.2 * 1.01**2)
        assert iv2.lo < iv1.lo and iv2.hi > iv1.hi

    def test_nonnegativity_clamp(self):
        iv = worst_case_spec(1.5).interval_for(0.2)
        assert iv.lo == 0.0

    def test_is_exact(self):
        assert worst_case_spec(0.0).is_exact
        assert worst_case_spec(0.3, xi=0).is_exact
        assert not worst_case_spec(1e-9).is_exact


class TestBhattacharyyaLower:
    def test_no_deviation_is_exactly_one(self):
        assert bhattacharyya_lower(0.207, 0.035, worst_case_spec(0.0)) == 1.0

    def test_never_exceeds_one(self):
        for spec in (worst_case_spec(1e-7), worst_case_spec(1e-2), tg_sweep_spec((0.207, 0.035), 0.1)):
            assert bhattacharyya_lower(0.207, 0.035, spec) <= 1.0 + 1e-12

    def test_extended_truncation_oracle(self):
        # doubling the cutoff must not change the sum beyond tail mass
        spec = worst_case_spec(1e-3)
        short = bhattacharyya_lower(0.207, 0.035, spec)
        long = bhattacharyya_lower(0.207, 0.035, spec, n_max=100)
        assert long == pytest.approx(short, abs=1e-13)
        assert long >= short  # extra nonnegative terms only


class TestTauLower:
    def test_exact_at_zero_deviation(self, default_protocol):
        assert tau_lower(0.207, 0.035, default_protocol, worst_case_spec(0.0)) == 1.0

    def test_bounds_and_monotonicity(self, default_protocol):
        prev = 1.0
        for delta in (1e-7, 1e-5, 1e-3, 1e-1):
            tau = tau_lower(0.207, 0.207, default_protocol, worst_case_spec(delta))
            assert 0.0 <= tau <= 1.0
            assert tau <= prev + 1e-15
            prev = tau

    def test_small_deviation_close_to_one(self, default_protocol):
        tau = tau_lower(0.207, 0.207, default_protocol, worst_case_spec(1e-7, xi=1))
        assert 1.0 - tau < 1e-5

    def test_symmetry(self, default_protocol):
        spec = worst_case_spec(1e-3)
        assert tau_lower(0.207, 0.035, default_protocol, spec) == pytest.approx(
            tau_lower(0.035, 0.207, default_protocol, spec), rel=1e-12
        )

    def test_record_option_reduces_to_global(self, default_protocol):
        # per-record intervals equal to the global ones give the collapsed value
        for xi in (1, 2):
            plain = worst_case_spec(1e-3, xi=xi)

            def global_intervals(setting, record, _spec=plain):
                iv = _spec.interval_for(setting)
                return (iv.lo, iv.hi)

            with_records = CorrelationSpec(
                xi=xi, delta_max=1e-3, record_intervals=global_intervals
            )
            assert tau_lower(0.207, 0.035, default_protocol, with_records) == pytest.approx(
                tau_lower(0.207, 0.035, default_protocol, plain), rel=1e-12
            )

    def test_record_option_takes_worst_record(self, default_protocol):
        # one record gets a wider interval; the minimum must follow it
        wide = worst_case_spec(1e-2)
        narrow = worst_case_spec(1e-3)

        def per_record(setting, record):
            spec = wide if record[0] == default_protocol.mu else narrow
            iv = spec.interval_for(setting)
            return (iv.lo, iv.hi)

        spec = CorrelationSpec(xi=1, delta_max=1e-2, record_intervals=per_record)
        tau = tau_lower(0.207, 0.207, default_protocol, spec)
        assert tau == pytest.approx(
            tau_lower(0.207, 0.207, default_protocol, wide), rel=1e-12
        )

    def test_tg_mixture_semantics_matches_bhattacharyya(self, default_protocol):
        spec = tg_sweep_spec(default_protocol.intensities, 0.1)
        bc = min(bhattacharyya_lower(0.207, 0.035, spec), 1.0)
        assert tau_lower(0.207, 0.035, default_protocol, spec) == pytest.approx(bc * bc, rel=1e-12)

    def test_tg_averaged_is_more_conservative(self, default_protocol):
        mix = tg_sweep_spec(default_protocol.intensities, 0.1, tau_semantics="mixture")
        avg = tg_sweep_spec(default_protocol.intensities, 0.1, tau_semantics="averaged")
        t_mix = tau_lower(0.207, 0.207, default_protocol, mix)
        t_avg = tau_lower(0.207, 0.207, default_protocol, avg)
        assert t_avg <= t_mix

    def test_tg_coverage_required(self, default_protocol):
        spec = tg_sweep_spec((0.207,), 0.1)
        with pytest.raises(ValueError):
            tau_lower(0.207, 0.035, default_protocol, spec)


class TestSpecConstructors:
    def test_sweep_at_zero_is_exact(self):
        spec = tg_sweep_spec((0.207, 0.035), 0.0)
        assert spec.is_exact

    def test_sweep_matches_three_sigma_rule(self):
        spec = tg_sweep_spec((0.207, 0.035, 1e-4), 0.3)
        params = spec.tg_for(0.207)
        assert params.sigma == pytest.approx(0.207 * 0.1)
        assert params.lambda_lo == pytest.approx(0.207 * 0.7)
        assert params.lambda_hi == pytest.approx(0.207 * 1.3)
        assert params.gamma == pytest.approx(0.207)

    def test_scaled_reproduces_fitted_component(self):
        # section-V style relative statistics around nominal 0.204
        spec = tg_scaled_spec(
            (0.204, 0.035, 1e-4),
            rel_mean_shift=-0.001 / 0.204,
            rel_sigma=0.045 / 0.204,
            rel_lo=-0.136 / 0.204,
            rel_hi=0.134 / 0.204,
        )
        params = spec.tg_for(0.204)
        assert params.gamma == pytest.approx(0.203, abs=1e-12)
        assert params.sigma == pytest.approx(0.045, abs=1e-12)
        assert params.lambda_lo == pytest.approx(0.068, abs=1e-12)
        assert params.lambda_hi == pytest.approx(0.338, abs=1e-12)
        assert spec.tg_for(0.035).sigma == pytest.approx(0.035 * 0.045 / 0.204)

    def test_scaled_skips_vacuum(self):
        spec = tg_scaled_spec((0.2, 0.0), 0.0, 0.1, -0.3, 0.3)
        assert spec.tg_for(0.0) is None

    def test_scaled_validation(self):
        with pytest.raises(ValueError):
            tg_scaled_spec((0.2,), 0.0, -0.1, -0.3, 0.3)
        with pytest.raises(ValueError):
            tg_scaled_spec((0.2,), 0.0, 0.1, 0.3, -0.3)


class TestTauTable:
    def test_shape_and_identity(self, default_protocol):
        table = tau_table(default_protocol, worst_case_spec(0.0))
        assert len(table) == 3 and all(len(row) == 3 for row in table)
        assert all(v == 1.0 for row in table for v in row)

    def test_worst_pair_is_signal_signal(self, default_protocol):
        table = tau_table(default_protocol, worst_case_spec(1e-3))
        values = {(i, j): table[i][j] for i in range(3) for j in range(3)}
        assert min(values.values()) == values[(0, 0)]
