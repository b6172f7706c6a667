import logging
import math

import numpy as np
import pytest

from mdiqkd_corr.cs_bounds import (
    G_minus,
    G_plus,
    actual_bound_from_ref,
    g_pm,
    ref_interval_from_actual,
)


class TestGPm:
    def test_hand_computed_values(self):
        assert g_pm(0.2, 0.9, "minus") == pytest.approx(0.02, abs=1e-12)
        assert g_pm(0.2, 0.9, "plus") == pytest.approx(0.50, abs=1e-12)

    def test_perfect_overlap_is_identity(self):
        for y in (0.0, 0.1, 0.5, 0.93, 1.0):
            assert g_pm(y, 1.0, "minus") == y
            assert g_pm(y, 1.0, "plus") == y

    def test_invalid_sign(self):
        with pytest.raises(ValueError):
            g_pm(0.2, 0.9, "both")


class TestGMinusGPlus:
    def test_branches(self):
        assert G_minus(0.05, 0.9) == 0.0  # y <= 1 - z
        assert G_plus(0.95, 0.9) == 1.0  # y >= z
        assert G_minus(0.2, 0.9) == pytest.approx(0.02, abs=1e-12)
        assert G_plus(0.2, 0.9) == pytest.approx(0.50, abs=1e-12)

    def test_branch_continuity(self):
        for z in (0.3, 0.7, 0.9, 0.999):
            assert abs(g_pm(1.0 - z, z, "minus")) < 1e-12
            assert abs(g_pm(z, z, "plus") - 1.0) < 1e-12

    def test_sandwich_on_grid(self):
        ys = np.linspace(0.0, 1.0, 41)
        zs = np.linspace(0.0, 1.0, 41)
        for y in ys:
            for z in zs:
                lo = G_minus(float(y), float(z))
                hi = G_plus(float(y), float(z))
                assert lo <= y + 1e-12
                assert hi >= y - 1e-12

    def test_degenerate_overlap_is_vacuous(self):
        for y in (0.0, 0.3, 1.0):
            assert G_minus(y, 0.0) == 0.0
            assert G_plus(y, 0.0) == 1.0

    def test_monotone_tightening_in_z(self):
        zs = np.linspace(0.0, 1.0, 101)
        for y in (0.01, 0.2, 0.8):
            lows = [G_minus(y, float(z)) for z in zs]
            highs = [G_plus(y, float(z)) for z in zs]
            assert all(b >= a - 1e-12 for a, b in zip(lows, lows[1:]))
            assert all(b <= a + 1e-12 for a, b in zip(highs, highs[1:]))

    def test_exact_identity_at_unit_overlap(self):
        # bitwise identity matters for the zero-deviation pipeline
        for y in (0.0, 1e-9, 0.137, 0.99, 1.0):
            assert G_minus(y, 1.0) == y
            assert G_plus(y, 1.0) == y


class TestRefInterval:
    def test_unit_overlap_degenerate(self):
        assert ref_interval_from_actual(0.37, 1.0) == (0.37, 0.37)

    def test_zero_actual(self):
        lo, hi = ref_interval_from_actual(0.0, 0.8)
        assert lo == 0.0
        assert hi == pytest.approx(0.2, abs=1e-12)  # g_+(0, z) = 1 - z

    def test_contains_actual_value(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            q = float(rng.random())
            tau = float(rng.random())
            lo, hi = ref_interval_from_actual(q, tau)
            assert lo - 1e-12 <= q <= hi + 1e-12

    def test_example(self):
        lo, hi = ref_interval_from_actual(0.2, 0.9)
        assert lo == pytest.approx(0.02, abs=1e-12)
        assert hi == pytest.approx(0.50, abs=1e-12)


class TestActualBoundFromRef:
    def test_directions(self):
        assert actual_bound_from_ref(0.2, 0.9, "lower") == pytest.approx(0.02, abs=1e-12)
        assert actual_bound_from_ref(0.2, 0.9, "upper") == pytest.approx(0.50, abs=1e-12)
        with pytest.raises(ValueError):
            actual_bound_from_ref(0.2, 0.9, "sideways")

    def test_unit_yield_lower_is_overlap(self):
        for tau in (0.3, 0.77, 0.95):
            assert actual_bound_from_ref(1.0, tau, "lower") == pytest.approx(tau, abs=1e-12)

    def test_unit_overlap_identity(self):
        assert actual_bound_from_ref(0.42, 1.0, "lower") == 0.42
        assert actual_bound_from_ref(0.42, 1.0, "upper") == 0.42


class TestInputClamping:
    def test_small_overshoot_clamped_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="mdiqkd_corr.cs_bounds"):
            value = g_pm(1.0 + 1e-10, 0.9, "minus")
        assert math.isfinite(value)
        assert any("grazes" in rec.message for rec in caplog.records)

    def test_large_violation_rejected(self):
        with pytest.raises(ValueError):
            g_pm(1.1, 0.9, "minus")
        with pytest.raises(ValueError):
            G_plus(0.5, -0.2)
