import math

import numpy as np
import pytest

from lazyfolio.blend import (
    Indicators,
    LazinessCoefficients,
    blend_weights,
    blend_weights_constrained,
    combine_delta,
    compute_beta,
    compute_gamma,
    compute_rsi,
)
from lazyfolio.errors import ContractError, InsufficientDataError
from lazyfolio.optimizer import EQUAL_WEIGHTS, WeightVector
from lazyfolio.trend import exponential_ma, moving_average


class TestRsi:
    def test_strictly_increasing(self):
        assert compute_rsi(np.arange(1.0, 20.0), 14) == 100.0

    def test_strictly_decreasing(self):
        assert compute_rsi(np.arange(20.0, 1.0, -1.0), 14) == 0.0

    def test_hand_average(self):
        # Window of 4 moves: gains 2,2 and losses 1,1.
        prices = np.array([10.0, 12.0, 11.0, 13.0, 12.0])
        assert compute_rsi(prices, 4) == pytest.approx(100 * 2 / 3, abs=1e-12)

    def test_flat_window_neutral(self):
        assert compute_rsi(np.full(20, 5.0), 14) == 50.0

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            compute_rsi(np.arange(10.0), 14)
        with pytest.raises(ContractError):
            compute_rsi(np.arange(10.0), 1)

    def test_range(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            prices = 100 * np.exp(np.cumsum(rng.normal(0, 0.02, 30)))
            assert 0.0 <= compute_rsi(prices, 14) <= 100.0


class TestBeta:
    def test_all_up(self):
        assert compute_beta(np.arange(15.0), 14) == 100.0

    def test_balanced(self):
        prices = np.array([10.0] + [11.0, 10.0] * 7)
        assert compute_beta(prices, 14) == 50.0

    def test_hand_count(self):
        moves = [1.0] * 10 + [-1.0] * 4
        prices = np.concatenate([[100.0], 100.0 + np.cumsum(moves)])
        assert compute_beta(prices, 14) == pytest.approx(100 * 10 / 14, abs=1e-10)

    def test_flat_days_excluded(self):
        prices = np.array([10.0, 11.0, 11.0, 11.0, 12.0, 11.0, 11.0, 11.0])
        # Moves: +1, 0, 0, +1, -1, 0, 0 -> 2 up, 1 down.
        assert compute_beta(prices, 7) == pytest.approx(100 * 2 / 3, abs=1e-10)

    def test_all_flat_neutral(self):
        assert compute_beta(np.full(16, 3.0), 14) == 50.0


class TestGamma:
    def test_flat_trend_neutral(self):
        trend = exponential_ma(np.full(30, 100.0), 20)
        assert compute_gamma(trend, 29) == 50.0

    def test_strong_rise_saturates(self):
        trend = moving_average(np.geomspace(1.0, 1e6, 50), 1)
        assert compute_gamma(trend, 49) > 99.0

    def test_unit_relative_slope(self):
        # Slope/level = 0.005 exactly, matching the default squash scale.
        trend = moving_average(np.array([100.0, 200.0, 200.0 / (1 - 0.005)]), 1)
        got = compute_gamma(trend, 2, scale=0.005)
        assert got == pytest.approx(100 * (1 + math.tanh(1.0)) / 2, abs=1e-9)

    def test_warmup_propagates(self):
        trend = moving_average(np.arange(10.0), 4)
        with pytest.raises(InsufficientDataError):
            compute_gamma(trend, 3)

    def test_monotone_in_slope(self):
        vals = []
        for slope in (0.0, 1.0, 3.0):
            trend = moving_average(np.array([100.0, 100.0 + slope]), 1)
            vals.append(compute_gamma(trend, 1))
        assert vals == sorted(vals)
        assert all(0.0 <= v <= 100.0 for v in vals)


class TestCombineDelta:
    def test_direct_formula(self):
        delta = combine_delta(Indicators(rsi=50.0, beta=10.0, gamma=10.0, window=14))
        assert delta.delta1 == pytest.approx(0.8 * 50 / 70, abs=1e-12)
        assert delta.delta2 == pytest.approx(1 - 0.8 * 50 / 70, abs=1e-12)

    def test_formula_limit(self):
        delta = combine_delta(Indicators(rsi=60.0, beta=0.0, gamma=0.0, window=14))
        assert delta.delta1 == 0.8

    def test_degenerate_fallback(self):
        delta = combine_delta(Indicators(rsi=0.0, beta=0.0, gamma=0.0, window=14))
        assert delta.delta1 == 0.7

    def test_five_year_mean_magnitude(self):
        # The production configuration pins delta1 = 0.7 as the long-run mean.
        delta = LazinessCoefficients(0.7, 0.3)
        assert delta.delta1 + delta.delta2 == 1.0

    def test_monotone_in_rsi(self):
        prev = -1.0
        for rsi in (10.0, 30.0, 50.0, 70.0, 90.0):
            d = combine_delta(Indicators(rsi=rsi, beta=20.0, gamma=20.0, window=14))
            assert d.delta1 > prev
            prev = d.delta1

    def test_bounded_by_analytic_range(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            rsi, beta, gamma = rng.uniform(0, 100, 3)
            if rsi + beta + gamma == 0:
                continue
            d = combine_delta(Indicators(rsi=rsi, beta=beta, gamma=gamma, window=14))
            assert 0.0 <= d.delta1 <= 0.8

    def test_validation(self):
        with pytest.raises(ContractError):
            LazinessCoefficients(0.7, 0.2)
        with pytest.raises(ContractError):
            Indicators(rsi=120.0, beta=0.0, gamma=0.0, window=14)


class TestBlendWeights:
    def test_pure_equal(self):
        out = blend_weights(WeightVector(1.0, 0.0, 0.0), LazinessCoefficients(1.0, 0.0))
        assert out.as_array().tolist() == EQUAL_WEIGHTS.as_array().tolist()

    def test_pure_ideal(self):
        ideal = WeightVector(0.1, 0.2, 0.7)
        out = blend_weights(ideal, LazinessCoefficients(0.0, 1.0))
        assert out.as_array().tolist() == ideal.as_array().tolist()

    def test_hand_convex_combination(self):
        out = blend_weights(WeightVector(1.0, 0.0, 0.0), LazinessCoefficients(0.7, 0.3))
        assert out.w_cash == pytest.approx(0.7 / 3 + 0.3, abs=1e-12)
        assert out.w_gold == pytest.approx(0.7 / 3, abs=1e-12)
        assert out.w_btc == pytest.approx(0.7 / 3, abs=1e-12)

    def test_simplex_preserved(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            g = rng.exponential(1, 3)
            ideal = WeightVector(*(g / g.sum()))
            d1 = rng.uniform(0, 1)
            out = blend_weights(ideal, LazinessCoefficients(d1, 1 - d1))
            arr = out.as_array()
            assert abs(arr.sum() - 1) <= 1e-12
            assert (arr >= -1e-15).all() and (arr <= 1 + 1e-15).all()

    def test_contraction_toward_equal(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            g = rng.exponential(1, 3)
            ideal = WeightVector(*(g / g.sum()))
            d1 = rng.uniform(0, 1)
            out = blend_weights(ideal, LazinessCoefficients(d1, 1 - d1))
            dist_ideal = np.abs(ideal.as_array() - 1 / 3).max()
            dist_out = np.abs(out.as_array() - 1 / 3).max()
            assert dist_out == pytest.approx((1 - d1) * dist_ideal, abs=1e-12)


class TestConstrainedBlend:
    def test_gold_passes_through(self):
        ideal = WeightVector(0.5, 0.2, 0.3)
        out = blend_weights_constrained(ideal, LazinessCoefficients(0.6, 0.4), 0.2)
        assert out.w_gold == 0.2
        assert abs(out.as_array().sum() - 1) <= 1e-12

    def test_pure_equal_splits_free_mass(self):
        ideal = WeightVector(0.7, 0.1, 0.2)
        out = blend_weights_constrained(ideal, LazinessCoefficients(1.0, 0.0), 0.1)
        assert out.w_cash == pytest.approx(0.45, abs=1e-12)
        assert out.w_btc == pytest.approx(0.45, abs=1e-12)
