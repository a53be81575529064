import numpy as np
import pytest
from scipy.stats import chi2

from lazyfolio.arima import (
    ArimaModel,
    ArimaOrder,
    adf_test,
    difference,
    fit,
    forecast_one_step,
    integrate,
    ljung_box,
    ljung_box_pvalue,
    recommend_d,
    select_order,
    _mackinnon_critical,
)
from lazyfolio.errors import ContractError, InsufficientDataError
from lazyfolio.market_data import Asset, load_csv

from conftest import DATA_DIR, simulate_arima212


class TestDifference:
    def test_first_difference(self):
        assert difference([1.0, 3, 6, 10], 1).tolist() == [2.0, 3.0, 4.0]

    def test_identity(self):
        x = np.array([5.0, 1.0, 9.0])
        assert difference(x, 0).tolist() == x.tolist()

    def test_second_difference(self):
        assert difference([1.0, 3, 6, 10], 2).tolist() == [1.0, 1.0]

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            difference([1.0, 2.0], 2)

    def test_negative_d(self):
        with pytest.raises(ContractError):
            difference([1.0, 2.0], -1)


class TestIntegrate:
    def test_round_trip_single_pass(self):
        x = np.array([1.0, 3, 6, 10])
        anchors = np.array([x[0]])
        rebuilt = np.concatenate([[x[0]], integrate(difference(x, 1), 1, anchors)])
        assert np.allclose(rebuilt, x, atol=1e-12)

    def test_identity_for_zero_d(self):
        x = np.array([2.0, 4.0])
        assert integrate(x, 0, np.array([])).tolist() == x.tolist()

    def test_single_step(self):
        assert integrate(np.array([4.0]), 1, np.array([10.0]))[-1] == 14.0

    def test_anchor_mismatch(self):
        with pytest.raises(ContractError):
            integrate(np.array([1.0]), 2, np.array([1.0]))

    def test_exact_round_trip_all_orders(self):
        rng = np.random.default_rng(2)
        for d in (0, 1, 2):
            for _ in range(25):
                x = rng.normal(50, 10, 40)
                diffs = difference(x, d)
                if d == 0:
                    assert np.allclose(integrate(diffs, 0, np.array([])), x, atol=1e-9)
                    continue
                anchors = np.array([difference(x, k)[d - 1 - k] for k in range(d)])
                rebuilt = np.concatenate([x[:d], integrate(diffs, d, anchors)])
                assert np.allclose(rebuilt, x, atol=1e-9)


class TestFit:
    def test_white_noise_constant_model(self):
        rng = np.random.default_rng(0)
        x = rng.normal(7.0, 2.0, 400)
        model = fit(x, ArimaOrder(0, 0, 0), window_cap=None)
        assert model.intercept == pytest.approx(x.mean(), abs=1e-9)
        assert model.residual_variance == pytest.approx(x.var(), rel=1e-6)

    def test_ar1_recovery(self):
        hits = 0
        for seed in range(10):
            rng = np.random.default_rng(seed)
            e = rng.normal(0, 1, 1000)
            x = np.empty(1000)
            x[0] = e[0]
            for t in range(1, 1000):
                x[t] = 0.9 * x[t - 1] + e[t]
            model = fit(x, ArimaOrder(1, 0, 0), window_cap=None)
            hits += 0.85 <= model.ar_coeffs[0] <= 0.95
        assert hits >= 9

    def test_window_cap_enforced(self):
        x = np.random.default_rng(1).normal(0, 1, 150)
        with pytest.raises(ContractError, match="cap"):
            fit(x, ArimaOrder(1, 0, 0))
        fit(x, ArimaOrder(1, 0, 0), window_cap=None)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            fit(np.arange(10.0), ArimaOrder(2, 1, 2))

    def test_determinism(self):
        x, _ = simulate_arima212(300, seed=4)
        a = fit(x, ArimaOrder(2, 1, 2), window_cap=None)
        b = fit(x, ArimaOrder(2, 1, 2), window_cap=None)
        assert a.params.tolist() == b.params.tolist()
        assert a.residuals.tolist() == b.residuals.tolist()

    def test_r_squared_bounded(self):
        x, _ = simulate_arima212(300, seed=9)
        model = fit(x, ArimaOrder(2, 1, 2), window_cap=None)
        assert model.r_squared <= 1.0
        assert model.residual_variance >= 0.0


class TestForecast:
    def test_constant_model(self):
        model_const = ArimaModel(
            order=ArimaOrder(0, 0, 0),
            intercept=7.0,
            ar_coeffs=np.array([]),
            ma_coeffs=np.array([]),
            residual_variance=1.0,
            training_window=100,
            residuals=np.zeros(100),
            aic=0.0,
            r_squared=0.0,
            converged=True,
            iterations=0,
            ar_stationary=True,
            ma_invertible=True,
            tail_levels=np.array([1.0, 2.0]),
        )
        forecast, band = forecast_one_step(model_const, recent=np.array([55.0]))
        assert forecast == 7.0
        assert band == 1.0

    def test_ar1_direct_formula(self):
        model = ArimaModel(
            order=ArimaOrder(1, 0, 0),
            intercept=0.0,
            ar_coeffs=np.array([0.5]),
            ma_coeffs=np.array([]),
            residual_variance=4.0,
            training_window=50,
            residuals=np.zeros(49),
            aic=0.0,
            r_squared=0.0,
            converged=True,
            iterations=0,
            ar_stationary=True,
            ma_invertible=True,
            tail_levels=np.array([10.0]),
        )
        forecast, band = forecast_one_step(model, recent=np.array([10.0]))
        assert forecast == 5.0
        assert band == 2.0

    def test_constant_series_forecasts_constant(self):
        for order in (ArimaOrder(1, 1, 0), ArimaOrder(0, 1, 1), ArimaOrder(2, 1, 2)):
            series = np.full(80, 123.0)
            model = fit(series, order)
            forecast, _ = forecast_one_step(model)
            assert forecast == pytest.approx(123.0, abs=1e-9)

    def test_insufficient_history(self):
        model = fit(np.cumsum(np.random.default_rng(0).normal(1, 1, 80)) + 50, ArimaOrder(2, 1, 0))
        with pytest.raises(ContractError):
            forecast_one_step(model, recent=np.array([1.0]))


class TestSelectOrder:
    def test_white_noise_picks_empty_model(self):
        rng = np.random.default_rng(3)
        x = rng.normal(5.0, 1.0, 300)
        order = select_order(x, d=0, max_p=2, max_q=2, window_cap=None)
        assert (order.p, order.q) == (0, 0)

    def test_winner_has_minimal_aic(self):
        x, _ = simulate_arima212(300, seed=6)
        chosen = select_order(x, d=1, max_p=2, max_q=2, window_cap=None)
        aics = {}
        for p in range(3):
            for q in range(3):
                try:
                    aics[(p, q)] = fit(
                        x, ArimaOrder(p, 1, q), window_cap=None, condition_on=2
                    ).aic
                except Exception:
                    continue
        assert aics[(chosen.p, chosen.q)] == min(aics.values())


class TestAdf:
    def test_bundled_gold_window_matches_published_shape(self):
        series = load_csv(DATA_DIR / "gold.csv", Asset.GOLD)
        window = series.prices[400:493]
        results = adf_test(window, max_d=2)
        assert results[0].p_value > 0.1  # levels: unit root not rejected
        assert results[1].p_value < 0.01  # first difference: stationary
        assert results[2].p_value < 0.01
        assert recommend_d(results) == 1

    def test_critical_values_match_published_table(self):
        crit = _mackinnon_critical(87)
        assert crit["1%"] == pytest.approx(-3.507, abs=2e-3)
        assert crit["5%"] == pytest.approx(-2.895, abs=2e-3)
        assert crit["10%"] == pytest.approx(-2.585, abs=2e-3)

    def test_thresholds_increasing(self):
        series = np.cumsum(np.random.default_rng(0).normal(0, 1, 200))
        for res in adf_test(series, max_d=1):
            assert res.thresholds["1%"] < res.thresholds["5%"] < res.thresholds["10%"]
            assert 0.0 <= res.p_value <= 1.0

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            adf_test(np.arange(20.0), max_d=2)


class TestLjungBox:
    def test_published_q_to_p_mapping(self):
        # Q6 = 0.039 with the published model's 5 fitted parameters -> p 0.844.
        assert ljung_box_pvalue(0.039, 6, model_df=5) == pytest.approx(0.844, abs=1e-3)

    def test_matches_direct_chi2(self):
        rng = np.random.default_rng(1)
        resid = rng.normal(0, 1, 300)
        report = ljung_box(resid, [6, 12], model_df=2)
        for lag, (q_stat, p) in report.ljung_box.items():
            assert q_stat >= 0.0
            assert p == pytest.approx(float(chi2.sf(q_stat, lag - 2)), abs=1e-12)

    def test_lag_bounds(self):
        with pytest.raises(ContractError):
            ljung_box(np.random.default_rng(0).normal(0, 1, 10), [10])
        with pytest.raises(ContractError):
            ljung_box(np.random.default_rng(0).normal(0, 1, 10), [0])

    def test_strong_autocorrelation_detected(self):
        rng = np.random.default_rng(2)
        e = rng.normal(0, 1, 500)
        x = np.empty(500)
        x[0] = e[0]
        for t in range(1, 500):
            x[t] = 0.5 * x[t - 1] + e[t]
        report = ljung_box(x, [6])
        assert report.ljung_box[6][1] < 0.01


class TestDiagnose:
    def test_model_diagnose_reports_fit(self):
        x, _ = simulate_arima212(400, seed=12)
        model = fit(x, ArimaOrder(2, 1, 2), window_cap=None, raise_on_nonconvergence=False)
        report = model.diagnose(lags=(6, 12))
        assert set(report.ljung_box) == {6, 12}
        assert report.r_squared == model.r_squared
        # A well-specified model leaves residuals that are not grossly colored.
        assert report.ljung_box[6][1] > 0.01
