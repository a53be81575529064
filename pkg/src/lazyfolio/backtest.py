"""Daily rebalancing loop: warm-up, forecast, optimize, blend, settle, ledger.

Wealth accounting marks the held positions to each day's actual prices,
so forecast error flows into realized wealth; the optimizer only ever sees
expected (forecast) returns.  Runs are bit-reproducible for a fixed
configuration and seed.
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import arima
from .arima import ArimaOrder
from .blend import (
    DEFAULT_GAMMA_SCALE,
    DEFAULT_INDICATOR_WINDOW,
    Indicators,
    LazinessCoefficients,
    blend_weights,
    blend_weights_constrained,
    combine_delta,
    compute_beta,
    compute_gamma,
    compute_rsi,
)
from .errors import (
    ConfigError,
    ContractError,
    ConvergenceError,
    InsufficientDataError,
    LazyfolioError,
    SelectionError,
)
from .market_data import AlignedMarket, Asset
from .optimizer import (
    ZERO_RETURNS,
    HoldingsState,
    WeightVector,
    estimate_covariance,
    estimate_returns,
    optimize_day,
    wealth_after_rebalance,
)
from .trend import exponential_ma


class Strategy(Enum):
    LAZY = "lazy"
    CONTROL_IDEAL_ONLY = "control"
    EQUAL_ONLY = "equal"


class DeltaMode(Enum):
    FIXED = "fixed"
    DAILY = "daily"


@dataclass
class BacktestConfig:
    initial_wealth: float = 1000.0
    warmup: int = 30
    alpha_gold: float = 0.01
    alpha_btc: float = 0.02
    monte_carlo_n: int = 10_000
    seed: int = 0
    delta_mode: DeltaMode = DeltaMode.FIXED
    delta1: float = 0.7
    strategy: Strategy = Strategy.LAZY
    arima_window: int = 90
    arima_max_p: int = 2
    arima_max_q: int = 2
    arima_max_d: int = 2
    order_refresh: int = 30
    cov_window: int = 60
    cov_min_window: int = 10
    cash_rate: float = 0.0
    cash_variance: float = 0.0
    indicator_window: int = DEFAULT_INDICATOR_WINDOW
    gamma_scale: float = DEFAULT_GAMMA_SCALE
    gamma_ema_window: int = 20

    def __post_init__(self):
        if isinstance(self.strategy, str):
            self.strategy = Strategy(self.strategy)
        if isinstance(self.delta_mode, str):
            self.delta_mode = DeltaMode(self.delta_mode)
        if self.initial_wealth <= 0:
            raise ConfigError(f"initial wealth must be positive, got {self.initial_wealth}")
        if not (0 <= self.alpha_gold < 1 and 0 <= self.alpha_btc < 1):
            raise ConfigError("cost rates must lie in [0, 1)")
        if not (0.0 <= self.delta1 <= 1.0):
            raise ConfigError(f"delta1 must lie in [0, 1], got {self.delta1}")
        if self.monte_carlo_n < 1:
            raise ConfigError("monte_carlo_n must be >= 1")
        if self.warmup < self.cov_min_window + 1:
            raise ConfigError(
                f"warmup ({self.warmup}) must cover the covariance requirement "
                f"({self.cov_min_window + 1} days)"
            )


@dataclass
class DailyRecord:
    date: dt.date
    w_cash: float
    w_gold: float
    w_btc: float
    cash: float
    gold_units: float
    btc_units: float
    total_wealth: float
    cost_paid: float
    forecast_gold: float
    forecast_btc: float
    delta1: float
    gold_tradable: bool
    ideal_w_cash: float = float("nan")
    ideal_w_gold: float = float("nan")
    ideal_w_btc: float = float("nan")
    rsi: float = float("nan")
    beta: float = float("nan")
    gamma: float = float("nan")


@dataclass
class ComparisonSummary:
    dates: list
    wealth_ratio: list
    uplift_pct: float


@dataclass
class BacktestReport:
    ledger: list
    final_wealth: float
    annualized_return: float
    profitability_rate: float
    max_drawdown: float
    config: BacktestConfig
    comparison: ComparisonSummary | None = None

    @property
    def wealth_series(self) -> np.ndarray:
        return np.array([rec.total_wealth for rec in self.ledger])

    @property
    def dates(self) -> list:
        return [rec.date for rec in self.ledger]


class Forecaster:
    """One-step price forecasts with daily refits and periodic order refresh.

    Forecasts are cached by (asset, day): a delta-sweep or control-group
    rerun over the same market reuses every fit instead of recomputing the
    dominant cost of the loop.  Gold models train on native gold closes
    only; carried weekend prices would feed zero pseudo-returns into the
    dynamics.
    """

    MIN_HISTORY = 30
    MIN_SELECT_HISTORY = 50

    def __init__(self, market: AlignedMarket, config: BacktestConfig):
        self.market = market
        self.config = config
        self._forecast_cache: dict = {}
        self._order_cache: dict = {}
        gold_native = np.flatnonzero(market.gold_tradable)
        self._gold_native_days = gold_native
        self._gold_native_prices = market.gold_price[gold_native]
        self._gold_pos = np.searchsorted(gold_native, np.arange(len(market)), side="right")

    def _window(self, asset: Asset, day: int) -> np.ndarray:
        cfg = self.config
        if asset is Asset.BITCOIN:
            lo = max(0, day + 1 - cfg.arima_window)
            return self.market.btc_price[lo : day + 1]
        count = self._gold_pos[day]
        lo = max(0, count - cfg.arima_window)
        return self._gold_native_prices[lo:count]

    def _order_for(self, asset: Asset, day: int, window: np.ndarray) -> ArimaOrder:
        cfg = self.config
        epoch = day // cfg.order_refresh
        key = (asset, epoch)
        if key in self._order_cache:
            return self._order_cache[key]
        if len(window) < self.MIN_SELECT_HISTORY:
            order = ArimaOrder(1, 1, 0)
        else:
            try:
                d = arima.recommend_d(arima.adf_test(window, max_d=cfg.arima_max_d))
            except InsufficientDataError:
                d = 1
            try:
                order = arima.select_order(
                    window, d=d, max_p=cfg.arima_max_p, max_q=cfg.arima_max_q
                )
            except SelectionError:
                order = ArimaOrder(1, d, 0)
        self._order_cache[key] = order
        return order

    def forecast(self, asset: Asset, day: int) -> float:
        """Forecast the asset's next close from history ending at ``day``."""
        key = (asset, day)
        if key in self._forecast_cache:
            return self._forecast_cache[key]
        window = self._window(asset, day)
        last = float(window[-1])
        value = last
        if len(window) >= self.MIN_HISTORY:
            order = self._order_for(asset, day, window)
            try:
                model = arima.fit(window, order)
            except ConvergenceError as exc:
                model = exc.best_params
            except LazyfolioError:
                model = None
            if model is not None:
                forecast, _ = arima.forecast_one_step(model)
                if math.isfinite(forecast) and forecast > 0:
                    value = forecast
        self._forecast_cache[key] = value
        return value


def _warmup_record(date, state: HoldingsState, wealth: float, tradable: bool) -> DailyRecord:
    return DailyRecord(
        date=date,
        w_cash=1.0,
        w_gold=0.0,
        w_btc=0.0,
        cash=state.cash,
        gold_units=state.gold_units,
        btc_units=state.btc_units,
        total_wealth=wealth,
        cost_paid=0.0,
        forecast_gold=float("nan"),
        forecast_btc=float("nan"),
        delta1=float("nan"),
        gold_tradable=tradable,
    )


def _daily_delta(
    market: AlignedMarket, day: int, cfg: BacktestConfig
) -> tuple[LazinessCoefficients, Indicators]:
    """Average each indicator over the two risky assets, then apply the rule."""
    win = cfg.indicator_window
    ema_hist = max(3 * cfg.gamma_ema_window, win + 1)
    rsis, betas, gammas = [], [], []
    for prices in (market.gold_price, market.btc_price):
        trailing = prices[max(0, day + 1 - ema_hist) : day + 1]
        rsis.append(compute_rsi(trailing, win))
        betas.append(compute_beta(trailing, win))
        ema = exponential_ma(trailing, cfg.gamma_ema_window)
        gammas.append(compute_gamma(ema, len(ema) - 1, cfg.gamma_scale))
    ind = Indicators(
        rsi=float(np.mean(rsis)),
        beta=float(np.mean(betas)),
        gamma=float(np.mean(gammas)),
        window=win,
    )
    return combine_delta(ind), ind


def step(
    state: HoldingsState,
    day: int,
    market: AlignedMarket,
    cfg: BacktestConfig,
    forecaster: Forecaster,
) -> tuple[DailyRecord, HoldingsState]:
    """One post-warm-up day: forecast, optimize, blend, rebalance, record."""
    x_g = float(market.gold_price[day])
    x_b = float(market.btc_price[day])
    tradable = bool(market.gold_tradable[day])
    prices = (x_g, x_b)
    w_pre = state.wealth(x_g, x_b)
    gold_fraction = state.gold_units * x_g / w_pre

    forecast_gold = float("nan")
    forecast_btc = float("nan")
    ideal = None
    if cfg.strategy is not Strategy.EQUAL_ONLY:
        forecasts = {Asset.BITCOIN: forecaster.forecast(Asset.BITCOIN, day)}
        forecast_btc = forecasts[Asset.BITCOIN]
        if tradable:
            forecasts[Asset.GOLD] = forecaster.forecast(Asset.GOLD, day)
            forecast_gold = forecasts[Asset.GOLD]
        returns = estimate_returns(market, forecasts, day, cfg.cash_rate)
        cov = estimate_covariance(
            market, day, cfg.cov_window, cfg.cov_min_window, cfg.cash_variance
        )
        best, _ = optimize_day(
            state,
            prices,
            returns,
            cov,
            (cfg.alpha_gold, cfg.alpha_btc),
            tradable,
            cfg.monte_carlo_n,
            seed=[cfg.seed, day],
            risk_free=cfg.cash_rate,
        )
        ideal = best.weights

    indicators = None
    if cfg.strategy is Strategy.CONTROL_IDEAL_ONLY:
        blended = ideal
        delta1 = 0.0
    elif cfg.strategy is Strategy.EQUAL_ONLY:
        delta = LazinessCoefficients(1.0, 0.0)
        delta1 = 1.0
        anchor = WeightVector(1.0, 0.0, 0.0) if tradable else None
        if tradable:
            blended = blend_weights(anchor, delta)
        else:
            blended = blend_weights_constrained(
                WeightVector(1.0 - gold_fraction, gold_fraction, 0.0), delta, gold_fraction
            )
    else:
        if cfg.delta_mode is DeltaMode.FIXED:
            delta = LazinessCoefficients(cfg.delta1, 1.0 - cfg.delta1)
        else:
            delta, indicators = _daily_delta(market, day, cfg)
        delta1 = delta.delta1
        if tradable:
            blended = blend_weights(ideal, delta)
        else:
            blended = blend_weights_constrained(ideal, delta, gold_fraction)

    settle = wealth_after_rebalance(
        state,
        blended,
        prices,
        ZERO_RETURNS,  # growth already realized by marking holdings to market
        (cfg.alpha_gold, cfg.alpha_btc),
        gold_tradable=tradable,
    )
    record = DailyRecord(
        date=market.dates[day],
        w_cash=blended.w_cash,
        w_gold=blended.w_gold,
        w_btc=blended.w_btc,
        cash=settle.holdings.cash,
        gold_units=settle.holdings.gold_units,
        btc_units=settle.holdings.btc_units,
        total_wealth=settle.post_cost_wealth,
        cost_paid=settle.cost_paid,
        forecast_gold=forecast_gold,
        forecast_btc=forecast_btc,
        delta1=delta1,
        gold_tradable=tradable,
        ideal_w_cash=ideal.w_cash if ideal else float("nan"),
        ideal_w_gold=ideal.w_gold if ideal else float("nan"),
        ideal_w_btc=ideal.w_btc if ideal else float("nan"),
        rsi=indicators.rsi if indicators else float("nan"),
        beta=indicators.beta if indicators else float("nan"),
        gamma=indicators.gamma if indicators else float("nan"),
    )
    return record, settle.holdings


def run(
    config: BacktestConfig,
    market: AlignedMarket,
    forecaster: Forecaster | None = None,
) -> BacktestReport:
    """Replay the full daily loop over an aligned market.

    The first ``warmup`` days hold the initial all-cash position while
    history accumulates.  A shared :class:`Forecaster` may be passed in so
    paired runs (delta sweep, control group) reuse the fitted models.
    """
    if len(market) <= config.warmup:
        raise ContractError(
            f"market spans {len(market)} days, need more than warmup={config.warmup}"
        )
    if forecaster is None:
        forecaster = Forecaster(market, config)
    state = HoldingsState(cash=config.initial_wealth, gold_units=0.0, btc_units=0.0)
    ledger = []
    for day in range(len(market)):
        if day < config.warmup:
            ledger.append(
                _warmup_record(
                    market.dates[day],
                    state,
                    state.wealth(market.gold_price[day], market.btc_price[day]),
                    bool(market.gold_tradable[day]),
                )
            )
            continue
        try:
            record, state = step(state, day, market, config, forecaster)
        except LazyfolioError as exc:
            exc.partial_ledger = ledger
            raise
        ledger.append(record)

    wealth = np.array([rec.total_wealth for rec in ledger])
    dates = [rec.date for rec in ledger]
    annualized, profitability, drawdown = metrics(wealth, dates)
    return BacktestReport(
        ledger=ledger,
        final_wealth=float(wealth[-1]),
        annualized_return=annualized,
        profitability_rate=profitability,
        max_drawdown=drawdown,
        config=config,
    )


def metrics(wealth: np.ndarray, dates: list) -> tuple[float, float, float]:
    """(annualized return, profitability rate, max drawdown) of a wealth path."""
    wealth = np.asarray(wealth, dtype=float)
    if len(wealth) < 2:
        raise ContractError("need at least 2 ledger entries for metrics")
    days = (dates[-1] - dates[0]).days
    if days <= 0:
        raise ContractError("ledger dates must span at least one day")
    growth = wealth[-1] / wealth[0]
    annualized = growth ** (365.25 / days) - 1.0
    profitability = growth - 1.0
    peaks = np.maximum.accumulate(wealth)
    drawdown = float(np.max((peaks - wealth) / peaks))
    return float(annualized), float(profitability), drawdown


def compare(lazy: BacktestReport, control: BacktestReport) -> ComparisonSummary:
    """Per-day wealth ratio and final uplift of the blended run over control."""
    if lazy.dates != control.dates:
        raise ContractError("reports cover different dates; cannot compare")
    ratio = [l.total_wealth / c.total_wealth for l, c in zip(lazy.ledger, control.ledger)]
    uplift = (lazy.final_wealth - control.final_wealth) / control.final_wealth * 100.0
    return ComparisonSummary(dates=lazy.dates, wealth_ratio=ratio, uplift_pct=uplift)


def delta_sweep(
    config: BacktestConfig,
    market: AlignedMarket,
    grid: np.ndarray | None = None,
    forecaster: Forecaster | None = None,
) -> list[tuple[float, float]]:
    """Final wealth for each delta1 on a grid, reusing one forecast cache."""
    if grid is None:
        grid = np.round(np.arange(0.0, 1.0001, 0.1), 10)
    if forecaster is None:
        forecaster = Forecaster(market, config)
    out = []
    for delta1 in grid:
        cfg = replace(
            config, delta1=float(delta1), delta_mode=DeltaMode.FIXED, strategy=Strategy.LAZY
        )
        report = run(cfg, market, forecaster=forecaster)
        out.append((float(delta1), report.final_wealth))
    return out


def cumulative_attribution(report: BacktestReport, market: AlignedMarket) -> dict:
    """Total return contribution per asset: sum of weight x realized return."""
    totals = {Asset.CASH: 0.0, Asset.GOLD: 0.0, Asset.BITCOIN: 0.0}
    for t in range(1, len(report.ledger)):
        prev = report.ledger[t - 1]
        r_gold = market.gold_price[t] / market.gold_price[t - 1] - 1.0
        r_btc = market.btc_price[t] / market.btc_price[t - 1] - 1.0
        totals[Asset.GOLD] += prev.w_gold * r_gold
        totals[Asset.BITCOIN] += prev.w_btc * r_btc
        totals[Asset.CASH] += prev.w_cash * report.config.cash_rate
    return totals
