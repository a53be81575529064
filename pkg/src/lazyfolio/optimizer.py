"""Cost-aware mean-variance portfolio selection by Monte Carlo simplex search.

Each day the feasible cash/gold/bitcoin weight set is sampled uniformly,
every sample is scored for risk (trailing covariance) and post-cost wealth
(the wealth recursion with proportional transaction costs), the efficient
frontier is extracted, and the maximum-Sharpe frontier point becomes the
day's ideal portfolio.  On gold non-trading days the gold position is
frozen and only the cash/bitcoin split is searched.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractError,
    DegenerateFrontierError,
    InsufficientDataError,
    PsdViolationError,
)
from .market_data import AlignedMarket, Asset, log_return

SIMPLEX_TOLERANCE = 1e-12


@dataclass(frozen=True)
class WeightVector:
    """Fractions of wealth in (cash, gold, bitcoin); a point on the 2-simplex."""

    w_cash: float
    w_gold: float
    w_btc: float
    source: str = ""

    def __post_init__(self):
        total = self.w_cash + self.w_gold + self.w_btc
        if abs(total - 1.0) > 1e-9:
            raise ContractError(f"weights must sum to 1, got {total!r}")
        for w in (self.w_cash, self.w_gold, self.w_btc):
            if w < -SIMPLEX_TOLERANCE or w > 1.0 + 1e-9:
                raise ContractError(f"weight {w} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.w_cash, self.w_gold, self.w_btc])


EQUAL_WEIGHTS = WeightVector(1 / 3, 1 / 3, 1 / 3, source="equal")
ALL_CASH = WeightVector(1.0, 0.0, 0.0, source="cash")


@dataclass(frozen=True)
class HoldingsState:
    """Physical positions: dollars of cash, ounces of gold, bitcoin coins."""

    cash: float
    gold_units: float
    btc_units: float

    def wealth(self, gold_price: float, btc_price: float) -> float:
        return self.cash + self.gold_units * gold_price + self.btc_units * btc_price

    def weights(self, gold_price: float, btc_price: float) -> WeightVector:
        w = self.wealth(gold_price, btc_price)
        return WeightVector(
            self.cash / w,
            self.gold_units * gold_price / w,
            self.btc_units * btc_price / w,
            source="holdings",
        )


@dataclass
class ReturnEstimate:
    """Per-asset one-day expected log returns."""

    cash: float
    gold: float
    btc: float
    source: str = "forecast"

    def as_array(self) -> np.ndarray:
        return np.array([self.cash, self.gold, self.btc])


ZERO_RETURNS = ReturnEstimate(0.0, 0.0, 0.0, source="realized")


@dataclass
class CovarianceMatrix:
    """3x3 daily log-return covariance over (cash, gold, bitcoin)."""

    matrix: np.ndarray
    estimation_window: int

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape != (3, 3):
            raise ContractError(f"covariance must be 3x3, got {self.matrix.shape}")
        if not np.allclose(self.matrix, self.matrix.T, atol=1e-10):
            raise ContractError("covariance must be symmetric")
        if np.min(np.linalg.eigvalsh(self.matrix)) < -1e-10:
            raise PsdViolationError("covariance is not positive semi-definite")


@dataclass
class PortfolioEvaluation:
    """One candidate portfolio scored for the day."""

    weights: WeightVector
    risk: float
    expected_return: float
    post_cost_wealth: float
    cost_paid: float
    post_cost_return: float
    holdings: HoldingsState


@dataclass
class FrontierCloud:
    """Monte Carlo sample cloud with frontier and tangency annotations.

    Rows of ``weights`` pair with the per-sample score arrays; the frontier
    is the non-dominated set in (risk, post-cost return).
    """

    weights: np.ndarray
    risk: np.ndarray
    expected_return: np.ndarray
    post_cost_wealth: np.ndarray
    post_cost_return: np.ndarray
    cost_paid: np.ndarray
    n: int
    seed: object
    frontier_indices: np.ndarray = field(default=None)
    tangency_index: int = -1

    def __len__(self) -> int:
        return self.n

    @property
    def min_risk_index(self) -> int:
        return int(np.argmin(self.risk))

    def on_frontier(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[self.frontier_indices] = True
        return mask

    def evaluation(self, i: int, prev: HoldingsState, prices, gold_tradable=True) -> PortfolioEvaluation:
        w = WeightVector(*self.weights[i], source="ideal")
        holdings = allocate_holdings(
            w, self.post_cost_wealth[i], prices, prev, gold_tradable=gold_tradable
        )
        return PortfolioEvaluation(
            weights=w,
            risk=float(self.risk[i]),
            expected_return=float(self.expected_return[i]),
            post_cost_wealth=float(self.post_cost_wealth[i]),
            cost_paid=float(self.cost_paid[i]),
            post_cost_return=float(self.post_cost_return[i]),
            holdings=holdings,
        )


# ---------------------------------------------------------------------------
# Estimation


def estimate_returns(
    market: AlignedMarket,
    forecasts: dict,
    day: int,
    cash_rate: float = 0.0,
) -> ReturnEstimate:
    """Expected one-day log returns from next-day price forecasts.

    ``forecasts`` maps Asset to the forecast next-day price.  Gold needs a
    forecast only on its trading days; its frozen-day return is 0 because
    the price is carried over.
    """
    btc_now = float(market.btc_price[day])
    if Asset.BITCOIN not in forecasts:
        raise ContractError("bitcoin forecast missing")
    r_btc = log_return(btc_now, float(forecasts[Asset.BITCOIN]))
    if market.gold_tradable[day]:
        if Asset.GOLD not in forecasts:
            raise ContractError(f"gold forecast missing on trading day {market.dates[day]}")
        r_gold = log_return(float(market.gold_price[day]), float(forecasts[Asset.GOLD]))
    else:
        r_gold = 0.0
    return ReturnEstimate(cash=cash_rate, gold=r_gold, btc=r_btc, source="forecast")


def estimate_covariance(
    market: AlignedMarket,
    day: int,
    window: int = 60,
    min_window: int = 10,
    cash_variance: float = 0.0,
) -> CovarianceMatrix:
    """Sample covariance of trailing daily log returns ending at ``day``.

    The window shrinks early in the sample but never below ``min_window``
    return observations.  The cash row and column hold ``cash_variance``
    on the diagonal (0 under the default riskless-cash model).
    """
    avail = day  # returns need a prior price
    use = min(window, avail)
    if use < min_window:
        raise InsufficientDataError(
            f"need {min_window} trailing returns before day {day}, have {avail}"
        )
    gold = np.log(market.gold_price[day - use : day + 1])
    btc = np.log(market.btc_price[day - use : day + 1])
    rets = np.column_stack([np.diff(gold), np.diff(btc)])
    cov2 = np.cov(rets, rowvar=False, ddof=1)
    full = np.zeros((3, 3))
    full[0, 0] = cash_variance
    full[1:, 1:] = cov2
    return CovarianceMatrix(full, estimation_window=use)


def portfolio_risk(weights: WeightVector, cov: CovarianceMatrix) -> float:
    """sqrt(w' S w); tiny negative quadratic forms clamp to zero."""
    w = weights.as_array()
    quad = float(w @ cov.matrix @ w)
    if quad < -1e-12:
        raise PsdViolationError(f"quadratic form {quad} below -1e-12")
    return math.sqrt(max(quad, 0.0))


# ---------------------------------------------------------------------------
# Wealth recursion with transaction costs


def allocate_holdings(
    weights: WeightVector,
    wealth: float,
    prices,
    prev: HoldingsState | None = None,
    gold_tradable: bool = True,
) -> HoldingsState:
    """Convert target weights and post-cost wealth into physical positions.

    On gold non-trading days the gold position is carried over bit-exactly
    and the cash/bitcoin weights split the remaining wealth.
    """
    gold_price, btc_price = float(prices[0]), float(prices[1])
    if gold_tradable:
        return HoldingsState(
            cash=weights.w_cash * wealth,
            gold_units=weights.w_gold * wealth / gold_price,
            btc_units=weights.w_btc * wealth / btc_price,
        )
    if prev is None:
        raise ContractError("carried gold position required on a non-trading day")
    free = wealth - prev.gold_units * gold_price
    split = weights.w_cash + weights.w_btc
    if split <= 0:
        return HoldingsState(cash=max(free, 0.0), gold_units=prev.gold_units, btc_units=0.0)
    return HoldingsState(
        cash=free * weights.w_cash / split,
        gold_units=prev.gold_units,
        btc_units=free * weights.w_btc / split / btc_price,
    )


def wealth_after_rebalance(
    prev: HoldingsState,
    new_weights: WeightVector,
    prices,
    returns: ReturnEstimate,
    costs,
    gold_tradable: bool = True,
    cov: CovarianceMatrix | None = None,
) -> PortfolioEvaluation:
    """Grow wealth by the portfolio return, then charge proportional costs.

    The cost of each risky asset is rate x price x |holdings change|, where
    the new holdings target is valued at the grown (pre-cost) wealth and
    day prices.  Pass zero returns when the growth was already realized by
    marking the holdings to market.
    """
    gold_price, btc_price = float(prices[0]), float(prices[1])
    alpha_gold, alpha_btc = float(costs[0]), float(costs[1])
    if not (0 <= alpha_gold < 1 and 0 <= alpha_btc < 1):
        raise ContractError(f"cost rates must lie in [0, 1), got {costs}")
    w_prev = prev.wealth(gold_price, btc_price)
    if w_prev <= 0:
        raise ContractError(f"prior wealth must be positive, got {w_prev}")

    r_t = float(new_weights.as_array() @ returns.as_array())
    pre_cost = w_prev * (1.0 + r_t)

    cost_gold = 0.0
    if gold_tradable:
        target_gold = pre_cost * new_weights.w_gold / gold_price
        cost_gold = alpha_gold * gold_price * abs(prev.gold_units - target_gold)
    target_btc = pre_cost * new_weights.w_btc / btc_price
    cost_btc = alpha_btc * btc_price * abs(prev.btc_units - target_btc)

    wealth = pre_cost - cost_gold - cost_btc
    holdings = allocate_holdings(new_weights, wealth, prices, prev, gold_tradable)
    return PortfolioEvaluation(
        weights=new_weights,
        risk=float("nan") if cov is None else portfolio_risk(new_weights, cov),
        expected_return=r_t,
        post_cost_wealth=wealth,
        cost_paid=cost_gold + cost_btc,
        post_cost_return=wealth / w_prev - 1.0,
        holdings=holdings,
    )


# ---------------------------------------------------------------------------
# Monte Carlo feasible set, frontier, tangency


def sample_simplex(n: int, rng_seed) -> np.ndarray:
    """n weight rows drawn uniformly from the 2-simplex (Dirichlet(1,1,1)).

    Deterministic for a fixed seed; the exponential-gap construction keeps
    every component nonnegative with rows summing to 1 exactly up to
    floating-point roundoff.
    """
    if n < 1:
        raise ContractError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(rng_seed)
    gaps = rng.exponential(scale=1.0, size=(n, 3))
    return gaps / gaps.sum(axis=1, keepdims=True)


def _sample_constrained(n: int, rng_seed, gold_fraction: float) -> np.ndarray:
    """Cash/bitcoin 1-simplex samples with the gold weight frozen."""
    rng = np.random.default_rng(rng_seed)
    gaps = rng.exponential(scale=1.0, size=(n, 2))
    free = gaps / gaps.sum(axis=1, keepdims=True) * (1.0 - gold_fraction)
    return np.column_stack([free[:, 0], np.full(n, gold_fraction), free[:, 1]])


def efficient_frontier_mask(risk: np.ndarray, ret: np.ndarray) -> np.ndarray:
    """Boolean mask of samples not dominated in (risk down, return up).

    A sample is dominated when another has risk <= and return >= with at
    least one strict inequality.  Vectorized sweep over risk tie-groups.
    """
    n = len(risk)
    order = np.lexsort((-ret, risk))  # risk ascending, return descending
    r_sorted = risk[order]
    v_sorted = ret[order]
    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    new_group[1:] = r_sorted[1:] != r_sorted[:-1]
    group_id = np.cumsum(new_group) - 1
    # Within a tie-group returns are sorted descending, so the group leader
    # holds the group's best return.
    group_best = v_sorted[new_group]
    best_from_lower = np.concatenate(([-np.inf], np.maximum.accumulate(group_best)[:-1]))
    keep = (v_sorted == group_best[group_id]) & (v_sorted > best_from_lower[group_id])
    mask = np.zeros(n, dtype=bool)
    mask[order[keep]] = True
    return mask


def efficient_frontier(cloud: FrontierCloud) -> FrontierCloud:
    """Annotate the cloud with its non-dominated subset."""
    if cloud.n == 0:
        raise ContractError("cannot extract a frontier from an empty cloud")
    mask = efficient_frontier_mask(cloud.risk, cloud.post_cost_return)
    cloud.frontier_indices = np.flatnonzero(mask)
    return cloud


def _sharpe_key(ret: float, sigma: float, risk_free: float):
    """Orderable Sharpe ranking; zero-risk samples sort by excess return sign."""
    excess = ret - risk_free
    if sigma > 0:
        return (1, excess / sigma, -sigma, ret)
    if excess > 0:
        return (2, excess, 0.0, ret)
    return (0 if excess == 0 else -1, excess, 0.0, ret)


def max_sharpe(cloud: FrontierCloud, risk_free: float = 0.0) -> int:
    """Index of the frontier sample with the highest Sharpe ratio.

    Ties resolve to the lower-risk sample.  Raises when every frontier
    sample has zero risk and no excess return (the all-cash corner is then
    the only sensible holding).
    """
    if cloud.frontier_indices is None:
        efficient_frontier(cloud)
    idx = cloud.frontier_indices
    if len(idx) == 0:
        raise ContractError("empty frontier")
    keys = [_sharpe_key(cloud.post_cost_return[i], cloud.risk[i], risk_free) for i in idx]
    best = max(range(len(idx)), key=lambda k: keys[k])
    if keys[best][0] <= 0:
        raise DegenerateFrontierError(
            "no sample offers positive risk or positive excess return"
        )
    cloud.tangency_index = int(idx[best])
    return cloud.tangency_index


def evaluate_cloud(
    weights: np.ndarray,
    prev: HoldingsState,
    prices,
    returns: ReturnEstimate,
    cov: CovarianceMatrix,
    costs,
    gold_tradable: bool,
    n: int,
    seed,
) -> FrontierCloud:
    """Vectorized risk / post-cost-wealth scoring of every weight row."""
    gold_price, btc_price = float(prices[0]), float(prices[1])
    w_prev = prev.wealth(gold_price, btc_price)
    if w_prev <= 0:
        raise ContractError(f"prior wealth must be positive, got {w_prev}")

    r = returns.as_array()
    port_ret = weights @ r
    pre_cost = w_prev * (1.0 + port_ret)

    if gold_tradable:
        cost_gold = float(costs[0]) * gold_price * np.abs(
            prev.gold_units - pre_cost * weights[:, 1] / gold_price
        )
    else:
        cost_gold = np.zeros(len(weights))
    cost_btc = float(costs[1]) * btc_price * np.abs(
        prev.btc_units - pre_cost * weights[:, 2] / btc_price
    )
    wealth = pre_cost - cost_gold - cost_btc

    quad = np.einsum("ij,jk,ik->i", weights, cov.matrix, weights)
    if np.min(quad) < -1e-12:
        raise PsdViolationError(f"quadratic form {np.min(quad)} below -1e-12")
    sigma = np.sqrt(np.clip(quad, 0.0, None))

    return FrontierCloud(
        weights=weights,
        risk=sigma,
        expected_return=port_ret,
        post_cost_wealth=wealth,
        post_cost_return=wealth / w_prev - 1.0,
        cost_paid=cost_gold + cost_btc,
        n=n,
        seed=seed,
    )


def optimize_day(
    prev: HoldingsState,
    prices,
    returns: ReturnEstimate,
    cov: CovarianceMatrix,
    costs,
    gold_tradable: bool,
    n: int,
    seed,
    risk_free: float = 0.0,
) -> tuple[PortfolioEvaluation, FrontierCloud]:
    """One day's ideal portfolio: sample, score, frontier, tangency.

    On gold non-trading days the gold weight is pinned to the carried
    position's fraction of wealth and only cash/bitcoin vary.  When the
    whole cloud is risk-free with no excess return the all-cash corner is
    returned instead of a tangency point.
    """
    gold_price, btc_price = float(prices[0]), float(prices[1])
    if gold_tradable:
        weights = sample_simplex(n, seed)
    else:
        w_prev = prev.wealth(gold_price, btc_price)
        gold_fraction = prev.gold_units * gold_price / w_prev
        weights = _sample_constrained(n, seed, gold_fraction)

    cloud = evaluate_cloud(weights, prev, prices, returns, cov, costs, gold_tradable, n, seed)
    efficient_frontier(cloud)
    try:
        tangency = max_sharpe(cloud, risk_free)
        best = cloud.evaluation(tangency, prev, prices, gold_tradable)
    except DegenerateFrontierError:
        fallback = ALL_CASH
        if not gold_tradable:
            gold_fraction = prev.gold_units * gold_price / prev.wealth(gold_price, btc_price)
            fallback = WeightVector(1.0 - gold_fraction, gold_fraction, 0.0, source="cash")
        best = wealth_after_rebalance(
            prev, fallback, prices, returns, costs, gold_tradable, cov
        )
    return best, cloud
