"""Laziness-factor blending of equal weights with the optimizer's ideal.

Three bounded indicators — RSI, the up-day share (beta), and a squashed
trend-line slope (gamma) — set how much of the day's allocation leans on
the equal-weight portfolio versus the mean-variance ideal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InsufficientDataError
from .optimizer import EQUAL_WEIGHTS, WeightVector
from .trend import TrendLine, tangent_slope

DEFAULT_INDICATOR_WINDOW = 14
DEFAULT_GAMMA_SCALE = 0.005  # relative slope per day mapping to tanh(1)
FALLBACK_DELTA1 = 0.7


@dataclass
class Indicators:
    """Momentum gauges, each normalized into [0, 100]."""

    rsi: float
    beta: float
    gamma: float
    window: int

    def __post_init__(self):
        for name in ("rsi", "beta", "gamma"):
            v = getattr(self, name)
            if not (0.0 <= v <= 100.0) or not math.isfinite(v):
                raise ContractError(f"{name} must lie in [0, 100], got {v}")


@dataclass(frozen=True)
class LazinessCoefficients:
    """Convex-combination coefficients: delta1 on equal weights, delta2 on ideal."""

    delta1: float
    delta2: float

    def __post_init__(self):
        if abs(self.delta1 + self.delta2 - 1.0) > 1e-12:
            raise ContractError("delta1 + delta2 must equal 1")
        if not (0.0 <= self.delta1 <= 1.0):
            raise ContractError(f"delta1 must lie in [0, 1], got {self.delta1}")


def compute_rsi(prices: np.ndarray, window: int = DEFAULT_INDICATOR_WINDOW) -> float:
    """100 x average gain / (average gain + average loss) over the window.

    Simple (unsmoothed) averages of the last ``window`` daily changes; a
    flat window scores the neutral 50.
    """
    prices = np.asarray(prices, dtype=float)
    if window < 2:
        raise ContractError(f"window must be >= 2, got {window}")
    if len(prices) < window + 1:
        raise InsufficientDataError(f"need {window + 1} prices for RSI({window})")
    moves = np.diff(prices[-(window + 1):])
    gains = float(np.sum(moves[moves > 0]))
    losses = float(-np.sum(moves[moves < 0]))
    if gains + losses == 0:
        return 50.0
    return 100.0 * gains / (gains + losses)


def compute_beta(prices: np.ndarray, window: int = DEFAULT_INDICATOR_WINDOW) -> float:
    """Share of up days among moving days in the trailing fortnight, x100.

    Flat days count on neither side; an all-flat window scores 50.
    """
    prices = np.asarray(prices, dtype=float)
    if len(prices) < window + 1:
        raise InsufficientDataError(f"need {window + 1} prices for beta({window})")
    moves = np.diff(prices[-(window + 1):])
    ups = int(np.sum(moves > 0))
    downs = int(np.sum(moves < 0))
    if ups + downs == 0:
        return 50.0
    return 100.0 * ups / (ups + downs)


def compute_gamma(
    trend: TrendLine, index: int, scale: float = DEFAULT_GAMMA_SCALE
) -> float:
    """Trend-line slope squashed into [0, 100], 50 = flat.

    The slope is taken relative to the trend level so assets of any price
    scale compare, then mapped through 100 * (1 + tanh(k/scale)) / 2.
    """
    if scale <= 0:
        raise ContractError(f"scale must be positive, got {scale}")
    k = tangent_slope(trend, index)
    level = trend.values[index]
    if level == 0:
        raise ContractError("trend level is zero; relative slope undefined")
    return 100.0 * (1.0 + math.tanh((k / level) / scale)) / 2.0


def combine_delta(
    indicators: Indicators, fallback_delta1: float = FALLBACK_DELTA1
) -> LazinessCoefficients:
    """delta1 = 0.8 * RSI / (RSI + beta + gamma), clamped into [0, 0.8]."""
    total = indicators.rsi + indicators.beta + indicators.gamma
    if total <= 0:
        return LazinessCoefficients(fallback_delta1, 1.0 - fallback_delta1)
    delta1 = 0.8 * indicators.rsi / total
    delta1 = min(max(delta1, 0.0), 0.8)
    return LazinessCoefficients(delta1, 1.0 - delta1)


def blend_weights(ideal: WeightVector, delta: LazinessCoefficients) -> WeightVector:
    """Convex combination of equal weights and the ideal weights."""
    mixed = delta.delta1 * EQUAL_WEIGHTS.as_array() + delta.delta2 * ideal.as_array()
    return WeightVector(*mixed, source="blended")


def blend_weights_constrained(
    ideal: WeightVector, delta: LazinessCoefficients, gold_fraction: float
) -> WeightVector:
    """Blend only the cash/bitcoin split while gold is frozen.

    The frozen gold fraction passes through; the free mass is pulled toward
    its even two-way split by delta1.
    """
    free = 1.0 - gold_fraction
    equal_free = free / 2.0
    w_cash = delta.delta1 * equal_free + delta.delta2 * ideal.w_cash
    w_btc = delta.delta1 * equal_free + delta.delta2 * ideal.w_btc
    return WeightVector(w_cash, gold_fraction, w_btc, source="blended")
