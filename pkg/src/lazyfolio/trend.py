"""Moving-average trend lines and the signals read off them.

Long-horizon direction comes from 5/20/60-day MA and EMA lines: the
tangent slope of a line, the rate of change of that slope (curvature),
sign-change inflection points, and golden/death crossovers between a
short and a long line.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AlignmentError, ContractError, InsufficientDataError

DEFAULT_WINDOWS = (5, 20, 60)

# Any sign change in curvature counts as an inflection by default.
INFLECTION_THRESHOLD = 1e-9


class TrendKind(Enum):
    MA = "ma"
    EMA = "ema"


class Shape(Enum):
    CONVEX = "convex"    # curvature < 0, presages a fall
    CONCAVE = "concave"  # curvature > 0, presages a rise


class CrossDirection(Enum):
    GOLDEN = "golden_cross"
    DEATH = "death_cross"


@dataclass
class TrendLine:
    """A smoothed price line aligned to the input dates.

    ``values[i]`` is NaN where the window is not yet warm (the first
    ``window - 1`` entries of an MA); EMA values are defined from index 0.
    """

    window: int
    kind: TrendKind
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def defined(self, index: int) -> bool:
        return 0 <= index < len(self.values) and not np.isnan(self.values[index])


@dataclass(frozen=True)
class InflectionPoint:
    index: int
    slope_k: float
    slope_rate_k_prime: float
    shape: Shape


@dataclass(frozen=True)
class CrossoverEvent:
    index: int
    direction: CrossDirection
    short_window: int
    long_window: int


def moving_average(series: np.ndarray, window: int) -> TrendLine:
    """Arithmetic mean of the trailing ``window`` prices, NaN while warming."""
    series = np.asarray(series, dtype=float)
    if window < 1:
        raise ContractError(f"window must be >= 1, got {window}")
    if len(series) < window:
        raise InsufficientDataError(
            f"need at least {window} observations for MA({window}), got {len(series)}"
        )
    if window == 1:
        return TrendLine(1, TrendKind.MA, series.copy())
    values = np.full(len(series), np.nan)
    windows = np.lib.stride_tricks.sliding_window_view(series, window)
    values[window - 1:] = windows.mean(axis=1)
    return TrendLine(window, TrendKind.MA, values)


def exponential_ma(series: np.ndarray, window: int) -> TrendLine:
    """Recursive exponential smoothing with factor 2/(window+1).

    Seeded with the first observation, so values are defined from index 0.
    """
    series = np.asarray(series, dtype=float)
    if window < 1:
        raise ContractError(f"window must be >= 1, got {window}")
    if len(series) == 0:
        raise InsufficientDataError("cannot smooth an empty series")
    eta = 2.0 / (window + 1)
    values = np.empty(len(series))
    values[0] = series[0]
    for t in range(1, len(series)):
        values[t] = values[t - 1] + eta * (series[t] - values[t - 1])
    return TrendLine(window, TrendKind.EMA, values)


def tangent_slope(trend: TrendLine, index: int) -> float:
    """First difference trend[index] - trend[index-1] (price units/day)."""
    if index < 1 or index >= len(trend):
        raise ContractError(f"index {index} out of range for slope")
    if not (trend.defined(index) and trend.defined(index - 1)):
        raise InsufficientDataError(f"slope undefined at index {index}: line still warming up")
    return float(trend.values[index] - trend.values[index - 1])


def detect_inflections(
    trend: TrendLine, threshold: float = INFLECTION_THRESHOLD
) -> list[InflectionPoint]:
    """Report each point where the curvature of the line changes sign.

    Curvature is the day-over-day change of the tangent slope.  A point is
    reported when its curvature magnitude exceeds ``threshold`` and its sign
    differs from the previously reported one, so consecutive reports always
    alternate between convex (curvature < 0) and concave (curvature > 0).
    """
    values = trend.values
    defined = np.flatnonzero(~np.isnan(values))
    if len(defined) < 3:
        raise InsufficientDataError("need at least 3 defined trend values")
    start = defined[0]

    points = []
    last_sign = 0
    for t in range(start + 2, len(values)):
        k_now = values[t] - values[t - 1]
        k_prev = values[t - 1] - values[t - 2]
        k_prime = k_now - k_prev
        if abs(k_prime) <= threshold:
            continue
        sign = 1 if k_prime > 0 else -1
        if sign == last_sign:
            continue
        last_sign = sign
        points.append(
            InflectionPoint(
                index=t,
                slope_k=float(k_now),
                slope_rate_k_prime=float(k_prime),
                shape=Shape.CONCAVE if sign > 0 else Shape.CONVEX,
            )
        )
    return points


def detect_crossovers(short: TrendLine, long: TrendLine) -> list[CrossoverEvent]:
    """Golden/death crosses of a short line through a long line.

    A cross fires on the first day the short line sits strictly on the
    other side of the long line than it previously (strictly) did; ties at
    exact equality never fire and never re-arm, so events alternate.
    """
    if len(short) != len(long):
        raise AlignmentError(
            f"trend lines must share one date axis, got lengths {len(short)} and {len(long)}"
        )
    if short.window >= long.window:
        raise ContractError(
            f"short window ({short.window}) must be below long window ({long.window})"
        )

    events = []
    last_sign = 0
    for t in range(len(short)):
        if not (short.defined(t) and long.defined(t)):
            continue
        diff = short.values[t] - long.values[t]
        if diff == 0:
            continue
        sign = 1 if diff > 0 else -1
        if last_sign != 0 and sign != last_sign:
            events.append(
                CrossoverEvent(
                    index=t,
                    direction=CrossDirection.GOLDEN if sign > 0 else CrossDirection.DEATH,
                    short_window=short.window,
                    long_window=long.window,
                )
            )
        last_sign = sign
    return events
