"""Price ingestion, trading-calendar alignment, and log returns.

Raw per-asset CSVs are loaded into :class:`PriceSeries`, then gold and
bitcoin are joined on the bitcoin calendar (bitcoin trades every day the
data covers; gold does not).  Gold prices are carried forward across its
non-trading days so every aligned date has both prices.
"""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import AlignmentError, DomainError, IngestError


class Asset(Enum):
    CASH = "cash"
    GOLD = "gold"
    BITCOIN = "bitcoin"


_DATE_FORMATS = ("%Y-%m-%d", "%Y/%m/%d", "%m/%d/%Y")


def parse_date(text: str) -> dt.date:
    """Parse ISO-8601, YYYY/M/D, or M/D/YYYY dates; two-digit years rejected."""
    text = str(text).strip()
    for fmt in _DATE_FORMATS:
        try:
            parsed = dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
        if parsed.year < 1000:
            raise IngestError(f"ambiguous two-digit year in date {text!r}")
        return parsed
    raise IngestError(f"unparsable date {text!r}")


@dataclass(frozen=True)
class PricePoint:
    """One daily closing observation (currency units per ounce or per coin)."""

    date: dt.date
    price: float

    def __post_init__(self):
        if not (self.price > 0) or not math.isfinite(self.price):
            raise DomainError(f"price must be positive and finite, got {self.price}")


@dataclass
class PriceSeries:
    """Dated daily closes for one asset, strictly ascending, no duplicates."""

    asset: Asset
    points: list[PricePoint]
    dropped_count: int = 0

    def __post_init__(self):
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.date <= prev.date:
                raise IngestError(
                    f"dates must be strictly increasing, saw {prev.date} then {cur.date}"
                )

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dates(self) -> list[dt.date]:
        return [p.date for p in self.points]

    @property
    def prices(self) -> np.ndarray:
        return np.array([p.price for p in self.points], dtype=float)


@dataclass
class AlignedMarket:
    """Gold and bitcoin prices on the bitcoin calendar.

    ``gold_tradable`` marks days with a native gold observation; elsewhere
    the gold price is the most recent native close carried forward.
    """

    dates: list[dt.date]
    gold_price: np.ndarray
    btc_price: np.ndarray
    gold_tradable: np.ndarray

    def __post_init__(self):
        self.gold_price = np.asarray(self.gold_price, dtype=float)
        self.btc_price = np.asarray(self.btc_price, dtype=float)
        self.gold_tradable = np.asarray(self.gold_tradable, dtype=bool)
        n = len(self.dates)
        if not (len(self.gold_price) == len(self.btc_price) == len(self.gold_tradable) == n):
            raise AlignmentError("aligned columns must share one length")

    def __len__(self) -> int:
        return len(self.dates)

    def index_of(self, date: dt.date) -> int:
        try:
            return self.dates.index(date)
        except ValueError:
            raise AlignmentError(f"{date} is not an aligned trading day") from None

    def price(self, asset: Asset, i: int) -> float:
        if asset is Asset.GOLD:
            return float(self.gold_price[i])
        if asset is Asset.BITCOIN:
            return float(self.btc_price[i])
        return 1.0

    def to_series(self) -> tuple[PriceSeries, PriceSeries]:
        """Recover the native (pre-alignment) gold and bitcoin series."""
        gold_points = [
            PricePoint(d, float(p))
            for d, p, ok in zip(self.dates, self.gold_price, self.gold_tradable)
            if ok
        ]
        btc_points = [PricePoint(d, float(p)) for d, p in zip(self.dates, self.btc_price)]
        return PriceSeries(Asset.GOLD, gold_points), PriceSeries(Asset.BITCOIN, btc_points)

    def write_csv(self, path: str | Path) -> None:
        """Export as date,gold_price,btc_price,gold_tradable with exact floats."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "gold_price", "btc_price", "gold_tradable"])
            for d, g, b, ok in zip(self.dates, self.gold_price, self.btc_price, self.gold_tradable):
                writer.writerow([d.isoformat(), repr(float(g)), repr(float(b)), int(ok)])

    @classmethod
    def read_csv(cls, path: str | Path) -> "AlignedMarket":
        dates, gold, btc, tradable = [], [], [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                dates.append(parse_date(row["date"]))
                gold.append(float(row["gold_price"]))
                btc.append(float(row["btc_price"]))
                tradable.append(bool(int(row["gold_tradable"])))
        return cls(dates, np.array(gold), np.array(btc), np.array(tradable))


def load_csv(
    path: str | Path,
    asset: Asset,
    date_col: str = "date",
    price_col: str = "close",
) -> PriceSeries:
    """Load one asset's daily closes from a headered CSV.

    Rows with an empty price cell are dropped and counted in
    ``PriceSeries.dropped_count``; any other malformation raises.

    Raises
    ------
    IngestError
        Missing file or columns, unparsable date, non-positive price, or
        zero usable rows.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"price file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    for col in (date_col, price_col):
        if col not in frame.columns:
            raise IngestError(f"{path} has no column {col!r} (found {list(frame.columns)})")

    points = []
    dropped = 0
    for rownum, (raw_date, raw_price) in enumerate(
        zip(frame[date_col], frame[price_col]), start=2
    ):
        if str(raw_price).strip() == "":
            dropped += 1
            continue
        try:
            date = parse_date(raw_date)
        except IngestError as exc:
            raise IngestError(f"{path} row {rownum}: {exc}") from None
        try:
            price = float(str(raw_price).replace(",", ""))
        except ValueError:
            raise IngestError(f"{path} row {rownum}: unparsable price {raw_price!r}") from None
        if not price > 0:
            raise IngestError(f"{path} row {rownum}: non-positive price {price}")
        points.append(PricePoint(date, price))

    if not points:
        raise IngestError(f"{path}: no usable rows ({dropped} dropped)")
    points.sort(key=lambda p: p.date)
    for prev, cur in zip(points, points[1:]):
        if cur.date == prev.date:
            raise IngestError(f"{path}: duplicate date {cur.date}")
    return PriceSeries(asset, points, dropped_count=dropped)


def align(gold: PriceSeries, btc: PriceSeries) -> AlignedMarket:
    """Join gold onto the bitcoin calendar from the later first observation.

    Gold's close is carried forward on days without a native gold
    observation (weekends, holidays, and any bitcoin days past gold's last
    close) and those days get ``gold_tradable=False``.  Bitcoin days before
    gold starts are excluded; fully disjoint ranges are an error.
    """
    if not gold.points or not btc.points:
        raise AlignmentError("cannot align an empty series")
    start = max(gold.points[0].date, btc.points[0].date)
    if start > min(gold.points[-1].date, btc.points[-1].date):
        raise AlignmentError(
            f"date ranges are disjoint: gold {gold.points[0].date}..{gold.points[-1].date}, "
            f"btc {btc.points[0].date}..{btc.points[-1].date}"
        )

    gold_by_date = {p.date: p.price for p in gold.points}
    dates, gold_px, btc_px, tradable = [], [], [], []
    last_gold = None
    gold_iter = iter(gold.points)
    pending = next(gold_iter, None)
    for point in btc.points:
        if point.date < start:
            continue
        # Advance gold up to this date so carry-forward sees the latest close.
        while pending is not None and pending.date <= point.date:
            last_gold = pending.price
            pending = next(gold_iter, None)
        native = point.date in gold_by_date
        if last_gold is None:
            # Overlap starts at the later first date, so gold has traded by now.
            raise AlignmentError(f"no gold price on or before {point.date}")
        dates.append(point.date)
        gold_px.append(gold_by_date[point.date] if native else last_gold)
        btc_px.append(point.price)
        tradable.append(native)

    if not dates:
        raise AlignmentError("no bitcoin trading days inside the overlapping range")
    return AlignedMarket(dates, np.array(gold_px), np.array(btc_px), np.array(tradable))


def log_return(current: float, next_forecast: float) -> float:
    """ln(next/current), the one-day continuously compounded return."""
    if not (current > 0 and next_forecast > 0):
        raise DomainError(f"prices must be positive, got {current} and {next_forecast}")
    return math.log(next_forecast / current)


def daily_log_returns(prices: np.ndarray) -> np.ndarray:
    """Log returns between consecutive entries of a positive price array."""
    prices = np.asarray(prices, dtype=float)
    if np.any(prices <= 0):
        raise DomainError("prices must be positive")
    return np.diff(np.log(prices))
