#!/usr/bin/env python3
"""Generate the bundled 5-year synthetic gold/bitcoin price dataset.

Each asset follows anchor prices shaped like the 2016-2021 market (bitcoin:
bull run, crash, second larger bull run; gold: slow rise with a 2018 dip
and a 2020 peak), filled in between with log-space Brownian bridges at a
fixed seed.  Gold trades weekdays only, minus a small holiday list, so the
engine's carry-forward path gets exercised.  Regenerating reproduces
data/gold.csv and data/btc.csv byte for byte.
"""
from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

START = dt.date(2016, 9, 11)
END = dt.date(2021, 9, 10)
SEED = 20160911

BTC_ANCHORS = [
    (START, 610.0),
    (dt.date(2017, 12, 16), 19000.0),
    (dt.date(2018, 12, 15), 3200.0),
    (dt.date(2019, 6, 30), 11000.0),
    (dt.date(2020, 3, 15), 5000.0),
    (dt.date(2021, 4, 15), 63000.0),
    (END, 46500.0),
]
BTC_VOL = 0.040

GOLD_ANCHORS = [
    (START, 1324.0),
    (dt.date(2018, 8, 15), 1185.0),
    (dt.date(2020, 8, 6), 2050.0),
    (END, 1790.0),
]
GOLD_VOL = 0.0075

GOLD_HOLIDAYS = {(1, 1), (7, 4), (12, 25), (12, 26), (5, 1)}


def gold_trades(day: dt.date) -> bool:
    return day.weekday() < 5 and (day.month, day.day) not in GOLD_HOLIDAYS


def bridged_log_path(dates, anchors, vol, rng):
    """Log prices hitting each anchor exactly, Brownian bridge in between.

    Anchor dates snap to the last trading day on or before them; the first
    and last anchors pin the ends of the calendar.
    """
    import bisect

    logs = np.empty(len(dates))
    snapped = [
        (max(bisect.bisect_right(dates, d) - 1, 0), np.log(p)) for d, p in anchors
    ]
    snapped[0] = (0, snapped[0][1])
    snapped[-1] = (len(dates) - 1, snapped[-1][1])
    anchor_idx = []
    for i, lp in snapped:
        if anchor_idx and i <= anchor_idx[-1][0]:
            raise ValueError("anchor dates must be strictly increasing trading days")
        anchor_idx.append((i, lp))
    for (i0, a), (i1, b) in zip(anchor_idx, anchor_idx[1:]):
        m = i1 - i0
        walk = np.concatenate([[0.0], np.cumsum(rng.normal(0.0, vol, m))])
        frac = np.arange(m + 1) / m
        logs[i0 : i1 + 1] = a + (b - a) * frac + (walk - frac * walk[-1])
    return logs


def main():
    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    rng = np.random.default_rng(SEED)

    all_dates = [START + dt.timedelta(days=k) for k in range((END - START).days + 1)]
    gold_dates = [d for d in all_dates if gold_trades(d)]

    btc_logs = bridged_log_path(all_dates, BTC_ANCHORS, BTC_VOL, rng)
    gold_logs = bridged_log_path(gold_dates, GOLD_ANCHORS, GOLD_VOL, rng)

    for name, dates, logs in (
        ("btc.csv", all_dates, btc_logs),
        ("gold.csv", gold_dates, gold_logs),
    ):
        with open(out_dir / name, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", "close"])
            for day, lp in zip(dates, logs):
                writer.writerow([day.isoformat(), f"{np.exp(lp):.2f}"])
        print(f"{name}: {len(dates)} rows, final {np.exp(logs[-1]):.2f}")


if __name__ == "__main__":
    main()
