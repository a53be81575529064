import datetime as dt
from pathlib import Path

import numpy as np
import pytest
from scipy.signal import lfilter

from lazyfolio.market_data import AlignedMarket

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

# Recovery-target model: differenced series w follows
# w_t = c + a1 w_{t-1} + a2 w_{t-2} + e_t + b1 e_{t-1} + b2 e_{t-2}.
TRUE_C = 1.238
TRUE_AR = (0.684, -0.81)
TRUE_MA = (-0.67, 1.0)


def simulate_arima212(n, seed, sigma=1.0, zero_first=5):
    """Conditional simulation of the recovery-target model.

    The MA polynomial sits on the invertibility boundary, so presample
    transients never decay; zeroing the leading shocks aligns the process
    with the estimator's presample-zero conditioning and makes the true
    parameters reproduce the innovations exactly.

    Returns (levels[0..n-1], next_level) so one-step forecasts can be
    scored against a held-out observation.
    """
    rng = np.random.default_rng(seed)
    e = rng.normal(0.0, sigma, n + 1)
    e[:zero_first] = 0.0
    ar_poly = [1.0, -TRUE_AR[0], -TRUE_AR[1]]
    w = lfilter([1.0, TRUE_MA[0], TRUE_MA[1]], ar_poly, e)
    w = w + lfilter([1.0], ar_poly, np.full(n + 1, TRUE_C))
    levels = 100.0 + np.cumsum(w)
    return levels[:-1], levels[-1]


def make_market(
    n_days: int,
    gold_price=1300.0,
    btc_price=10000.0,
    start=dt.date(2020, 1, 6),
    weekend_freeze=True,
):
    """Synthetic aligned market; prices may be scalars or per-day arrays.

    With ``weekend_freeze`` the gold price is carried (flagged non-tradable)
    on Saturdays and Sundays, mimicking the real calendar alignment.
    """
    dates = [start + dt.timedelta(days=k) for k in range(n_days)]
    gold = np.broadcast_to(np.asarray(gold_price, dtype=float), (n_days,)).copy()
    btc = np.broadcast_to(np.asarray(btc_price, dtype=float), (n_days,)).copy()
    tradable = np.ones(n_days, dtype=bool)
    if weekend_freeze:
        for i, d in enumerate(dates):
            if d.weekday() >= 5:
                tradable[i] = False
                gold[i] = gold[i - 1] if i > 0 else gold[i]
    return AlignedMarket(dates, gold, btc, tradable)


@pytest.fixture(scope="session")
def bundled_market():
    from lazyfolio.market_data import Asset, align, load_csv

    gold = load_csv(DATA_DIR / "gold.csv", Asset.GOLD)
    btc = load_csv(DATA_DIR / "btc.csv", Asset.BITCOIN)
    return align(gold, btc)
