"""Command-line interface: backtests, forecasts, frontier clouds, trend
signals, and paired comparisons, with reproducible run manifests.

Every run writes a manifest capturing the config, input digests, and seed;
``backtest --from-manifest`` replays it and reproduces the ledger byte for
byte.  Outputs are plain CSV/JSON for external plotting.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as dt
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .backtest import (
    BacktestConfig,
    BacktestReport,
    Forecaster,
    Strategy,
    compare,
    cumulative_attribution,
    delta_sweep,
    run,
)
from .errors import ConfigError, ContractError, LazyfolioError
from .market_data import Asset, align, load_csv, parse_date
from .optimizer import FrontierCloud, HoldingsState, optimize_day
from .arima import adf_test, fit, forecast_one_step, recommend_d, select_order
from .trend import detect_crossovers, detect_inflections, exponential_ma, moving_average

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_DATA = 4

ENV_SEED = "LAZYFOLIO_SEED"


# ---------------------------------------------------------------------------
# Config and manifest plumbing


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _config_from_mapping(values: dict) -> BacktestConfig:
    known = {f.name for f in dataclasses.fields(BacktestConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return BacktestConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config_file(path: str) -> tuple[dict, dict]:
    """Read a TOML run file: [backtest] config values plus [data] inputs."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    backtest_values = raw.get("backtest", {})
    data_values = raw.get("data", {})
    extra = set(raw) - {"backtest", "data"}
    if extra:
        raise ConfigError(f"unknown config sections: {sorted(extra)}")
    return backtest_values, data_values


def resolve_seed(flag_seed, config_values: dict) -> int:
    if flag_seed is not None:
        return int(flag_seed)
    if "seed" in config_values:
        return int(config_values["seed"])
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{ENV_SEED} must be an integer, got {env!r}") from None
    return 0


def build_manifest(command: str, config: BacktestConfig, inputs: dict, columns: dict, extras: dict) -> dict:
    cfg = dataclasses.asdict(config)
    cfg["strategy"] = config.strategy.value
    cfg["delta_mode"] = config.delta_mode.value
    return {
        "engine_version": __version__,
        "created_utc": dt.datetime.now(dt.timezone.utc).isoformat(),
        "command": command,
        "seed": config.seed,
        "inputs": {
            name: {"path": str(path), "sha256": _sha256(Path(path))}
            for name, path in inputs.items()
        },
        "data_columns": columns,
        "config": cfg,
        **extras,
    }


def load_manifest(path: str) -> dict:
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed manifest {path}: {exc}") from None
    for name, entry in manifest.get("inputs", {}).items():
        actual = _sha256(Path(entry["path"]))
        if actual != entry["sha256"]:
            raise ConfigError(
                f"input {name} at {entry['path']} has digest {actual[:12]}..., "
                f"manifest expects {entry['sha256'][:12]}...; refusing to replay"
            )
    return manifest


# ---------------------------------------------------------------------------
# Emission


def _write_csv(path: Path, header: list, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_ledger_csv(report: BacktestReport, path: Path) -> None:
    """Ledger export, leading columns in the date/C/G/B/total order."""
    rows = [
        [
            rec.date.isoformat(),
            _fmt(rec.cash),
            _fmt(rec.gold_units),
            _fmt(rec.btc_units),
            _fmt(rec.total_wealth),
            _fmt(rec.w_cash),
            _fmt(rec.w_gold),
            _fmt(rec.w_btc),
            _fmt(rec.cost_paid),
            _fmt(rec.delta1),
            int(rec.gold_tradable),
            _fmt(rec.forecast_gold),
            _fmt(rec.forecast_btc),
        ]
        for rec in report.ledger
    ]
    _write_csv(
        path,
        [
            "date", "cash", "gold", "btc", "total_wealth",
            "w_cash", "w_gold", "w_btc", "cost_paid", "delta1",
            "gold_tradable", "forecast_gold", "forecast_btc",
        ],
        rows,
    )


def emit_plot_data(payload, kind: str, out_dir: Path, market=None) -> Path:
    """Write one figure-ready CSV series; returns the file written.

    Kinds: cumulative_returns (per-asset cumulative return), weights
    (daily allocation), delta_sweep (final wealth per delta1), comparison
    (paired wealth curves), frontier (one day's sample cloud).
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    if kind == "cumulative_returns":
        report, mkt = payload, market
        start = report.ledger[0].date
        i0 = mkt.index_of(start)
        rows = []
        for rec in report.ledger:
            i = mkt.index_of(rec.date)
            rows.append(
                [
                    rec.date.isoformat(),
                    _fmt(report.config.cash_rate * (i - i0)),
                    _fmt(mkt.gold_price[i] / mkt.gold_price[i0] - 1.0),
                    _fmt(mkt.btc_price[i] / mkt.btc_price[i0] - 1.0),
                ]
            )
        path = out_dir / "cumulative_returns.csv"
        _write_csv(path, ["date", "cash", "gold", "btc"], rows)
        return path
    if kind == "weights":
        rows = [
            [rec.date.isoformat(), _fmt(rec.w_cash), _fmt(rec.w_gold), _fmt(rec.w_btc)]
            for rec in payload.ledger
        ]
        path = out_dir / "weights.csv"
        _write_csv(path, ["date", "w_cash", "w_gold", "w_btc"], rows)
        return path
    if kind == "delta_sweep":
        rows = [[_fmt(d1), _fmt(wealth)] for d1, wealth in payload]
        path = out_dir / "delta_sweep.csv"
        _write_csv(path, ["delta1", "final_wealth"], rows)
        return path
    if kind == "comparison":
        lazy, control, summary = payload
        rows = [
            [d.isoformat(), _fmt(l.total_wealth), _fmt(c.total_wealth), _fmt(r)]
            for d, l, c, r in zip(
                summary.dates, lazy.ledger, control.ledger, summary.wealth_ratio
            )
        ]
        path = out_dir / "comparison.csv"
        _write_csv(path, ["date", "lazy_wealth", "control_wealth", "ratio"], rows)
        return path
    if kind == "frontier":
        cloud: FrontierCloud = payload
        on_front = cloud.on_frontier()
        rows = [
            [
                _fmt(cloud.risk[i]),
                _fmt(cloud.post_cost_return[i]),
                _fmt(cloud.post_cost_wealth[i]),
                _fmt(cloud.weights[i, 0]),
                _fmt(cloud.weights[i, 1]),
                _fmt(cloud.weights[i, 2]),
                int(on_front[i]),
                int(i == cloud.tangency_index),
            ]
            for i in range(cloud.n)
        ]
        path = out_dir / "frontier.csv"
        _write_csv(
            path,
            ["sigma", "return", "wealth", "w_cash", "w_gold", "w_btc", "on_frontier", "is_tangency"],
            rows,
        )
        return path
    raise ContractError(f"unknown plot kind {kind!r}")


def write_forecast_log(report: BacktestReport, market, path: Path) -> None:
    """CSV of every forecast against the realized next-day close."""
    rows = []
    for rec in report.ledger:
        day = market.index_of(rec.date)
        if day + 1 >= len(market):
            continue
        target = market.dates[day + 1].isoformat()
        for asset, forecast, actual in (
            ("gold", rec.forecast_gold, float(market.gold_price[day + 1])),
            ("bitcoin", rec.forecast_btc, float(market.btc_price[day + 1])),
        ):
            if not math.isnan(forecast):
                rows.append([target, asset, _fmt(forecast), _fmt(actual), _fmt(forecast - actual)])
    _write_csv(path, ["date", "asset", "forecast", "actual", "error"], rows)


def write_indicator_log(report: BacktestReport, path: Path) -> bool:
    """CSV of the daily blend indicators; skipped unless daily mode ran."""
    rows = [
        [rec.date.isoformat(), _fmt(rec.rsi), _fmt(rec.beta), _fmt(rec.gamma),
         _fmt(rec.delta1), _fmt(1.0 - rec.delta1)]
        for rec in report.ledger
        if not math.isnan(rec.rsi)
    ]
    if not rows:
        return False
    _write_csv(path, ["date", "rsi", "beta", "gamma", "delta1", "delta2"], rows)
    return True


def write_model_json(model, path: Path) -> None:
    """Fitted-model export: order, coefficients, variance, diagnostics."""
    diag = model.diagnose()
    payload = {
        "order": {"p": model.order.p, "d": model.order.d, "q": model.order.q},
        "intercept": model.intercept,
        "ar_coeffs": model.ar_coeffs.tolist(),
        "ma_coeffs": model.ma_coeffs.tolist(),
        "residual_variance": model.residual_variance,
        "training_window": model.training_window,
        "aic": model.aic,
        "converged": model.converged,
        "ar_stationary": model.ar_stationary,
        "ma_invertible": model.ma_invertible,
        "diagnostics": {
            "r_squared": diag.r_squared,
            "ljung_box": {str(lag): list(qp) for lag, qp in diag.ljung_box.items()},
        },
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_json(report: BacktestReport, attribution: dict, path: Path) -> None:
    cfg = dataclasses.asdict(report.config)
    cfg["strategy"] = report.config.strategy.value
    cfg["delta_mode"] = report.config.delta_mode.value
    payload = {
        "final_wealth": report.final_wealth,
        "annualized_return": report.annualized_return,
        "profitability_rate": report.profitability_rate,
        "max_drawdown": report.max_drawdown,
        "start": report.ledger[0].date.isoformat(),
        "end": report.ledger[-1].date.isoformat(),
        "days": len(report.ledger),
        "attribution": {asset.value: value for asset, value in attribution.items()},
        "config": cfg,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Commands


def _load_market(gold_path, btc_path, date_col, price_col):
    gold = load_csv(gold_path, Asset.GOLD, date_col=date_col, price_col=price_col)
    btc = load_csv(btc_path, Asset.BITCOIN, date_col=date_col, price_col=price_col)
    return align(gold, btc)


def _gather_config(args) -> tuple[BacktestConfig, dict, dict]:
    """Merge manifest/config-file/flag layers into a validated config."""
    if getattr(args, "from_manifest", None):
        manifest = load_manifest(args.from_manifest)
        values = dict(manifest["config"])
        inputs = {k: v["path"] for k, v in manifest["inputs"].items()}
        columns = manifest.get("data_columns", {"date": "date", "price": "close"})
        return _config_from_mapping(values), inputs, columns

    file_values, data_values = ({}, {})
    if getattr(args, "config", None):
        file_values, data_values = load_config_file(args.config)
    values = dict(file_values)
    values["seed"] = resolve_seed(args.seed, file_values)
    for flag, key in (
        ("alpha_gold", "alpha_gold"),
        ("alpha_btc", "alpha_btc"),
        ("n", "monte_carlo_n"),
        ("delta1", "delta1"),
        ("strategy", "strategy"),
        ("warmup", "warmup"),
    ):
        flag_value = getattr(args, flag, None)
        if flag_value is not None:
            values[key] = flag_value

    inputs = {}
    gold = getattr(args, "gold", None) or data_values.get("gold")
    btc = getattr(args, "btc", None) or data_values.get("btc")
    if not gold or not btc:
        raise ConfigError("gold and btc price files are required (flags or [data] section)")
    inputs["gold"], inputs["btc"] = gold, btc
    columns = {
        "date": getattr(args, "date_col", None) or data_values.get("date_column", "date"),
        "price": getattr(args, "price_col", None) or data_values.get("price_column", "close"),
    }
    return _config_from_mapping(values), inputs, columns


def cmd_backtest(args) -> int:
    config, inputs, columns = _gather_config(args)
    market = _load_market(inputs["gold"], inputs["btc"], columns["date"], columns["price"])
    out = Path(args.out)
    forecaster = Forecaster(market, config)
    report = run(config, market, forecaster=forecaster)
    attribution = cumulative_attribution(report, market)

    write_ledger_csv(report, out / "ledger.csv")
    write_report_json(report, attribution, out / "report.json")
    write_forecast_log(report, market, out / "forecasts.csv")
    write_indicator_log(report, out / "indicators.csv")
    emit_plot_data(report, "cumulative_returns", out / "plots", market=market)
    emit_plot_data(report, "weights", out / "plots")
    sweep_enabled = bool(getattr(args, "delta_sweep", False))
    if sweep_enabled:
        sweep = delta_sweep(config, market, forecaster=forecaster)
        emit_plot_data(sweep, "delta_sweep", out / "plots")

    manifest = build_manifest(
        "backtest", config, inputs, columns, {"delta_sweep": sweep_enabled}
    )
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"final wealth {report.final_wealth:.2f}  "
        f"annualized {report.annualized_return:.2%}  "
        f"max drawdown {report.max_drawdown:.2%}"
    )
    print(f"outputs in {out}/")
    return EXIT_OK


def cmd_forecast(args) -> int:
    series = load_csv(
        args.series, Asset.GOLD, date_col=args.date_col or "date", price_col=args.price_col or "close"
    )
    prices = series.prices
    dates = series.dates
    if args.date:
        cutoff = parse_date(args.date)
        keep = [i for i, d in enumerate(dates) if d <= cutoff]
        if not keep:
            raise ConfigError(f"no observations on or before {cutoff}")
        prices = prices[: keep[-1] + 1]
        dates = dates[: keep[-1] + 1]
    window = prices[-args.window :]
    if len(window) < 30:
        raise ConfigError(f"window of {len(window)} too short to model")
    d = recommend_d(adf_test(window, max_d=2))
    order = select_order(window, d=d, max_p=args.max_p, max_q=args.max_q)
    try:
        model = fit(window, order)
        note = ""
    except LazyfolioError as exc:
        if getattr(exc, "best_params", None) is None:
            raise
        model = exc.best_params
        note = "  (iteration cap reached; best parameters used)"
    forecast, band = forecast_one_step(model)
    print(f"window: {len(window)} observations ending {dates[-1].isoformat()}")
    print(f"selected order: ({order.p},{order.d},{order.q})  aic {model.aic:.3f}{note}")
    print(f"forecast: {forecast:.6g}  band (+/- 1 sigma): {band:.6g}")
    if args.out_model:
        write_model_json(model, Path(args.out_model))
        print(f"wrote {args.out_model}")
    return EXIT_OK


def cmd_frontier(args) -> int:
    config, inputs, columns = _gather_config(args)
    market = _load_market(inputs["gold"], inputs["btc"], columns["date"], columns["price"])
    day = market.index_of(parse_date(args.date))
    forecaster = Forecaster(market, config)
    from .optimizer import estimate_covariance, estimate_returns

    forecasts = {Asset.BITCOIN: forecaster.forecast(Asset.BITCOIN, day)}
    if market.gold_tradable[day]:
        forecasts[Asset.GOLD] = forecaster.forecast(Asset.GOLD, day)
    returns = estimate_returns(market, forecasts, day, config.cash_rate)
    cov = estimate_covariance(
        market, day, config.cov_window, config.cov_min_window, config.cash_variance
    )
    prev = HoldingsState(cash=float(args.wealth), gold_units=0.0, btc_units=0.0)
    best, cloud = optimize_day(
        prev,
        (market.gold_price[day], market.btc_price[day]),
        returns,
        cov,
        (config.alpha_gold, config.alpha_btc),
        bool(market.gold_tradable[day]),
        config.monte_carlo_n,
        seed=[config.seed, day],
        risk_free=config.cash_rate,
    )
    path = emit_plot_data(cloud, "frontier", Path(args.out))
    w = best.weights
    print(f"samples: {cloud.n}  frontier size: {len(cloud.frontier_indices)}")
    print(
        f"tangency weights: cash {w.w_cash:.4f}  gold {w.w_gold:.4f}  btc {w.w_btc:.4f}"
        f"  sigma {best.risk:.6g}"
    )
    print(f"wrote {path}")
    return EXIT_OK


def cmd_trend(args) -> int:
    series = load_csv(
        args.series, Asset.GOLD, date_col=args.date_col or "date", price_col=args.price_col or "close"
    )
    prices = series.prices
    dates = series.dates
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    windows = [int(w) for w in args.windows.split(",")]
    lines = {}
    for w in windows:
        for kind, builder in (("ma", moving_average), ("ema", exponential_ma)):
            line = builder(prices, w)
            lines[(kind, w)] = line
            rows = [
                [d.isoformat(), _fmt(v)]
                for d, v in zip(dates, line.values)
                if not np.isnan(v)
            ]
            _write_csv(out / f"trend_{kind}_{w}.csv", ["date", "value"], rows)

    signal_rows = []
    long_ema = lines[("ema", max(windows))]
    for pt in detect_inflections(long_ema):
        signal_rows.append(
            [dates[pt.index].isoformat(), pt.shape.value, _fmt(pt.slope_k), _fmt(pt.slope_rate_k_prime)]
        )
    if len(windows) >= 2:
        short_line = lines[("ema", min(windows))]
        for ev in detect_crossovers(short_line, long_ema):
            signal_rows.append([dates[ev.index].isoformat(), ev.direction.value, "", ""])
    signal_rows.sort(key=lambda r: r[0])
    _write_csv(out / "signals.csv", ["date", "kind", "k", "k_prime"], signal_rows)
    print(f"wrote {len(windows) * 2} trend lines and {len(signal_rows)} signals to {out}/")
    return EXIT_OK


def cmd_compare(args) -> int:
    config, inputs, columns = _gather_config(args)
    market = _load_market(inputs["gold"], inputs["btc"], columns["date"], columns["price"])
    out = Path(args.out)
    forecaster = Forecaster(market, config)
    lazy_cfg = dataclasses.replace(config, strategy=Strategy.LAZY)
    control_cfg = dataclasses.replace(config, strategy=Strategy.CONTROL_IDEAL_ONLY)
    lazy = run(lazy_cfg, market, forecaster=forecaster)
    control = run(control_cfg, market, forecaster=forecaster)
    summary = compare(lazy, control)
    emit_plot_data((lazy, control, summary), "comparison", out / "plots")
    payload = {
        "lazy_final_wealth": lazy.final_wealth,
        "control_final_wealth": control.final_wealth,
        "uplift_pct": summary.uplift_pct,
    }
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "comparison.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"lazy {lazy.final_wealth:.2f} vs control {control.final_wealth:.2f}  "
        f"uplift {summary.uplift_pct:.2f}%"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lazyfolio",
        description="Deterministic cash/gold/bitcoin forecasting and backtesting engine",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data_flags(p, require_market=True):
        if require_market:
            p.add_argument("--gold", help="gold price CSV")
            p.add_argument("--btc", help="bitcoin price CSV")
        p.add_argument("--date-col", dest="date_col", default=None, help="date column name")
        p.add_argument("--price-col", dest="price_col", default=None, help="price column name")

    def add_run_flags(p):
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (falls back to ${ENV_SEED})")
        p.add_argument("--alpha-gold", dest="alpha_gold", type=float, default=None)
        p.add_argument("--alpha-btc", dest="alpha_btc", type=float, default=None)
        p.add_argument("--n", type=int, default=None, help="Monte Carlo samples per day")
        p.add_argument("--warmup", type=int, default=None)

    p_back = sub.add_parser("backtest", help="full daily pipeline over a market")
    add_data_flags(p_back)
    add_run_flags(p_back)
    p_back.add_argument("--delta1", type=float, default=None)
    p_back.add_argument("--strategy", choices=[s.value for s in Strategy], default=None)
    p_back.add_argument("--delta-sweep", action="store_true", help="also sweep delta1 over a 0..1 grid")
    p_back.add_argument("--from-manifest", help="replay a previous run's manifest")
    p_back.add_argument("--out", default="out", help="output directory")
    p_back.set_defaults(handler=cmd_backtest)

    p_fc = sub.add_parser("forecast", help="one-step price forecast on a series")
    p_fc.add_argument("--series", required=True, help="price CSV")
    add_data_flags(p_fc, require_market=False)
    p_fc.add_argument("--window", type=int, default=90)
    p_fc.add_argument("--date", help="forecast from the window ending at this date")
    p_fc.add_argument("--max-p", dest="max_p", type=int, default=4)
    p_fc.add_argument("--max-q", dest="max_q", type=int, default=4)
    p_fc.add_argument("--out-model", dest="out_model", help="write the fitted model as JSON")
    p_fc.set_defaults(handler=cmd_forecast)

    p_fr = sub.add_parser("frontier", help="one day's Monte Carlo feasible set")
    add_data_flags(p_fr)
    add_run_flags(p_fr)
    p_fr.add_argument("--date", required=True, help="aligned trading day")
    p_fr.add_argument("--wealth", type=float, default=1000.0, help="starting cash")
    p_fr.add_argument("--out", default="out", help="output directory")
    p_fr.set_defaults(handler=cmd_frontier)

    p_tr = sub.add_parser("trend", help="MA/EMA lines plus crossover and inflection signals")
    p_tr.add_argument("--series", required=True, help="price CSV")
    add_data_flags(p_tr, require_market=False)
    p_tr.add_argument("--windows", default="5,20,60", help="comma-separated day windows")
    p_tr.add_argument("--out", default="out", help="output directory")
    p_tr.set_defaults(handler=cmd_trend)

    p_cmp = sub.add_parser("compare", help="paired lazy vs control-group backtest")
    add_data_flags(p_cmp)
    add_run_flags(p_cmp)
    p_cmp.add_argument("--delta1", type=float, default=None)
    p_cmp.add_argument("--out", default="out", help="output directory")
    p_cmp.set_defaults(handler=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LazyfolioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
