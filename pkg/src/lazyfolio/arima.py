"""Short-term price forecasting: ADF stationarity testing, differencing,
ARIMA estimation, AIC order selection, residual diagnostics, and one-step
level forecasts.

Estimation minimizes the conditional sum of squares (presample shocks set
to zero) with a damped Gauss-Newton iteration started from Hannan-Rissanen
two-stage regressions.  Everything here is deterministic: identical inputs
produce bit-identical models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.stats import chi2, norm

from .errors import (
    ConditioningError,
    ContractError,
    ConvergenceError,
    InsufficientDataError,
    SelectionError,
)

# Training windows above this are rejected unless the cap is lifted; longer
# histories hurt short-term accuracy on fast-moving assets.
DEFAULT_TRAINING_CAP = 100

MAX_ITERATIONS = 200
STEP_TOLERANCE = 1e-8


# ---------------------------------------------------------------------------
# Differencing


def difference(series: np.ndarray, d: int) -> np.ndarray:
    """Apply ``d`` first-difference passes; output shrinks by ``d``."""
    series = np.asarray(series, dtype=float)
    if d < 0:
        raise ContractError(f"difference order must be >= 0, got {d}")
    if len(series) <= d:
        raise InsufficientDataError(f"cannot difference length-{len(series)} series {d} times")
    out = series
    for _ in range(d):
        out = np.diff(out)
    return out


def integrate(diffs: np.ndarray, d: int, anchors: np.ndarray) -> np.ndarray:
    """Invert :func:`difference` given the last ``d`` pre-difference values.

    ``anchors[k]`` is the final value of the series differenced ``k`` times,
    ordered from level (k=0) upward; ``integrate(difference(x, d), d, ...)``
    continues ``x`` exactly.
    """
    diffs = np.asarray(diffs, dtype=float)
    anchors = np.asarray(anchors, dtype=float)
    if len(anchors) != d:
        raise ContractError(f"need exactly {d} anchors, got {len(anchors)}")
    out = diffs
    for k in range(d - 1, -1, -1):
        out = anchors[k] + np.cumsum(out)
    return out


def difference_anchors(series: np.ndarray, d: int) -> np.ndarray:
    """Last value of each of the first ``d`` difference levels of ``series``."""
    series = np.asarray(series, dtype=float)
    anchors = []
    cur = series
    for _ in range(d):
        anchors.append(cur[-1])
        cur = np.diff(cur)
    return np.array(anchors)


# ---------------------------------------------------------------------------
# Model containers


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ContractError(f"p and q must be >= 0, got ({self.p}, {self.q})")
        if self.d not in (0, 1, 2):
            raise ContractError(f"d must be 0, 1, or 2, got {self.d}")


@dataclass
class ArimaModel:
    """A fitted model plus the training-tail state needed to forecast."""

    order: ArimaOrder
    intercept: float
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    residual_variance: float
    training_window: int
    residuals: np.ndarray
    aic: float
    r_squared: float
    converged: bool
    iterations: int
    ar_stationary: bool
    ma_invertible: bool
    tail_levels: np.ndarray = field(repr=False, default=None)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([[self.intercept], self.ar_coeffs, self.ma_coeffs])

    def diagnose(self, lags=(6, 12, 18, 24, 30)) -> "DiagnosticsReport":
        report = ljung_box(self.residuals, lags, model_df=self.order.p + self.order.q)
        report.r_squared = self.r_squared
        return report


@dataclass
class DiagnosticsReport:
    """Ljung-Box Q/p per lag plus level-space goodness of fit."""

    ljung_box: dict
    r_squared: float = float("nan")


# ---------------------------------------------------------------------------
# Conditional-sum-of-squares machinery


def _css_residuals(w: np.ndarray, p: int, q: int, theta: np.ndarray, start: int | None = None) -> np.ndarray:
    """Residuals for t = start..n-1 conditioning on the first ``start`` observations.

    ``start`` defaults to p (the minimum the AR lags require); a larger value
    gives grid cells of different p a common estimation sample.  Presample
    shocks are zero, so the MA recursion is a pure IIR filter.
    """
    s = p if start is None else max(start, p)
    c = theta[0]
    ar = theta[1 : 1 + p]
    ma = theta[1 + p : 1 + p + q]
    rhs = w[s:] - c
    for i in range(1, p + 1):
        rhs = rhs - ar[i - 1] * w[s - i : len(w) - i]
    if q == 0:
        return rhs
    return lfilter([1.0], np.concatenate([[1.0], ma]), rhs)


def _sum_sq(w, p, q, theta, start=None) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        eps = _css_residuals(w, p, q, theta, start)
        ss = float(eps @ eps)
    return ss if math.isfinite(ss) else math.inf


def _numeric_jacobian(w, p, q, theta, start=None) -> np.ndarray:
    """Central-difference Jacobian of the residual vector."""
    n_resid = len(w) - (p if start is None else max(start, p))
    jac = np.empty((n_resid, len(theta)))
    for k in range(len(theta)):
        h = 1e-6 * max(1.0, abs(theta[k]))
        up = theta.copy()
        dn = theta.copy()
        up[k] += h
        dn[k] -= h
        jac[:, k] = (
            _css_residuals(w, p, q, up, start) - _css_residuals(w, p, q, dn, start)
        ) / (2 * h)
    return jac


def _ols(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    return beta


def _lagged_matrix(x: np.ndarray, lags: int, start: int) -> np.ndarray:
    """Columns x[start-1], x[start-2], ... down to lag ``lags``, rows from start."""
    n = len(x)
    return np.column_stack([x[start - i : n - i] for i in range(1, lags + 1)])


def _hannan_rissanen_start(w: np.ndarray, p: int, q: int) -> np.ndarray:
    """Two-stage regression starting values for (c, ar, ma)."""
    n = len(w)
    if p == 0 and q == 0:
        return np.array([w.mean()])
    if q == 0:
        X = np.column_stack([np.ones(n - p), _lagged_matrix(w, p, p)])
        beta = _ols(X, w[p:])
        return beta

    m = min(max(2 * (p + q), int(round(math.log(n) ** 2))), max(n // 4, p + q + 1))
    m = max(m, q)
    X_long = np.column_stack([np.ones(n - m), _lagged_matrix(w, m, m)])
    resid_proxy = np.zeros(n)
    resid_proxy[m:] = w[m:] - X_long @ _ols(X_long, w[m:])

    start = max(p, m)  # proxies before m are zero, keep them out of the regression
    cols = [np.ones(n - start)]
    if p:
        cols.append(_lagged_matrix(w, p, start))
    cols.append(_lagged_matrix(resid_proxy, q, start))
    beta = _ols(np.column_stack(cols), w[start:])
    return beta


def _polynomial_roots_outside(coeffs: np.ndarray, sign: float) -> bool:
    """True when 1 + sign*(c1 z + c2 z^2 + ...) has all roots outside the unit circle."""
    if len(coeffs) == 0 or not np.any(coeffs):
        return True
    poly = np.concatenate([[1.0], sign * np.asarray(coeffs)])
    roots = np.roots(poly[::-1])
    return bool(np.all(np.abs(roots) > 1.0 + 1e-8))


def fit(
    series: np.ndarray,
    order: ArimaOrder,
    window_cap: int | None = DEFAULT_TRAINING_CAP,
    raise_on_nonconvergence: bool = True,
    condition_on: int | None = None,
) -> ArimaModel:
    """Estimate an ARIMA model on a level series by conditional least squares.

    Parameters
    ----------
    series : array_like
        Level observations (prices), most recent last.
    order : ArimaOrder
        (p, d, q) to fit.
    window_cap : int or None
        Reject training windows longer than this; pass ``None`` to lift the
        cap (long windows hurt short-term forecasts of fast-moving assets).
    raise_on_nonconvergence : bool
        When False, a model that hits the iteration cap is returned with
        ``converged=False`` instead of raising.
    condition_on : int or None
        Number of leading differenced observations excluded from the sum of
        squares (defaults to p).  Order selection passes the grid's max p so
        AIC values share one estimation sample.

    Raises
    ------
    InsufficientDataError
        Fewer than ``5 * (p + q + 1)`` observations after differencing.
    ConvergenceError
        Iteration cap reached; carries the best model found so far.
    ConditioningError
        Normal equations numerically singular.
    """
    series = np.asarray(series, dtype=float)
    if window_cap is not None and len(series) > window_cap:
        raise ContractError(
            f"training window of {len(series)} exceeds the cap of {window_cap}; "
            "pass window_cap=None to override"
        )
    p, d, q = order.p, order.d, order.q
    w = difference(series, d)
    start = p if condition_on is None else max(condition_on, p)
    n_eff = len(w) - start
    if len(w) < 5 * (p + q + 1) or n_eff < p + q + 2:
        raise InsufficientDataError(
            f"need at least {5 * (p + q + 1)} differenced observations for order "
            f"({p},{d},{q}), got {len(w)}"
        )

    theta = _hannan_rissanen_start(w, p, q)
    if len(theta) != 1 + p + q or not np.all(np.isfinite(theta)):
        theta = np.zeros(1 + p + q)
        theta[0] = w.mean()

    ss = _sum_sq(w, p, q, theta, start)
    converged = False
    iterations = 0
    if p + q == 0:
        # Pure intercept: the least-squares solution is the sample mean.
        theta = np.array([w[start:].mean()])
        ss = _sum_sq(w, p, q, theta, start)
        converged = True
    else:
        stall_count = 0
        for iterations in range(1, MAX_ITERATIONS + 1):
            eps = _css_residuals(w, p, q, theta, start)
            jac = _numeric_jacobian(w, p, q, theta, start)
            jtj = jac.T @ jac
            ridge = 1e-10 * max(np.trace(jtj) / len(theta), 1.0)
            try:
                step = np.linalg.solve(jtj + ridge * np.eye(len(theta)), -jac.T @ eps)
            except np.linalg.LinAlgError:
                raise ConditioningError(
                    f"normal equations singular for order ({p},{d},{q})"
                ) from None
            if not np.all(np.isfinite(step)):
                raise ConditioningError(f"non-finite update for order ({p},{d},{q})")

            # Damping: halve the step until the sum of squares improves.
            lam = 1.0
            while lam > 1e-6:
                cand = theta + lam * step
                cand_ss = _sum_sq(w, p, q, cand, start)
                if cand_ss <= ss:
                    break
                lam *= 0.5
            else:
                converged = True  # no descent direction left: stationary point
                break
            rel_improvement = (ss - cand_ss) / max(ss, 1e-12)
            theta = theta + lam * step
            ss = cand_ss
            if np.max(np.abs(lam * step)) < STEP_TOLERANCE:
                converged = True
                break
            # Boundary MA roots open a near-flat valley where damped steps
            # shrink but never meet the step tolerance; a sustained stall of
            # the objective is convergence for every practical purpose.
            if rel_improvement < 1e-4 and np.max(np.abs(lam * step)) < 1e-3:
                stall_count += 1
                if stall_count >= 3:
                    converged = True
                    break
            else:
                stall_count = 0

    residuals = _css_residuals(w, p, q, theta, start)
    sigma2 = float(residuals @ residuals) / n_eff
    k = p + q + 2  # intercept + AR + MA + innovation variance
    if sigma2 <= 0:
        sigma2 = 1e-300
    aic = n_eff * (math.log(2 * math.pi * sigma2) + 1.0) + 2 * k

    model = ArimaModel(
        order=order,
        intercept=float(theta[0]),
        ar_coeffs=np.array(theta[1 : 1 + p]),
        ma_coeffs=np.array(theta[1 + p :]),
        residual_variance=sigma2,
        training_window=len(series),
        residuals=residuals,
        aic=aic,
        r_squared=_level_r_squared(series, order, residuals, start),
        converged=converged,
        iterations=iterations,
        ar_stationary=_polynomial_roots_outside(theta[1 : 1 + p], -1.0),
        ma_invertible=_polynomial_roots_outside(theta[1 + p :], 1.0),
        tail_levels=series[-(max(p, 1) + d + 1) :].copy(),
    )
    if not converged and raise_on_nonconvergence:
        raise ConvergenceError(
            f"Gauss-Newton hit {MAX_ITERATIONS} iterations for order ({p},{d},{q})",
            best_params=model,
        )
    return model


def _level_r_squared(series, order, residuals, start) -> float:
    """1 - SSE/SST of one-step fitted values in level space."""
    d = order.d
    w = difference(series, d)
    actual_levels = series[d + start :]
    fitted_w = w[start:] - residuals
    # Undifference each one-step fit from the previous actual levels.
    if d == 0:
        fitted_levels = fitted_w
    elif d == 1:
        fitted_levels = series[d + start - 1 : -1] + fitted_w
    else:
        base = series[d + start - 1 : -1]
        slope = np.diff(series)[d + start - 2 : -1]
        fitted_levels = base + slope + fitted_w
    sse = float(np.sum((actual_levels - fitted_levels) ** 2))
    sst = float(np.sum((actual_levels - actual_levels.mean()) ** 2))
    if sst == 0:
        return 1.0 if sse == 0 else float("-inf")
    return 1.0 - sse / sst


def forecast_one_step(model: ArimaModel, recent: np.ndarray | None = None):
    """Point forecast of the next level plus a one-sigma uncertainty band.

    ``recent`` may supply the latest level observations (defaults to the
    model's own training tail); it must contain at least ``p + d`` values.
    The MA side always uses the model's stored end-of-training shocks.

    Returns
    -------
    (forecast, band) : tuple of float
        Level-space point forecast and the residual standard deviation.
    """
    p, d, q = model.order.p, model.order.d, model.order.q
    levels = model.tail_levels if recent is None else np.asarray(recent, dtype=float)
    if len(levels) < p + d:
        raise ContractError(f"need at least {p + d} recent observations, got {len(levels)}")
    w = difference(levels, d) if len(levels) > d else np.empty(0)
    if len(w) < p:
        raise ContractError(f"need {p} differenced values to forecast, got {len(w)}")

    step = model.intercept
    for i in range(1, p + 1):
        step += model.ar_coeffs[i - 1] * w[len(w) - i]
    for j in range(1, q + 1):
        if j <= len(model.residuals):
            step += model.ma_coeffs[j - 1] * model.residuals[len(model.residuals) - j]

    if d == 0:
        forecast = step
    else:
        anchors = difference_anchors(levels, d)
        forecast = integrate(np.array([step]), d, anchors)[-1]
    return float(forecast), float(math.sqrt(model.residual_variance))


def select_order(
    series: np.ndarray,
    d: int,
    max_p: int = 4,
    max_q: int = 4,
    window_cap: int | None = DEFAULT_TRAINING_CAP,
) -> ArimaOrder:
    """Grid-search (p, q) up to the given bounds and return the AIC minimizer.

    Non-converging cells are skipped (recorded on the raised error if every
    cell fails).  Ties break toward the smaller model, deterministically.
    """
    if max_p < 0 or max_q < 0:
        raise ContractError("max_p and max_q must be >= 0")
    best = None
    failures = {}
    for p in range(max_p + 1):
        for q in range(max_q + 1):
            order = ArimaOrder(p, d, q)
            try:
                model = fit(series, order, window_cap=window_cap, condition_on=max_p)
            except (InsufficientDataError, ConvergenceError, ConditioningError) as exc:
                failures[(p, q)] = exc
                continue
            key = (model.aic, p + q, p, q)
            if best is None or key < best[0]:
                best = (key, order)
    if best is None:
        raise SelectionError(
            f"every (p,q) cell up to ({max_p},{max_q}) failed to fit", failures=failures
        )
    return best[1]


# ---------------------------------------------------------------------------
# Augmented Dickey-Fuller test

# MacKinnon response surfaces for the constant-only regression, one variable.
# Critical values: c(T) = b0 + b1/T + b2/T^2 + b3/T^3.
_ADF_CRIT = {
    "1%": (-3.43035, -6.5393, -16.786, -79.433),
    "5%": (-2.86154, -2.8903, -4.234, -40.040),
    "10%": (-2.56677, -1.5384, -2.809, 0.0),
}
# P-values: p = Phi(polynomial(tau)), small-p branch below the knot.
_ADF_TAU_STAR = -1.61
_ADF_TAU_MIN = -18.83
_ADF_TAU_MAX = 2.74
_ADF_SMALL_P = (2.1659, 1.4412, 0.038269)
_ADF_LARGE_P = (1.7339, 0.93202, -0.12745, -0.010368)


@dataclass
class AdfResult:
    """Unit-root test outcome for one difference order."""

    t_stat: float
    p_value: float
    aic: float
    thresholds: dict
    difference_order: int
    used_lag: int = 0

    @property
    def stationary(self) -> bool:
        return self.p_value < 0.05


def _mackinnon_pvalue(stat: float) -> float:
    if stat > _ADF_TAU_MAX:
        return 1.0
    if stat < _ADF_TAU_MIN:
        return 0.0
    coeffs = _ADF_SMALL_P if stat <= _ADF_TAU_STAR else _ADF_LARGE_P
    z = sum(c * stat**i for i, c in enumerate(coeffs))
    return float(norm.cdf(z))


def _mackinnon_critical(nobs: int) -> dict:
    return {
        level: float(b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3)
        for level, (b0, b1, b2, b3) in _ADF_CRIT.items()
    }


def _ols_aic(X: np.ndarray, y: np.ndarray):
    beta = _ols(X, y)
    resid = y - X @ beta
    n = len(y)
    sigma2 = float(resid @ resid) / n
    if sigma2 <= 0:
        sigma2 = 1e-300
    aic = n * (math.log(2 * math.pi * sigma2) + 1.0) + 2 * (X.shape[1] + 1)
    return beta, resid, aic


def _adf_single(x: np.ndarray) -> tuple[float, float, float, dict, int]:
    """Constant-only ADF regression with AIC-selected augmentation lags."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if np.all(x == x[0]):
        raise InsufficientDataError("series is constant; ADF undefined")
    maxlag = int(math.floor(12.0 * (n / 100.0) ** 0.25))
    maxlag = max(0, min(maxlag, n // 2 - 3))

    dx = np.diff(x)

    def design(start: int, k: int):
        # Regressand dx[t] for t = start..n-2 on [1, x[t], dx[t-1..t-k]].
        cols = [np.ones(len(dx) - start), x[start : n - 1]]
        cols += [dx[start - i : len(dx) - i] for i in range(1, k + 1)]
        return np.column_stack(cols), dx[start:]

    # Common estimation sample across candidate lags so AICs are comparable.
    base = maxlag + 1
    best = None
    for k in range(0, maxlag + 1):
        X, y = design(base, k)
        _, _, aic = _ols_aic(X, y)
        if best is None or aic < best[0]:
            best = (aic, k)
    used_lag = best[1]

    # Final regression on the longest sample the chosen lag allows.
    X, y = design(used_lag + 1, used_lag)
    beta, resid, aic = _ols_aic(X, y)
    dof = len(y) - X.shape[1]
    if dof <= 0:
        raise InsufficientDataError("too few observations for the ADF regression")
    s2 = float(resid @ resid) / dof
    xtx_inv = np.linalg.pinv(X.T @ X)
    se = math.sqrt(max(s2 * xtx_inv[1, 1], 1e-300))
    t_stat = float(beta[1] / se)
    return t_stat, _mackinnon_pvalue(t_stat), aic, _mackinnon_critical(len(y)), used_lag


def adf_test(series: np.ndarray, max_d: int = 2) -> list[AdfResult]:
    """Unit-root test of the series and each of its first ``max_d`` differences.

    The recommended integration order is the smallest ``d`` whose p-value
    drops below 0.05 (see :func:`recommend_d`).
    """
    series = np.asarray(series, dtype=float)
    if len(series) - max_d < 30:
        raise InsufficientDataError(
            f"need at least {30 + max_d} observations to test up to d={max_d}"
        )
    results = []
    for d in range(max_d + 1):
        x = difference(series, d)
        t_stat, p_value, aic, thresholds, used_lag = _adf_single(x)
        results.append(
            AdfResult(
                t_stat=t_stat,
                p_value=p_value,
                aic=aic,
                thresholds=thresholds,
                difference_order=d,
                used_lag=used_lag,
            )
        )
    return results


def recommend_d(results: list[AdfResult]) -> int:
    """Smallest tested difference order judged stationary at the 5% level."""
    for res in results:
        if res.stationary:
            return res.difference_order
    return results[-1].difference_order


# ---------------------------------------------------------------------------
# Ljung-Box


def ljung_box(residuals: np.ndarray, lags, model_df: int = 0) -> DiagnosticsReport:
    """Portmanteau white-noise test of a residual series.

    Q(h) = n(n+2) * sum_{k<=h} r_k^2/(n-k), compared against chi-square with
    ``h - model_df`` degrees of freedom (floored at 1 when the fitted
    parameter count consumes every lag).
    """
    residuals = np.asarray(residuals, dtype=float)
    n = len(residuals)
    lags = [int(h) for h in (lags if np.iterable(lags) else [lags])]
    if not lags or max(lags) >= n:
        raise ContractError(f"lags must be positive and below the series length {n}")
    if min(lags) < 1:
        raise ContractError("lags must be >= 1")

    centered = residuals - residuals.mean()
    denom = float(centered @ centered)
    if denom == 0:
        raise ContractError("residuals are constant; autocorrelation undefined")
    max_lag = max(lags)
    acf = np.array([centered[k:] @ centered[:-k] for k in range(1, max_lag + 1)]) / denom

    table = {}
    for h in lags:
        q_stat = float(n * (n + 2) * np.sum(acf[:h] ** 2 / (n - np.arange(1, h + 1))))
        table[h] = (q_stat, ljung_box_pvalue(q_stat, h, model_df))
    return DiagnosticsReport(ljung_box=table)


def ljung_box_pvalue(q_stat: float, lag: int, model_df: int = 0) -> float:
    """Chi-square tail probability of a Q statistic at one lag."""
    dof = max(lag - model_df, 1)
    return float(chi2.sf(q_stat, dof))
