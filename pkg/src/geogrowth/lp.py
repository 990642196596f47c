"""Per-horizon panel projections with cross-sectionally robust HAC inference.

Each horizon is a separate regression of the outcome's lead on the shock(s)
plus controls, after removing fixed effects on that horizon's complete-case
sample. Coefficient covariance sums score vectors cross-sectionally per year
and applies a Bartlett kernel over the time dimension, so standard errors are
robust to arbitrary cross-sectional dependence and to serial correlation up to
the chosen bandwidth.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import DataError, SingularMatrixError
from .panel import PanelFrame, _group_codes, demean_matrix, shifted_values

Z95 = 1.96  # conventional two-sided 95% normal quantile


@dataclass(frozen=True)
class LpSpec:
    outcome: str
    shocks: tuple[str, ...]
    controls: tuple[str, ...] = ()
    groups: tuple[str, ...] = ()
    horizons: tuple[int, int] = (0, 0)
    hac_bandwidth: int | str = "auto"

    def __post_init__(self):
        if not self.shocks:
            raise ValueError("at least one shock variable is required")
        lo, hi = self.horizons
        if lo > hi:
            raise ValueError(f"horizon interval bounds out of order: ({lo}, {hi})")


@dataclass(frozen=True)
class RegressionFit:
    """A single fitted projection, kept around for inference and resampling."""

    names: tuple[str, ...]
    coefficients: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    covariance: np.ndarray
    nobs: int
    n_countries: int
    within_r2: float
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    countries: np.ndarray = field(repr=False)
    years: np.ndarray = field(repr=False)
    group_codes: tuple = field(repr=False, default=())

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def se(self, name: str) -> float:
        i = self.names.index(name)
        return float(np.sqrt(max(self.covariance[i, i], 0.0)))


@dataclass(frozen=True)
class IrfResult:
    horizon: int
    shock: str
    coefficient: float
    se: float
    lo95: float
    hi95: float
    nobs: int
    n_countries: int


def auto_bandwidth(horizon: int, n_years: int) -> int:
    """Default HAC bandwidth: grows with the projection horizon, capped at T - 1."""
    bw = int(np.floor(1.5 * (abs(horizon) + 1))) + 1
    return max(0, min(bw, n_years - 1))


def _resolve_bandwidth(setting: int | str, horizon: int, n_years: int) -> int:
    if setting == "auto":
        return auto_bandwidth(horizon, n_years)
    bw = int(setting)
    if bw < 0:
        raise DataError(f"HAC bandwidth must be nonnegative, got {bw}")
    return min(bw, max(n_years - 1, 0))


def yearly_moments(X: np.ndarray, residuals: np.ndarray, years: np.ndarray) -> np.ndarray:
    """Cross-sectional sums of score vectors x*u per calendar year.

    Rows cover the full year range; absent years are zero rows, so kernel lags
    count calendar distance.
    """
    X = np.asarray(X, dtype=float)
    u = np.asarray(residuals, dtype=float)
    years = np.asarray(years).astype(int)
    y0, y1 = int(years.min()), int(years.max())
    G = np.zeros((y1 - y0 + 1, X.shape[1]))
    np.add.at(G, years - y0, X * u[:, None])
    return G


def bartlett_hac(G: np.ndarray, bandwidth: int) -> np.ndarray:
    """Bartlett-weighted long-run covariance of a moment-vector time series."""
    if bandwidth < 0:
        raise DataError("bandwidth must be nonnegative")
    S = G.T @ G
    L = min(bandwidth, G.shape[0] - 1)
    for lag in range(1, L + 1):
        w = 1.0 - lag / (bandwidth + 1.0)
        C = G[lag:].T @ G[:-lag]
        S += w * (C + C.T)
    return S


def dk_covariance(
    X: np.ndarray,
    residuals: np.ndarray,
    years: np.ndarray,
    bandwidth: int,
) -> np.ndarray:
    """Sandwich covariance from year-summed moment vectors with a Bartlett kernel."""
    X = np.asarray(X, dtype=float)
    S = bartlett_hac(yearly_moments(X, residuals, years), bandwidth)
    XtX = X.T @ X
    try:
        XtX_inv = np.linalg.inv(XtX)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("X'X") from exc
    V = XtX_inv @ S @ XtX_inv
    return (V + V.T) / 2.0


def _check_full_rank(X: np.ndarray, names: Sequence[str]) -> None:
    n, k = X.shape
    if n < k:
        raise DataError(f"{n} observations cannot identify {k} regressors")
    if np.linalg.matrix_rank(X) == k:
        return
    # Walk the columns to name the first one that adds no rank.
    for j in range(k):
        if np.linalg.matrix_rank(X[:, : j + 1]) < j + 1:
            raise SingularMatrixError(str(names[j]))
    raise SingularMatrixError(str(names[-1]))


def ols(X: np.ndarray, y: np.ndarray, names: Sequence[str]) -> np.ndarray:
    _check_full_rank(X, names)
    return np.linalg.solve(X.T @ X, X.T @ y)


def _prepare_sample(
    frame: PanelFrame,
    outcome_values: pd.Series,
    columns: Sequence[str],
    groups: Sequence[str],
) -> pd.DataFrame | None:
    df = frame.data.copy()
    df["__y__"] = outcome_values.to_numpy()
    needed = ["__y__", *columns]
    mask = df[needed].notna().all(axis=1)
    for g in groups:
        mask &= df[g].notna()
    keep = list(dict.fromkeys(["country", "year", *groups, *needed]))
    sample = df.loc[mask, keep].reset_index(drop=True)
    return sample if len(sample) else None


def _fit_projection(
    sample: pd.DataFrame,
    regressors: Sequence[str],
    groups: Sequence[str],
    bandwidth: int,
) -> RegressionFit:
    cols = ["__y__", *regressors]
    values = sample[cols].to_numpy(dtype=float)
    if groups:
        codes = _group_codes(sample, groups)
        values = demean_matrix(values, codes)
    else:
        codes = ()
        values = values - values.mean(axis=0, keepdims=True)
    y = values[:, 0]
    X = values[:, 1:]
    coef = ols(X, y, regressors)
    fitted = X @ coef
    resid = y - fitted
    years = sample["year"].to_numpy()
    cov = dk_covariance(X, resid, years, bandwidth)
    tss = float(y @ y)
    rss = float(resid @ resid)
    within_r2 = 1.0 - rss / tss if tss > 0 else 0.0
    return RegressionFit(
        names=tuple(regressors),
        coefficients=coef,
        residuals=resid,
        fitted=fitted,
        covariance=cov,
        nobs=len(sample),
        n_countries=int(sample["country"].nunique()),
        within_r2=within_r2,
        X=X,
        y=y,
        countries=sample["country"].to_numpy(),
        years=years,
        group_codes=tuple(codes),
    )


def estimate_lp(
    frame: PanelFrame,
    spec: LpSpec,
    *,
    return_fits: bool = False,
):
    """Estimate the projection at each horizon in the spec.

    Returns one row per (horizon, shock). Horizons with fewer complete
    observations than regressors plus one are skipped with a warning. With
    ``return_fits`` the full per-horizon fits come back too, keyed by horizon.
    """
    frame.require_columns([spec.outcome, *spec.shocks, *spec.controls, *spec.groups])
    regressors = [*spec.shocks, *spec.controls]
    lo, hi = spec.horizons
    results: list[IrfResult] = []
    fits: dict[int, RegressionFit] = {}
    for h in range(lo, hi + 1):
        lead = shifted_values(frame, spec.outcome, h)
        sample = _prepare_sample(frame, lead, regressors, spec.groups)
        if sample is None or len(sample) < len(regressors) + 1:
            warnings.warn(f"horizon {h}: insufficient observations, skipped", stacklevel=2)
            continue
        n_years = sample["year"].nunique()
        bw = _resolve_bandwidth(spec.hac_bandwidth, h, n_years)
        fit = _fit_projection(sample, regressors, spec.groups, bw)
        fits[h] = fit
        for shock in spec.shocks:
            coef = fit.coefficient(shock)
            se = fit.se(shock)
            results.append(
                IrfResult(
                    horizon=h,
                    shock=shock,
                    coefficient=coef,
                    se=se,
                    lo95=coef - Z95 * se,
                    hi95=coef + Z95 * se,
                    nobs=fit.nobs,
                    n_countries=fit.n_countries,
                )
            )
    if return_fits:
        return results, fits
    return results


def irf_path(results: Sequence[IrfResult], shock: str) -> np.ndarray:
    """Coefficient path for one shock ordered by horizon."""
    rows = sorted((r for r in results if r.shock == shock), key=lambda r: r.horizon)
    return np.array([r.coefficient for r in rows])


def fwl_residualize(
    frame: PanelFrame,
    y: str,
    x: str,
    controls: Sequence[str] = (),
    groups: Sequence[str] = (),
) -> np.ndarray:
    """Residualize both variables on controls and fixed effects.

    Returns an (n, 2) array of (x residual, y residual) pairs whose simple
    regression slope equals the full-regression coefficient on ``x``.
    """
    frame.require_columns([y, x, *controls, *groups])
    df = frame.data
    cols = [y, x, *controls]
    mask = df[cols].notna().all(axis=1)
    for g in groups:
        mask &= df[g].notna()
    sample = df.loc[mask].reset_index(drop=True)
    if sample.empty:
        raise DataError("no complete observations to residualize")
    values = sample[cols].to_numpy(dtype=float)
    if groups:
        values = demean_matrix(values, _group_codes(sample, groups))
    else:
        values = values - values.mean(axis=0, keepdims=True)
    y_dm, x_dm, Z = values[:, 0], values[:, 1], values[:, 2:]
    if Z.shape[1]:
        _check_full_rank(Z, controls)
        bz_y, *_ = np.linalg.lstsq(Z, y_dm, rcond=None)
        bz_x, *_ = np.linalg.lstsq(Z, x_dm, rcond=None)
        y_res = y_dm - Z @ bz_y
        x_res = x_dm - Z @ bz_x
    else:
        y_res, x_res = y_dm, x_dm
    return np.column_stack([x_res, y_res])


@dataclass(frozen=True)
class BinPoint:
    bin: int
    mean_x: float
    mean_y: float
    count: int


def binscatter(pairs, n_bins: int) -> list[BinPoint]:
    """Equal-count quantile bins on x; per-bin means. Bin sizes differ by at most one."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataError("pairs must be an (n, 2) array of (x, y) values")
    n = arr.shape[0]
    if not 1 <= n_bins <= n:
        raise DataError(f"n_bins must lie in [1, {n}], got {n_bins}")
    order = np.argsort(arr[:, 0], kind="stable")
    chunks = np.array_split(order, n_bins)
    out = []
    for b, idx in enumerate(chunks):
        out.append(
            BinPoint(
                bin=b,
                mean_x=float(arr[idx, 0].mean()),
                mean_y=float(arr[idx, 1].mean()),
                count=len(idx),
            )
        )
    return out


def irf_to_csv(results: Sequence[IrfResult], path: str | Path) -> None:
    pd.DataFrame(
        {
            "horizon": [r.horizon for r in results],
            "shock": [r.shock for r in results],
            "coef": [r.coefficient for r in results],
            "se": [r.se for r in results],
            "lo95": [r.lo95 for r in results],
            "hi95": [r.hi95 for r in results],
            "nobs": [r.nobs for r in results],
            "n_countries": [r.n_countries for r in results],
        }
    ).to_csv(path, index=False)


def binscatter_to_csv(points: Sequence[BinPoint], path: str | Path) -> None:
    pd.DataFrame(
        {
            "bin": [p.bin for p in points],
            "mean_x": [p.mean_x for p in points],
            "mean_y": [p.mean_y for p in points],
            "count": [p.count for p in points],
        }
    ).to_csv(path, index=False)
