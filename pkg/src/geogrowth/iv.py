"""Instrumented projections: reduced form over first stage, per horizon."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import DataError, WeakInstrumentWarning
from .lp import (
    IrfResult,
    LpSpec,
    RegressionFit,
    _fit_projection,
    _prepare_sample,
    _resolve_bandwidth,
    bartlett_hac,
    estimate_lp,
    yearly_moments,
)
from .panel import PanelFrame, shifted_values

FS_ZERO_TOL = 1e-12
WEAK_T_THRESHOLD = 3.0


@dataclass(frozen=True)
class LpIvSpec:
    outcome: str
    shock: str
    instrument: str
    controls: tuple[str, ...] = ()
    groups: tuple[str, ...] = ()
    horizons: tuple[int, int] = (0, 0)
    hac_bandwidth: int | str = "auto"
    per_horizon_first_stage: bool = False

    def __post_init__(self):
        if self.instrument == self.shock:
            raise ValueError("instrument must be a different variable from the shock")
        lo, hi = self.horizons
        if lo > hi:
            raise ValueError(f"horizon interval bounds out of order: ({lo}, {hi})")


@dataclass(frozen=True)
class LpIvResult:
    horizon: int
    rf_coef: float
    rf_se: float
    fs_coef: float
    fs_se: float
    fs_t: float
    ratio: float
    ratio_se: float
    nobs: int
    n_countries: int
    weak_instrument: bool


def _cross_coefficient_covariance(
    fit_a: RegressionFit, fit_b: RegressionFit, bandwidth: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Joint HAC covariance blocks for two fitted projections.

    Stacks the two regressions' per-year moment vectors over the union of
    calendar years and applies one Bartlett kernel, so the off-diagonal block
    estimates the dependence between the two coefficient vectors even when the
    estimation samples differ (each regression contributes moments only from
    its own rows). This is the covariance the ratio's delta method needs.
    """
    y0 = int(min(fit_a.years.min(), fit_b.years.min()))
    y1 = int(max(fit_a.years.max(), fit_b.years.max()))
    T = y1 - y0 + 1
    ka, kb = len(fit_a.names), len(fit_b.names)
    G = np.zeros((T, ka + kb))
    Ga = yearly_moments(fit_a.X, fit_a.residuals, fit_a.years)
    Gb = yearly_moments(fit_b.X, fit_b.residuals, fit_b.years)
    a0 = int(fit_a.years.min()) - y0
    b0 = int(fit_b.years.min()) - y0
    G[a0 : a0 + Ga.shape[0], :ka] = Ga
    G[b0 : b0 + Gb.shape[0], ka:] = Gb
    S = bartlett_hac(G, bandwidth)
    Ainv = np.linalg.inv(fit_a.X.T @ fit_a.X)
    Binv = np.linalg.inv(fit_b.X.T @ fit_b.X)
    Vaa = Ainv @ S[:ka, :ka] @ Ainv
    Vab = Ainv @ S[:ka, ka:] @ Binv
    Vbb = Binv @ S[ka:, ka:] @ Binv
    return Vaa, Vab, Vbb


def _first_stage(frame: PanelFrame, spec: LpIvSpec, bandwidth: int) -> RegressionFit:
    """Regress the shock on the instrument and controls on the impact-horizon sample."""
    regressors = [spec.instrument, *spec.controls]
    completeness = [*regressors, spec.outcome]
    shock_values = frame.data[spec.shock]
    sample = _prepare_sample(frame, shock_values, completeness, spec.groups)
    if sample is None or len(sample) < len(regressors) + 1:
        raise DataError("first-stage sample is empty or too small")
    return _fit_projection(sample, regressors, spec.groups, bandwidth)


def collect_lp_iv_fits(
    frame: PanelFrame, spec: LpIvSpec
) -> list[tuple[int, RegressionFit, RegressionFit, int]]:
    """Fit every projection the ratio estimator needs.

    Returns (horizon, reduced form, first stage, bandwidth) per usable
    horizon. The first stage is shared across horizons (fitted on the
    impact-horizon sample) unless per-horizon first stages were requested.
    """
    frame.require_columns(
        [spec.outcome, spec.shock, spec.instrument, *spec.controls, *spec.groups]
    )
    regressors = [spec.instrument, *spec.controls]
    lo, hi = spec.horizons
    n_years_all = frame.data["year"].nunique()
    fs_bw = _resolve_bandwidth(spec.hac_bandwidth, 0, n_years_all)

    shared_fs: RegressionFit | None = None
    if not spec.per_horizon_first_stage:
        shared_fs = _first_stage(frame, spec, fs_bw)

    out: list[tuple[int, RegressionFit, RegressionFit, int]] = []
    for h in range(lo, hi + 1):
        lead = shifted_values(frame, spec.outcome, h)
        completeness = list(regressors)
        if spec.per_horizon_first_stage:
            completeness.append(spec.shock)
        sample = _prepare_sample(frame, lead, completeness, spec.groups)
        if sample is None or len(sample) < len(regressors) + 1:
            warnings.warn(f"horizon {h}: insufficient observations, skipped", stacklevel=2)
            continue
        bw = _resolve_bandwidth(spec.hac_bandwidth, h, sample["year"].nunique())
        rf = _fit_projection(sample, regressors, spec.groups, bw)
        if spec.per_horizon_first_stage:
            fs_sample = sample.copy()
            fs_sample["__y__"] = sample[spec.shock].to_numpy()
            fs = _fit_projection(fs_sample, regressors, spec.groups, bw)
        else:
            fs = shared_fs
        out.append((h, rf, fs, bw))
    return out


def estimate_lp_iv(frame: PanelFrame, spec: LpIvSpec) -> list[LpIvResult]:
    """Ratio estimator per horizon: reduced-form over first-stage coefficient.

    The first stage is estimated once on the impact-horizon sample unless
    ``per_horizon_first_stage`` is set. A first-stage t statistic below
    `WEAK_T_THRESHOLD` in magnitude flags every horizon and raises a warning;
    a first-stage coefficient at zero (to 1e-12) leaves the ratios undefined
    (NaN) rather than dividing through.
    """
    results: list[LpIvResult] = []
    weak_warned = False
    for h, rf, fs, bw in collect_lp_iv_fits(frame, spec):
        rf_coef = rf.coefficient(spec.instrument)
        rf_se = rf.se(spec.instrument)
        fs_coef = fs.coefficient(spec.instrument)
        fs_se = fs.se(spec.instrument)
        if fs_se > 0:
            fs_t = fs_coef / fs_se
        else:
            fs_t = 0.0 if fs_coef == 0 else np.copysign(np.inf, fs_coef)
        weak = abs(fs_t) < WEAK_T_THRESHOLD
        if weak and not weak_warned:
            warnings.warn(
                f"first-stage |t| = {abs(fs_t):.2f} < {WEAK_T_THRESHOLD}: "
                "ratio estimates are unreliable",
                WeakInstrumentWarning,
                stacklevel=2,
            )
            weak_warned = True
        if abs(fs_coef) <= FS_ZERO_TOL:
            if not weak_warned:
                warnings.warn(
                    "first-stage coefficient is zero; ratios undefined",
                    WeakInstrumentWarning,
                    stacklevel=2,
                )
                weak_warned = True
            ratio, ratio_se = np.nan, np.nan
        else:
            ratio = rf_coef / fs_coef
            # Delta method for g(rf, fs) = rf / fs:
            #   Var(g) = Vrr/fs^2 - 2 rf Vrf / fs^3 + rf^2 Vff / fs^4
            # with (Vrr, Vrf, Vff) from the joint HAC pass at this horizon's
            # bandwidth, restricted to each regression's own sample rows.
            i = rf.names.index(spec.instrument)
            j = fs.names.index(spec.instrument)
            Vaa, Vab, Vbb = _cross_coefficient_covariance(rf, fs, bw)
            vrr, vrf, vff = Vaa[i, i], Vab[i, j], Vbb[j, j]
            var_ratio = (
                vrr / fs_coef**2
                - 2.0 * rf_coef * vrf / fs_coef**3
                + rf_coef**2 * vff / fs_coef**4
            )
            ratio_se = float(np.sqrt(max(var_ratio, 0.0)))
        results.append(
            LpIvResult(
                horizon=h,
                rf_coef=rf_coef,
                rf_se=rf_se,
                fs_coef=fs_coef,
                fs_se=fs_se,
                fs_t=float(fs_t),
                ratio=float(ratio),
                ratio_se=float(ratio_se),
                nobs=rf.nobs,
                n_countries=rf.n_countries,
                weak_instrument=weak,
            )
        )
    return results


def first_stage_irf(frame: PanelFrame, spec: LpIvSpec) -> list[IrfResult]:
    """Dynamic first stage: projection of the shock's leads on the instrument."""
    lp_spec = LpSpec(
        outcome=spec.shock,
        shocks=(spec.instrument,),
        controls=spec.controls,
        groups=spec.groups,
        horizons=spec.horizons,
        hac_bandwidth=spec.hac_bandwidth,
    )
    return estimate_lp(frame, lp_spec)


def lpiv_to_csv(results: Sequence[LpIvResult], path: str | Path) -> None:
    pd.DataFrame(
        {
            "horizon": [r.horizon for r in results],
            "rf_coef": [r.rf_coef for r in results],
            "rf_se": [r.rf_se for r in results],
            "fs_coef": [r.fs_coef for r in results],
            "fs_se": [r.fs_se for r in results],
            "fs_t": [r.fs_t for r in results],
            "ratio": [r.ratio for r in results],
            "ratio_se": [r.ratio_se for r in results],
            "nobs": [r.nobs for r in results],
            "n_countries": [r.n_countries for r in results],
            "weak_instrument": [r.weak_instrument for r in results],
        }
    ).to_csv(path, index=False)
