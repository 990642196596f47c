"""Resampling inference for the projection, ratio, and lag-model estimators.

Two schemes:

* country block -- draw whole countries with replacement, relabel duplicates
  as distinct units (original region labels kept), re-estimate everything;
* wild sign flips -- fit once, flip each country's residuals by a Rademacher
  weight, rebuild the outcome, re-estimate. Regressor matrices never change,
  so each replicate is a cheap linear update.

Every replicate draws from its own counter-based substream of the master
seed, so parallel and serial execution produce bit-identical results.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd

from .dyn import ArdlSpec, _ardl_regression
from .errors import DataError, GeogrowthError, InferenceError
from .iv import FS_ZERO_TOL, LpIvSpec, collect_lp_iv_fits
from .lp import LpSpec, RegressionFit, estimate_lp
from .panel import PanelFrame, demean_matrix
from .rng import substream

TargetSpec = LpSpec | LpIvSpec | ArdlSpec

SCHEMES = ("country_block", "wild")
WILD_UNITS = ("country", "observation")


@dataclass(frozen=True)
class BootstrapSpec:
    scheme: str
    replications: int
    seed: int
    target: TargetSpec
    wild_unit: str = "country"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.replications < 1:
            raise ValueError("at least one replication is required")
        if self.wild_unit not in WILD_UNITS:
            raise ValueError(f"wild_unit must be one of {WILD_UNITS}")


@dataclass(frozen=True)
class StatisticSummary:
    name: str
    estimate: float
    lo: float
    hi: float
    sd: float
    n_effective: int


@dataclass(frozen=True)
class BootstrapResult:
    scheme: str
    replications: int
    seed: int
    statistics: list[StatisticSummary]

    def by_name(self) -> dict[str, StatisticSummary]:
        return {s.name: s for s in self.statistics}


def _ardl_statistics_from_coefs(coefs: np.ndarray, J: int) -> dict[str, float]:
    alpha = float(coefs[0])
    beta = coefs[1 : 1 + J]
    gamma = coefs[1 + J : 1 + 2 * J]
    stats = {"alpha": alpha}
    for j in range(J):
        stats[f"beta{j + 1}"] = float(beta[j])
    for j in range(J):
        stats[f"gamma{j + 1}"] = float(gamma[j])
    denom = 1.0 - float(beta.sum())
    stats["phi_inf"] = (alpha + float(gamma.sum())) / denom if abs(denom) > 1e-12 else float("nan")
    return stats


def _estimate_statistics(frame: PanelFrame, target: TargetSpec) -> dict[str, float]:
    """Full re-estimation of the target on a (possibly resampled) frame."""
    if isinstance(target, LpSpec):
        results = estimate_lp(frame, target)
        return {f"h{r.horizon}:{r.shock}": r.coefficient for r in results}
    if isinstance(target, LpIvSpec):
        stats: dict[str, float] = {}
        fits = collect_lp_iv_fits(frame, target)
        for h, rf, fs, _bw in fits:
            fs_coef = fs.coefficient(target.instrument)
            rf_coef = rf.coefficient(target.instrument)
            if "fs_coef" not in stats:
                stats["fs_coef"] = fs_coef
            stats[f"h{h}:ratio"] = (
                rf_coef / fs_coef if abs(fs_coef) > FS_ZERO_TOL else float("nan")
            )
        return stats
    if isinstance(target, ArdlSpec):
        fit = _ardl_regression(frame, target)
        return _ardl_statistics_from_coefs(fit.coefficients, target.lags)
    raise DataError(f"unsupported bootstrap target: {type(target).__name__}")


def _block_resample(frame: PanelFrame, rng: np.random.Generator) -> PanelFrame:
    """Draw countries i.i.d. with replacement; duplicates become distinct units.

    Region (and any other) columns keep their original labels, so shared
    fixed-effect structures are reused rather than redrawn.
    """
    df = frame.data
    countries = np.array(sorted(df["country"].unique()))
    drawn = rng.choice(countries, size=countries.size, replace=True)
    pieces = []
    for k, country in enumerate(drawn):
        block = df[df["country"] == country].copy()
        block["country"] = f"{country}#{k}"
        pieces.append(block)
    return PanelFrame.from_frame(pd.concat(pieces, ignore_index=True))


class _WildEngine:
    """Precomputed machinery for sign-flip replicates of one target."""

    def __init__(self, frame: PanelFrame, target: TargetSpec, wild_unit: str):
        self.wild_unit = wild_unit
        self.units: list[RegressionFit] = []
        self._projectors: list[np.ndarray] = []
        self._stats_fn: Callable[[list[np.ndarray]], dict[str, float]] | None = None
        self._build(frame, target)
        df = frame.data
        self.countries = np.array(sorted(df["country"].unique()))
        if wild_unit == "observation":
            keys = list(zip(df["country"], df["year"]))
            self._obs_index = {key: i for i, key in enumerate(sorted(keys))}
        for fit in self.units:
            self._projectors.append(np.linalg.solve(fit.X.T @ fit.X, fit.X.T))

    def _build(self, frame: PanelFrame, target: TargetSpec) -> None:
        if isinstance(target, LpSpec):
            _results, fits = estimate_lp(frame, target, return_fits=True)
            horizons = sorted(fits)
            self.units = [fits[h] for h in horizons]
            shock_idx = (
                [fits[horizons[0]].names.index(s) for s in target.shocks] if horizons else []
            )

            def lp_stats(coefs: list[np.ndarray]) -> dict[str, float]:
                out = {}
                for h, c in zip(horizons, coefs):
                    for s, i in zip(target.shocks, shock_idx):
                        out[f"h{h}:{s}"] = float(c[i])
                return out

            self._stats_fn = lp_stats
        elif isinstance(target, LpIvSpec):
            fits = collect_lp_iv_fits(frame, target)
            z = target.instrument
            # Units: every distinct regression once (shared first stage included once).
            layout: list[tuple[int, int, int]] = []  # (horizon, rf unit idx, fs unit idx)
            seen: dict[int, int] = {}

            def unit_index(fit: RegressionFit) -> int:
                key = id(fit)
                if key not in seen:
                    seen[key] = len(self.units)
                    self.units.append(fit)
                return seen[key]

            for h, rf, fs, _bw in fits:
                layout.append((h, unit_index(rf), unit_index(fs)))
            z_idx = self.units[0].names.index(z)

            def iv_stats(coefs: list[np.ndarray]) -> dict[str, float]:
                out: dict[str, float] = {}
                for h, ri, fi in layout:
                    fs_coef = float(coefs[fi][z_idx])
                    if "fs_coef" not in out:
                        out["fs_coef"] = fs_coef
                    rf_coef = float(coefs[ri][z_idx])
                    out[f"h{h}:ratio"] = (
                        rf_coef / fs_coef if abs(fs_coef) > FS_ZERO_TOL else float("nan")
                    )
                return out

            self._stats_fn = iv_stats
        elif isinstance(target, ArdlSpec):
            fit = _ardl_regression(frame, target)
            self.units = [fit]
            J = target.lags

            def ardl_stats(coefs: list[np.ndarray]) -> dict[str, float]:
                return _ardl_statistics_from_coefs(coefs[0], J)

            self._stats_fn = ardl_stats
        else:
            raise DataError(f"unsupported bootstrap target: {type(target).__name__}")

    def point_statistics(self) -> dict[str, float]:
        return self._stats_fn([fit.coefficients for fit in self.units])

    def _weights_for(self, fit: RegressionFit, rng_draw: np.ndarray) -> np.ndarray:
        if self.wild_unit == "country":
            pos = np.searchsorted(self.countries, fit.countries)
            return rng_draw[pos]
        keys = zip(fit.countries, fit.years)
        idx = np.fromiter((self._obs_index[k] for k in keys), dtype=np.intp)
        return rng_draw[idx]

    def draw_size(self) -> int:
        return len(self.countries) if self.wild_unit == "country" else len(self._obs_index)

    def replicate(self, rng: np.random.Generator) -> dict[str, float]:
        w = rng.integers(0, 2, size=self.draw_size()) * 2 - 1
        coefs = []
        for fit, P in zip(self.units, self._projectors):
            flipped = self._weights_for(fit, w) * fit.residuals
            # Sign flips break orthogonality to the fixed effects, so the
            # rebuilt outcome is re-demeaned before the coefficient update.
            if fit.group_codes:
                flipped = demean_matrix(flipped[:, None], fit.group_codes)[:, 0]
            else:
                flipped = flipped - flipped.mean()
            coefs.append(fit.coefficients + P @ flipped)
        return self._stats_fn(coefs)


def run_bootstrap(
    frame: PanelFrame,
    spec: BootstrapSpec,
    *,
    n_workers: int = 1,
) -> BootstrapResult:
    """Resample, re-estimate, and summarize with percentile intervals.

    Replicates that fail (singular draw, undefined ratio) are excluded per
    statistic; if nothing survives, inference fails loudly.
    """
    point = _estimate_statistics(frame, spec.target)
    names = list(point)
    engine: _WildEngine | None = None
    if spec.scheme == "wild":
        engine = _WildEngine(frame, spec.target, spec.wild_unit)
        point = engine.point_statistics()
        names = list(point)

    def one_replicate(r: int) -> dict[str, float]:
        rng = substream(spec.seed, r)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                if spec.scheme == "country_block":
                    return _estimate_statistics(_block_resample(frame, rng), spec.target)
                return engine.replicate(rng)
            except (GeogrowthError, np.linalg.LinAlgError):
                return {}

    rows = np.full((spec.replications, len(names)), np.nan)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            replicate_stats = list(pool.map(one_replicate, range(spec.replications)))
    else:
        replicate_stats = [one_replicate(r) for r in range(spec.replications)]
    for r, stats in enumerate(replicate_stats):
        for j, name in enumerate(names):
            rows[r, j] = stats.get(name, np.nan)

    summaries: list[StatisticSummary] = []
    any_effective = False
    for j, name in enumerate(names):
        col = rows[:, j]
        good = col[np.isfinite(col)]
        n_eff = int(good.size)
        if n_eff:
            any_effective = True
            lo, hi = np.percentile(good, [2.5, 97.5])
            sd = float(good.std(ddof=1)) if n_eff > 1 else 0.0
        else:
            lo = hi = sd = float("nan")
        summaries.append(
            StatisticSummary(
                name=name,
                estimate=point[name],
                lo=float(lo),
                hi=float(hi),
                sd=sd,
                n_effective=n_eff,
            )
        )
    if not any_effective:
        raise InferenceError("every bootstrap replicate failed")
    return BootstrapResult(
        scheme=spec.scheme,
        replications=spec.replications,
        seed=spec.seed,
        statistics=summaries,
    )


def bootstrap_to_csv(result: BootstrapResult, path: str | Path) -> None:
    """CSV with the seed recorded on a header comment line."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(
            f"# scheme={result.scheme} replications={result.replications} seed={result.seed}\n"
        )
        pd.DataFrame(
            {
                "statistic": [s.name for s in result.statistics],
                "estimate": [s.estimate for s in result.statistics],
                "lo": [s.lo for s in result.statistics],
                "hi": [s.hi for s in result.statistics],
                "sd": [s.sd for s in result.statistics],
                "n_effective": [s.n_effective for s in result.statistics],
            }
        ).to_csv(handle, index=False)
