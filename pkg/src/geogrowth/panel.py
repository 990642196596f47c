"""Country-year panel assembly: lags/leads, fixed-effect demeaning, balanced subsets."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .errors import ConvergenceError, DataError, MissingColumnError

KEY_COLUMNS = ("country", "year")

DEMEAN_TOL = 1e-10
DEMEAN_MAX_ITER = 10_000


@dataclass(frozen=True)
class PanelFrame:
    """Immutable country-year table. Rows unique on (country, year), sorted."""

    data: pd.DataFrame = field(repr=False)

    def __post_init__(self):
        df = self.data
        for col in KEY_COLUMNS:
            if col not in df.columns:
                raise MissingColumnError(col)
        if not pd.api.types.is_integer_dtype(df["year"]):
            raise DataError("year column must be integral")
        if df.duplicated(subset=list(KEY_COLUMNS)).any():
            dup = df[df.duplicated(subset=list(KEY_COLUMNS))].iloc[0]
            raise DataError(f"duplicate (country, year) key: ({dup['country']}, {dup['year']})")

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "PanelFrame":
        df = df.copy()
        for col in KEY_COLUMNS:
            if col not in df.columns:
                raise MissingColumnError(col)
        if "year" in df.columns:
            years = df["year"]
            if not pd.api.types.is_integer_dtype(years):
                as_float = pd.to_numeric(years, errors="raise")
                if not np.allclose(as_float, np.round(as_float)):
                    raise DataError("year column must be integral")
                df["year"] = as_float.astype(np.int64)
        df = df.sort_values(list(KEY_COLUMNS), kind="stable").reset_index(drop=True)
        return cls(df)

    @classmethod
    def from_csv(cls, path: str | Path) -> "PanelFrame":
        return cls.from_frame(pd.read_csv(path))

    def to_csv(self, path: str | Path) -> None:
        self.data.to_csv(path, index=False)

    @property
    def columns(self) -> list[str]:
        return list(self.data.columns)

    def require_columns(self, names: Iterable[str]) -> None:
        for name in names:
            if name not in self.data.columns:
                raise MissingColumnError(name)


@dataclass(frozen=True)
class LagSpec:
    """Shift specification for one variable: positive lags, nonnegative leads."""

    variable: str
    lags: tuple[int, ...] = ()
    leads: tuple[int, ...] = ()

    def __post_init__(self):
        if any(l <= 0 for l in self.lags):
            raise ValueError("lags must be positive integers")
        if any(h < 0 for h in self.leads):
            raise ValueError("leads must be nonnegative integers")
        offsets = [-l for l in self.lags] + list(self.leads)
        if len(set(offsets)) != len(offsets):
            raise ValueError("lag/lead offsets must be distinct")


def shifted_values(frame: PanelFrame, variable: str, offset: int) -> pd.Series:
    """Value of ``variable`` at year t + offset, aligned to the frame's rows.

    Shifts are by calendar year within country, so gap years yield missing
    values instead of leaking the nearest observation, and no value ever
    crosses a country boundary.
    """
    frame.require_columns([variable])
    df = frame.data
    donor = pd.DataFrame(
        {
            "country": df["country"],
            "year": df["year"] - offset,  # value observed at y serves rows at y - offset
            "__shifted__": df[variable],
        }
    )
    merged = df[["country", "year"]].merge(donor, on=["country", "year"], how="left")
    return merged["__shifted__"].rename(None)


def build_shifts(frame: PanelFrame, spec: LagSpec) -> PanelFrame:
    """Add ``var_lagL`` / ``var_leadH`` columns per the spec."""
    df = frame.data.copy()
    for lag in sorted(spec.lags):
        df[f"{spec.variable}_lag{lag}"] = shifted_values(frame, spec.variable, -lag).to_numpy()
    for lead in sorted(spec.leads):
        df[f"{spec.variable}_lead{lead}"] = shifted_values(frame, spec.variable, lead).to_numpy()
    return PanelFrame(df)


def _group_codes(df: pd.DataFrame, groups: Sequence[str]) -> list[tuple[np.ndarray, int]]:
    out = []
    for g in groups:
        if g not in df.columns:
            raise MissingColumnError(g)
        if df[g].isna().any():
            raise DataError(f"group key {g} has missing values")
        codes, uniques = pd.factorize(df[g], sort=True)
        out.append((codes.astype(np.intp), len(uniques)))
    return out


def demean_matrix(
    values: np.ndarray,
    group_codes: Sequence[tuple[np.ndarray, int]],
    tol: float = DEMEAN_TOL,
    max_iter: int = DEMEAN_MAX_ITER,
) -> np.ndarray:
    """Alternating-projection residuals of the columns of ``values``.

    Sweeps over the group factors subtracting group means until every group
    mean of every column is below ``tol`` in magnitude. One factor converges
    in a single sweep; interacted factors generally need a few.
    """
    out = np.array(values, dtype=float, copy=True)
    if out.ndim == 1:
        out = out[:, None]
    if np.isnan(out).any():
        raise DataError("demeaning requires complete rows; drop missing cells first")
    if not group_codes:
        raise DataError("at least one group key is required")
    counts = [np.bincount(codes, minlength=n).astype(float) for codes, n in group_codes]
    for _ in range(max_iter):
        for (codes, n), cnt in zip(group_codes, counts):
            sums = np.zeros((n, out.shape[1]))
            np.add.at(sums, codes, out)
            out -= (sums / cnt[:, None])[codes]
        worst = 0.0
        for (codes, n), cnt in zip(group_codes, counts):
            sums = np.zeros((n, out.shape[1]))
            np.add.at(sums, codes, out)
            means = sums / cnt[:, None]
            worst = max(worst, float(np.abs(means).max(initial=0.0)))
        if worst < tol:
            return out
    raise ConvergenceError("fixed-effect demeaning did not converge", worst=worst)


def demean_columns(
    df: pd.DataFrame,
    columns: Sequence[str],
    groups: Sequence[str],
    tol: float = DEMEAN_TOL,
    max_iter: int = DEMEAN_MAX_ITER,
) -> pd.DataFrame:
    """Return a copy of ``df`` with ``columns`` replaced by their demeaned values."""
    for col in columns:
        if col not in df.columns:
            raise MissingColumnError(col)
    codes = _group_codes(df, groups)
    values = df[list(columns)].to_numpy(dtype=float)
    demeaned = demean_matrix(values, codes, tol=tol, max_iter=max_iter)
    out = df.copy()
    out[list(columns)] = demeaned
    return out


def demean(
    frame: PanelFrame,
    columns: Sequence[str],
    groups: Sequence[str],
    tol: float = DEMEAN_TOL,
    max_iter: int = DEMEAN_MAX_ITER,
) -> PanelFrame:
    """Fixed-effect residuals of ``columns`` within ``groups``; frame otherwise unchanged."""
    return PanelFrame(demean_columns(frame.data, columns, groups, tol=tol, max_iter=max_iter))


def composite_key(frame: PanelFrame, parts: Sequence[str], name: str | None = None) -> PanelFrame:
    """Materialize an interacted group key (e.g. region x year) as one string column."""
    frame.require_columns(parts)
    if name is None:
        name = "_".join(parts)
    df = frame.data.copy()
    key = df[parts[0]].astype(str)
    for part in parts[1:]:
        key = key + ":" + df[part].astype(str)
    df[name] = key
    return PanelFrame(df)


def balanced_subset(
    frame: PanelFrame,
    required: Sequence[str],
    horizon_range: tuple[int, int],
) -> PanelFrame:
    """Keep countries able to serve every horizon regression with the same rows.

    Estimation years are those where every offset in ``horizon_range`` stays
    inside the panel's year span; a country survives only if all required
    columns are observed at every year those offsets touch. One missing cell
    drops the country entirely.
    """
    frame.require_columns(required)
    lo, hi = horizon_range
    if lo > hi:
        raise DataError(f"horizon interval bounds out of order: ({lo}, {hi})")
    df = frame.data
    if df.empty:
        return frame
    y0, y1 = int(df["year"].min()), int(df["year"].max())
    t_first, t_last = y0 - lo, y1 - hi
    if t_first > t_last:
        raise DataError(
            f"panel span {y0}-{y1} cannot host a horizon window of {hi - lo + 1} years"
        )
    # Offsets from the feasible estimation years sweep the whole span.
    needed_years = set(range(y0, y1 + 1))
    complete = df[list(required)].notna().all(axis=1)
    keep: list[str] = []
    for country, idx in df.groupby("country", sort=True).groups.items():
        rows = df.loc[idx]
        good_years = set(rows.loc[complete.loc[idx], "year"].tolist())
        if needed_years.issubset(good_years):
            keep.append(country)
    return PanelFrame(df[df["country"].isin(keep)].reset_index(drop=True))
