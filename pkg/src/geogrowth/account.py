"""Growth accounting: decade effects and counterfactual paths against the median.

The transitory response sequence is carried in log points x100 (matching an
outcome of 100 x log GDP per capita); percentage conversions divide by 100
before exponentiating. That unit convention is recorded in the CSV metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import DataError

UNIT_CONVENTION = "log_points_x100"


@dataclass(frozen=True)
class AccountingInputs:
    """Estimated responses plus the measure panel they are applied to."""

    transitory_irf: np.ndarray
    permanent_25: float
    measures: pd.DataFrame = field(repr=False)  # columns: country, year, value
    window: int = 25

    def __post_init__(self):
        if self.window < 1:
            raise DataError("window must be at least one year")
        for col in ("country", "year", "value"):
            if col not in self.measures.columns:
                raise DataError(f"measure panel must have a {col!r} column")

    def value_map(self) -> dict[tuple[str, int], float]:
        df = self.measures.dropna(subset=["value"])
        return {
            (c, int(y)): float(v)
            for c, y, v in zip(df["country"], df["year"], df["value"])
        }


def steady_state_effect(phi_inf: float, change: float) -> float:
    """Long-run outcome change from a sustained shift in the measure."""
    return phi_inf * change


def decade_effects(
    inputs: AccountingInputs, decade_start: int
) -> tuple[pd.DataFrame, list[str]]:
    """Per-country decade effects of measure changes.

    The contemporaneous effect convolves year-on-year measure changes during
    the decade with the transitory response; the long-run effect scales the
    decade's endpoint change by the permanent response at the 25-year horizon.
    Countries missing any year of the decade (including the year before the
    start, needed for the first change) are excluded and listed.
    """
    values = inputs.value_map()
    countries = sorted({c for c, _ in values})
    if not countries:
        raise DataError("measure panel is empty")
    irf = np.asarray(inputs.transitory_irf, dtype=float)
    if irf.size < 10:
        raise DataError("transitory response must cover at least horizons 0-9")
    years = range(decade_start, decade_start + 10)
    rows = []
    excluded = []
    for country in countries:
        needed = [(country, y) for y in range(decade_start - 1, decade_start + 10)]
        if any(key not in values for key in needed):
            excluded.append(country)
            continue
        changes = np.array(
            [values[(country, y)] - values[(country, y - 1)] for y in years]
        )
        contemporaneous = float(irf[:10] @ changes)
        endpoint = values[(country, decade_start + 9)] - values[(country, decade_start)]
        long_run = steady_state_effect(inputs.permanent_25, endpoint)
        rows.append((country, decade_start, contemporaneous, long_run))
    if not rows and excluded:
        raise DataError(f"no country has complete coverage for the {decade_start}s")
    return (
        pd.DataFrame(rows, columns=["country", "decade", "contemporaneous", "long_run"]),
        excluded,
    )


def median_series(measures: pd.DataFrame) -> pd.Series:
    """Cross-country median per year (even counts average the two middle values)."""
    df = measures.dropna(subset=["value"])
    if df.empty:
        raise DataError("measure panel is empty")
    return df.groupby("year")["value"].median().sort_index()


def counterfactual_path(inputs: AccountingInputs, country: str) -> pd.DataFrame:
    """Outcome contribution of the country's gap from the cross-country median.

    For each year t the contribution is the transitory response convolved with
    the gap series over the lookback window; years with a missing measure (for
    the country or the median) contribute a zero gap and are counted in the
    ``flags`` column (a per-year count).
    """
    values = inputs.value_map()
    med = median_series(inputs.measures)
    country_years = sorted(y for c, y in values if c == country)
    if not country_years:
        raise DataError(f"country {country!r} not present in the measure panel")
    irf = np.asarray(inputs.transitory_irf, dtype=float)
    first_year = int(min(med.index))
    last_year = int(max(med.index))
    rows = []
    for t in range(country_years[0], last_year + 1):
        total = 0.0
        n_missing = 0
        for s in range(max(first_year, t - inputs.window), t + 1):
            h = t - s
            if h >= irf.size:
                continue
            v = values.get((country, s))
            m = med.get(s)
            if v is None or m is None or pd.isna(m):
                n_missing += 1
                continue
            total += irf[h] * (v - m)
        pct = 100.0 * (np.exp(total / 100.0) - 1.0)
        rows.append((country, t, total, pct, n_missing))
    return pd.DataFrame(rows, columns=["country", "year", "dy_geo", "pct", "flags"])


def decades_to_csv(tables: Sequence[pd.DataFrame], path: str | Path) -> None:
    pd.concat(tables, ignore_index=True).to_csv(path, index=False)


def counterfactuals_to_csv(tables: Sequence[pd.DataFrame], path: str | Path) -> None:
    out = pd.concat(tables, ignore_index=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# units={UNIT_CONVENTION}\n")
        out.to_csv(handle, index=False)
