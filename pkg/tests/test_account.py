import numpy as np
import pandas as pd
import pytest

from geogrowth.account import (
    AccountingInputs,
    counterfactual_path,
    decade_effects,
    median_series,
    steady_state_effect,
)
from geogrowth.errors import DataError


def measure_frame(series: dict[str, dict[int, float]]) -> pd.DataFrame:
    rows = [
        {"country": c, "year": y, "value": v}
        for c, years in series.items()
        for y, v in years.items()
    ]
    return pd.DataFrame(rows)


def impulse(n=26):
    e0 = np.zeros(n)
    e0[0] = 1.0
    return e0


class TestDecadeEffects:
    def test_no_change_gives_zero(self):
        measures = measure_frame({"AAA": {y: 0.3 for y in range(1959, 1971)}})
        inputs = AccountingInputs(impulse(), 75.0, measures)
        table, excluded = decade_effects(inputs, 1960)
        assert excluded == []
        assert table.iloc[0]["contemporaneous"] == 0.0
        assert table.iloc[0]["long_run"] == 0.0

    def test_unit_change_passthrough(self):
        # With an impulse response, only the change landing on the response's
        # support contributes: a unit jump at the decade's first year.
        values = {y: 1.0 for y in range(1959, 1971)}
        values[1959] = 0.0
        measures = measure_frame({"AAA": values})
        inputs = AccountingInputs(impulse(), 75.0, measures)
        table, _ = decade_effects(inputs, 1960)
        assert table.iloc[0]["contemporaneous"] == pytest.approx(1.0)
        assert table.iloc[0]["long_run"] == 0.0  # endpoints 1960 and 1969 both at 1.0

    def test_one_sd_long_run_arithmetic(self):
        # One-standard-deviation endpoint change of 0.128 with a 25-year
        # permanent response of 75 log points: 9.6 log points.
        values = {1959: 0.0, 1960: 0.0}
        for y in range(1961, 1971):
            values[y] = 0.128 if y >= 1969 else 0.064
        measures = measure_frame({"AAA": values})
        inputs = AccountingInputs(impulse(), 75.0, measures)
        table, _ = decade_effects(inputs, 1960)
        assert table.iloc[0]["long_run"] == pytest.approx(9.6, abs=1e-12)

    def test_gap_excludes_country(self):
        full = {y: 0.1 for y in range(1959, 1971)}
        gappy = {y: 0.1 for y in range(1959, 1971) if y != 1965}
        measures = measure_frame({"AAA": full, "BBB": gappy})
        inputs = AccountingInputs(impulse(), 75.0, measures)
        table, excluded = decade_effects(inputs, 1960)
        assert table["country"].tolist() == ["AAA"]
        assert excluded == ["BBB"]

    def test_empty_decade_errors(self):
        measures = measure_frame({"AAA": {2000: 0.1, 2001: 0.1}})
        inputs = AccountingInputs(impulse(), 75.0, measures)
        with pytest.raises(DataError):
            decade_effects(inputs, 1960)

    def test_short_irf_rejected(self):
        measures = measure_frame({"AAA": {y: 0.0 for y in range(1959, 1971)}})
        inputs = AccountingInputs(np.ones(5), 75.0, measures)
        with pytest.raises(DataError, match="0-9"):
            decade_effects(inputs, 1960)


class TestMedianSeries:
    def test_single_country(self):
        med = median_series(measure_frame({"AAA": {2000: 0.4}}))
        assert med[2000] == 0.4

    def test_odd_count(self):
        med = median_series(
            measure_frame({"A": {2000: 0.1}, "B": {2000: 0.3}, "C": {2000: 0.5}})
        )
        assert med[2000] == pytest.approx(0.3)

    def test_even_count_midpoint(self):
        med = median_series(measure_frame({"A": {2000: 0.1}, "B": {2000: 0.3}}))
        assert med[2000] == pytest.approx(0.2)


class TestCounterfactual:
    def test_at_median_contributes_nothing(self):
        series = {c: {y: 0.25 for y in range(1990, 2000)} for c in ("A", "B", "C")}
        inputs = AccountingInputs(impulse(10), 75.0, measure_frame(series), window=5)
        path = counterfactual_path(inputs, "A")
        assert np.abs(path["dy_geo"]).max() == 0.0
        assert np.abs(path["pct"]).max() == 0.0

    def test_constant_gap_passthrough(self):
        series = {
            "A": {y: 0.30 for y in range(1990, 2000)},
            "B": {y: 0.10 for y in range(1990, 2000)},
        }
        # median of two = 0.20, so A's gap is +0.10 every year
        inputs = AccountingInputs(impulse(10), 75.0, measure_frame(series), window=5)
        path = counterfactual_path(inputs, "A")
        assert np.allclose(path["dy_geo"], 0.10)

    def test_window_rule_drops_old_gaps(self):
        # Gap exists only in year 2000; with window 25 it stops contributing
        # at year 2026 even though the response sequence is long enough.
        years = {y: 0.2 for y in range(2000, 2030)}
        a_years = dict(years)
        a_years[2000] = 1.2
        series = {"A": a_years, "B": years, "C": years}
        irf = np.ones(40)
        inputs = AccountingInputs(irf, 75.0, measure_frame(series), window=25)
        path = counterfactual_path(inputs, "A").set_index("year")
        assert path.loc[2025, "dy_geo"] == pytest.approx(1.0)
        assert path.loc[2026, "dy_geo"] == 0.0

    def test_missing_years_flagged_as_zero_gap(self):
        series = {
            "A": {2000: 0.3, 2002: 0.3},
            "B": {2000: 0.1, 2001: 0.1, 2002: 0.1},
        }
        inputs = AccountingInputs(impulse(5), 75.0, measure_frame(series), window=3)
        path = counterfactual_path(inputs, "A").set_index("year")
        assert path.loc[2001, "flags"] == 1
        assert path.loc[2001, "dy_geo"] == 0.0  # impulse response sees only the gap at t

    def test_unknown_country(self):
        inputs = AccountingInputs(impulse(5), 75.0, measure_frame({"A": {2000: 0.1}}))
        with pytest.raises(DataError):
            counterfactual_path(inputs, "ZZZ")

    def test_linear_in_gaps(self):
        rng = np.random.default_rng(51)
        base = {y: 0.0 for y in range(1990, 2000)}
        a = {y: float(rng.normal()) for y in range(1990, 2000)}
        doubled = {y: 2.0 * v for y, v in a.items()}
        irf = rng.uniform(0, 1, size=10)
        # median over B and C stays zero because they bracket symmetrically
        series = {"A": a, "B": base, "C": base}
        inputs = AccountingInputs(irf, 75.0, measure_frame(series), window=9)
        one = counterfactual_path(inputs, "A")["dy_geo"].to_numpy()
        series2 = {"A": doubled, "B": base, "C": base}
        inputs2 = AccountingInputs(irf, 75.0, measure_frame(series2), window=9)
        two = counterfactual_path(inputs2, "A")["dy_geo"].to_numpy()
        assert np.allclose(two, 2.0 * one, atol=1e-12)

    def test_shift_invariance(self):
        rng = np.random.default_rng(52)
        series = {
            c: {y: float(rng.normal()) for y in range(1990, 2000)}
            for c in ("A", "B", "C")
        }
        shifted = {
            c: {y: v + 0.37 for y, v in years.items()} for c, years in series.items()
        }
        irf = rng.uniform(0, 1, size=10)
        inputs = AccountingInputs(irf, 75.0, measure_frame(series), window=9)
        inputs_shifted = AccountingInputs(irf, 75.0, measure_frame(shifted), window=9)
        a = counterfactual_path(inputs, "A")["dy_geo"].to_numpy()
        b = counterfactual_path(inputs_shifted, "A")["dy_geo"].to_numpy()
        assert np.abs(a - b).max() < 1e-12

    def test_monotone_in_window_for_nonnegative_gaps(self):
        series = {
            "A": {y: 0.5 for y in range(1990, 2010)},
            "B": {y: 0.1 for y in range(1990, 2010)},
        }
        irf = np.ones(30)
        short = AccountingInputs(irf, 75.0, measure_frame(series), window=5)
        long = AccountingInputs(irf, 75.0, measure_frame(series), window=15)
        a = counterfactual_path(short, "A").set_index("year")["dy_geo"]
        b = counterfactual_path(long, "A").set_index("year")["dy_geo"]
        assert (b >= a - 1e-12).all()

    def test_pct_conversion(self):
        series = {
            "A": {y: 0.30 for y in range(1990, 1995)},
            "B": {y: 0.10 for y in range(1990, 1995)},
        }
        irf = np.full(5, 50.0)  # log points x100 units
        inputs = AccountingInputs(irf, 75.0, measure_frame(series), window=4)
        path = counterfactual_path(inputs, "A").set_index("year")
        dy = path.loc[1994, "dy_geo"]
        assert path.loc[1994, "pct"] == pytest.approx(100.0 * (np.exp(dy / 100.0) - 1.0))


def test_steady_state_anchors():
    # Headline arithmetic identities: 0.128 x 75 = 9.6 and 0.128 x 105 = 13.44.
    assert steady_state_effect(75.0, 0.128) == pytest.approx(9.6, abs=1e-12)
    assert steady_state_effect(105.0, 0.128) == pytest.approx(13.44, abs=1e-12)


def test_window_must_be_positive():
    with pytest.raises(DataError):
        AccountingInputs(impulse(5), 75.0, measure_frame({"A": {2000: 0.1}}), window=0)
