import numpy as np
import pandas as pd
import pytest

from geogrowth.errors import ConvergenceError, DataError, MissingColumnError
from geogrowth.panel import (
    LagSpec,
    PanelFrame,
    balanced_subset,
    build_shifts,
    composite_key,
    demean,
    demean_matrix,
    shifted_values,
)


def frame_from_rows(rows, columns=("country", "year", "x")):
    return PanelFrame.from_frame(pd.DataFrame(rows, columns=list(columns)))


def dummy_residuals(df, column, groups):
    """Oracle: residuals from dense least squares on group dummy variables."""
    dummies = pd.get_dummies(df[list(groups)].astype(str), drop_first=False)
    D = np.column_stack([np.ones(len(df)), dummies.to_numpy(dtype=float)])
    y = df[column].to_numpy(dtype=float)
    beta, *_ = np.linalg.lstsq(D, y, rcond=None)
    return y - D @ beta


class TestPanelFrame:
    def test_duplicate_key_rejected(self):
        with pytest.raises(DataError, match="duplicate"):
            frame_from_rows([("A", 2000, 1.0), ("A", 2000, 2.0)])

    def test_missing_key_column(self):
        with pytest.raises(MissingColumnError):
            PanelFrame.from_frame(pd.DataFrame({"country": ["A"], "x": [1.0]}))

    def test_non_integral_year_rejected(self):
        with pytest.raises(DataError, match="integral"):
            frame_from_rows([("A", 2000.5, 1.0)])

    def test_rows_sorted_canonically(self):
        frame = frame_from_rows([("B", 2001, 1.0), ("A", 2003, 2.0), ("A", 2001, 3.0)])
        assert frame.data["country"].tolist() == ["A", "A", "B"]
        assert frame.data["year"].tolist() == [2001, 2003, 2001]


class TestShifts:
    def test_lag_boundary(self):
        frame = frame_from_rows([("A", y, float(y)) for y in range(2000, 2004)])
        out = build_shifts(frame, LagSpec("x", lags=(1,)))
        col = out.data["x_lag1"]
        assert np.isnan(col.iloc[0])
        assert col.iloc[1:].tolist() == [2000.0, 2001.0, 2002.0]

    def test_gap_year_yields_missing_not_stale(self):
        frame = frame_from_rows(
            [("A", 2000, 1.0), ("A", 2002, 3.0), ("A", 2003, 4.0), ("A", 2004, 5.0)]
        )
        out = build_shifts(frame, LagSpec("x", lags=(1,)))
        by_year = dict(zip(out.data["year"], out.data["x_lag1"]))
        assert np.isnan(by_year[2002])  # 2001 absent; must not pick up 2000
        assert by_year[2003] == 3.0

    def test_lead_zero_is_identity(self):
        frame = frame_from_rows([("A", y, float(y) * 2) for y in range(2000, 2004)])
        out = build_shifts(frame, LagSpec("x", leads=(0,)))
        assert out.data["x_lead0"].tolist() == out.data["x"].tolist()

    def test_no_cross_country_leakage(self):
        frame = frame_from_rows([("A", 2000, 1.0), ("B", 2001, 9.0)])
        out = build_shifts(frame, LagSpec("x", lags=(1,)))
        assert out.data["x_lag1"].isna().all()

    def test_negative_offset_via_shifted_values(self):
        frame = frame_from_rows([("A", y, float(y)) for y in range(2000, 2005)])
        past = shifted_values(frame, "x", -2)  # value at t-2
        assert past.iloc[2] == 2000.0

    def test_unknown_variable(self):
        frame = frame_from_rows([("A", 2000, 1.0)])
        with pytest.raises(MissingColumnError):
            build_shifts(frame, LagSpec("nope", lags=(1,)))

    def test_bad_lag_spec(self):
        with pytest.raises(ValueError):
            LagSpec("x", lags=(0,))
        with pytest.raises(ValueError):
            LagSpec("x", leads=(-1,))

    def test_shift_then_complete_commutes_on_gap_free_data(self):
        rng = np.random.default_rng(0)
        rows = [("A", y, float(v)) for y, v in zip(range(2000, 2010), rng.normal(size=10))]
        rows += [("B", y, float(v)) for y, v in zip(range(2000, 2010), rng.normal(size=10))]
        frame = frame_from_rows(rows)
        shifted = build_shifts(frame, LagSpec("x", lags=(2,)))
        complete_then = shifted.data.dropna()
        # restrict first to years where the lag exists, then shift
        restricted = PanelFrame.from_frame(frame.data[frame.data["year"] >= 2000])
        then_shifted = build_shifts(restricted, LagSpec("x", lags=(2,))).data.dropna()
        pd.testing.assert_frame_equal(
            complete_then.reset_index(drop=True), then_shifted.reset_index(drop=True)
        )


class TestDemean:
    def test_single_group_exact(self):
        rng = np.random.default_rng(1)
        rows = [("A", y, v) for y, v in zip(range(2000, 2010), rng.normal(size=10))]
        rows += [("B", y, v) for y, v in zip(range(2000, 2010), rng.normal(size=10))]
        frame = frame_from_rows(rows)
        out = demean(frame, ["x"], ["country"])
        means = out.data.groupby("country")["x"].mean()
        assert np.abs(means).max() < 1e-12

    def test_constant_column_goes_to_zero(self):
        rows = [("A", y, 5.0) for y in range(2000, 2005)] + [
            ("B", y, 5.0) for y in range(2000, 2005)
        ]
        frame = frame_from_rows(rows)
        out = demean(frame, ["x"], ["country"])
        assert np.abs(out.data["x"]).max() < 1e-12

    @pytest.mark.parametrize("n_countries,n_years", [(3, 3), (10, 20)])
    def test_two_way_matches_dense_dummy_regression(self, n_countries, n_years):
        rng = np.random.default_rng(n_countries)
        rows = []
        for c in range(n_countries):
            for y in range(2000, 2000 + n_years):
                rows.append((f"C{c}", y, rng.normal()))
        frame = frame_from_rows(rows)
        out = demean(frame, ["x"], ["country", "year"], tol=1e-12)
        oracle = dummy_residuals(frame.data, "x", ["country", "year"])
        assert np.abs(out.data["x"].to_numpy() - oracle).max() < 1e-10

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        rows = [(f"C{c}", y, rng.normal()) for c in range(4) for y in range(2000, 2008)]
        frame = frame_from_rows(rows)
        once = demean(frame, ["x"], ["country", "year"])
        twice = demean(once, ["x"], ["country", "year"])
        assert np.abs(once.data["x"] - twice.data["x"]).max() < 1e-10

    def test_linear(self):
        rng = np.random.default_rng(3)
        df = pd.DataFrame(
            {
                "country": [f"C{c}" for c in range(5) for _ in range(6)],
                "year": list(range(2000, 2006)) * 5,
                "x": rng.normal(size=30),
                "z": rng.normal(size=30),
            }
        )
        frame = PanelFrame.from_frame(df)
        combo = frame.data.assign(w=2.0 * frame.data["x"] - 3.0 * frame.data["z"])
        out = demean(PanelFrame.from_frame(combo), ["x", "z", "w"], ["country", "year"])
        lhs = out.data["w"].to_numpy()
        rhs = 2.0 * out.data["x"].to_numpy() - 3.0 * out.data["z"].to_numpy()
        assert np.abs(lhs - rhs).max() < 1e-10

    def test_nan_rows_rejected(self):
        frame = frame_from_rows([("A", 2000, np.nan), ("A", 2001, 1.0)])
        with pytest.raises(DataError, match="complete"):
            demean(frame, ["x"], ["country"])

    def test_non_convergence_reports_worst_mean(self):
        # Unbalanced coverage makes the two factors non-orthogonal, so one
        # sweep cannot zero both sets of group means.
        rng = np.random.default_rng(4)
        rows = [
            (f"C{c}", y, rng.normal())
            for c in range(6)
            for y in range(2000, 2003 + c)
        ]
        frame = frame_from_rows(rows)
        with pytest.raises(ConvergenceError) as err:
            demean(frame, ["x"], ["country", "year"], tol=1e-14, max_iter=1)
        assert err.value.worst > 0
        # and the same data converges with the default budget
        demean(frame, ["x"], ["country", "year"])

    def test_empty_groups_rejected(self):
        with pytest.raises(DataError):
            demean_matrix(np.ones((4, 1)), [])


class TestBalancedSubset:
    def test_all_complete_identity(self):
        rows = [(c, y, 1.0) for c in ("A", "B") for y in range(2000, 2010)]
        frame = frame_from_rows(rows)
        out = balanced_subset(frame, ["x"], (0, 2))
        pd.testing.assert_frame_equal(out.data, frame.data)

    def test_one_missing_cell_drops_country(self):
        rows = [("A", y, 1.0) for y in range(2000, 2010)]
        rows += [("B", y, 1.0 if y != 2007 else np.nan) for y in range(2000, 2010)]
        frame = frame_from_rows(rows)
        out = balanced_subset(frame, ["x"], (0, 2))
        assert out.data["country"].unique().tolist() == ["A"]

    def test_staggered_coverage_hand_enumeration(self):
        # Panel span 2000-2009. Countries:
        #   A complete 2000-2009                      -> kept
        #   B missing the 2009 row                    -> dropped
        #   C starts 2001                             -> dropped
        #   D complete but x missing at 2004          -> dropped
        #   E complete 2000-2009                      -> kept
        rows = [("A", y, 1.0) for y in range(2000, 2010)]
        rows += [("B", y, 1.0) for y in range(2000, 2009)]
        rows += [("C", y, 1.0) for y in range(2001, 2010)]
        rows += [("D", y, np.nan if y == 2004 else 1.0) for y in range(2000, 2010)]
        rows += [("E", y, 1.0) for y in range(2000, 2010)]
        frame = frame_from_rows(rows)
        out = balanced_subset(frame, ["x"], (-2, 3))
        assert sorted(out.data["country"].unique()) == ["A", "E"]

    def test_window_longer_than_span_errors(self):
        rows = [("A", y, 1.0) for y in range(2000, 2004)]
        with pytest.raises(DataError, match="span"):
            balanced_subset(frame_from_rows(rows), ["x"], (-10, 10))


def test_composite_key():
    frame = frame_from_rows(
        [("A", 2000, 1.0, "EU"), ("B", 2000, 2.0, "AS")],
        columns=("country", "year", "x", "region"),
    )
    out = composite_key(frame, ["region", "year"], name="region_year")
    assert out.data["region_year"].tolist() == ["EU:2000", "AS:2000"]
