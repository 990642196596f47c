"""Bilateral relation scores and country-level indices.

For each unordered country pair, events in a year average to a score in
[-1, 1] (Goldstein / 10). The pair's dynamic score is an event-count-weighted
moving average of those yearly scores:

    N_t   = (1 - delta) * N_{t-1} + n_t
    phi_t = n_t / N_t
    S_t   = (1 - phi_t) * S_{t-1} + phi_t * s_t

Years without events carry S forward (phi = 0); by default N keeps decaying so
the next batch of events gets the weight its recency deserves. Country indices
weight each partner's score by the partner's share of world GDP.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError, DataError
from .events import EventFilter, EventRecord, filter_events

DEFAULT_DELTA = 0.3


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class YearlyPairScore:
    """Average event score for one pair-year with at least one event."""

    pair: tuple[str, str]
    year: int
    s_tilde: float
    n_tilde: int


@dataclass(frozen=True)
class DynamicPairScore:
    """Smoothed relation state for one pair-year."""

    pair: tuple[str, str]
    year: int
    s: float
    n_effective: float
    phi: float
    delta: float


class MeasureKind(Enum):
    DYNAMIC_RELATION = "dynamic_relation"
    YEARLY_EVENT_SCORE = "yearly_event_score"
    INSTRUMENT = "instrument"
    SANCTIONS_EXPOSURE = "sanctions_exposure"
    EXTERNAL = "external"


@dataclass(frozen=True)
class MeasureSeries:
    country: str
    year: int
    value: float
    kind: MeasureKind


class WeightTable:
    """Per-year GDP shares of the major nations, each in [0, 1], summing to at most 1."""

    def __init__(self, shares: Mapping[int, Mapping[str, float]]):
        self.shares = {int(y): dict(row) for y, row in shares.items()}
        for year, row in self.shares.items():
            total = 0.0
            for country, w in row.items():
                if not 0.0 <= w <= 1.0:
                    raise ConfigError(f"weight out of [0, 1] for {country} in {year}: {w}")
                total += w
            if total > 1.0 + 1e-6:
                raise ConfigError(f"weights for {year} sum to {total:.6f} > 1")

    def share(self, year: int, country: str) -> float | None:
        return self.shares.get(year, {}).get(country)

    @classmethod
    def from_records(cls, rows: Iterable[tuple[int, str, float]]) -> "WeightTable":
        shares: dict[int, dict[str, float]] = defaultdict(dict)
        for year, country, w in rows:
            shares[int(year)][str(country)] = float(w)
        return cls(shares)

    @classmethod
    def from_csv(cls, path: str | Path) -> "WeightTable":
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            required = {"year", "country", "share"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise DataError(f"weights CSV must have columns {sorted(required)}")
            return cls.from_records(
                (int(row["year"]), row["country"], float(row["share"])) for row in reader
            )


def yearly_pair_scores(events: Iterable[EventRecord]) -> list[YearlyPairScore]:
    """One score per (unordered pair, year) with events: mean Goldstein / 10."""
    sums: dict[tuple[tuple[str, str], int], list[float]] = defaultdict(lambda: [0.0, 0])
    for event in events:
        cell = sums[(pair_key(event.country1, event.country2), event.year)]
        cell[0] += event.goldstein
        cell[1] += 1
    return [
        YearlyPairScore(pair=pair, year=year, s_tilde=(total / count) / 10.0, n_tilde=count)
        for (pair, year), (total, count) in sorted(sums.items())
    ]


def update_dynamic_score(
    prev: DynamicPairScore,
    yearly: YearlyPairScore | None,
    *,
    decay_empty: bool = True,
) -> DynamicPairScore:
    """Advance the pair state one year, with or without new events.

    No events: the score carries forward unchanged and, unless ``decay_empty``
    is off, the effective count keeps depreciating. With events the count
    recursion gives the update weight phi = n / N, so a year's events move the
    score toward that year's average in proportion to how much of the
    effective history they represent.
    """
    delta = prev.delta
    if yearly is None:
        n_eff = (1.0 - delta) * prev.n_effective if decay_empty else prev.n_effective
        return DynamicPairScore(prev.pair, prev.year + 1, prev.s, n_eff, 0.0, delta)
    if yearly.year != prev.year + 1:
        raise DataError(
            f"yearly score for {yearly.pair} is for {yearly.year}, expected {prev.year + 1}"
        )
    if yearly.n_tilde <= 0:
        raise DataError("yearly score with zero events cannot update the state")
    n_eff = (1.0 - delta) * prev.n_effective + yearly.n_tilde
    phi = yearly.n_tilde / n_eff
    s = (1.0 - phi) * prev.s + phi * yearly.s_tilde
    return DynamicPairScore(prev.pair, yearly.year, s, n_eff, phi, delta)


def dynamic_pair_series(
    yearly: Iterable[YearlyPairScore],
    *,
    delta: float = DEFAULT_DELTA,
    decay_empty: bool = True,
    through_year: int | None = None,
) -> list[DynamicPairScore]:
    """Run the recursion per pair from its first event year onward.

    The first event year initializes the state with full weight on the data
    (phi = 1). Pairs carry forward through ``through_year`` (default: the last
    event year seen anywhere) so score histories stay alive in later indices.
    Pairs with no events never emit rows.
    """
    if not 0.0 < delta <= 1.0:
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    by_pair: dict[tuple[str, str], dict[int, YearlyPairScore]] = defaultdict(dict)
    last_year = None
    for score in yearly:
        by_pair[score.pair][score.year] = score
        last_year = score.year if last_year is None else max(last_year, score.year)
    if last_year is None:
        return []
    end_year = last_year if through_year is None else through_year
    out: list[DynamicPairScore] = []
    for pair in sorted(by_pair):
        years = by_pair[pair]
        first = min(years)
        # Zero state ahead of the first event year; the first update lands at phi = 1.
        state = DynamicPairScore(pair, first - 1, 0.0, 0.0, 0.0, delta)
        for year in range(first, end_year + 1):
            state = update_dynamic_score(state, years.get(year), decay_empty=decay_empty)
            out.append(state)
    return out


def _aggregate(
    scores: Iterable[tuple[tuple[str, str], int, float]],
    weights: WeightTable,
    majors: frozenset[str] | set[str],
    kind: MeasureKind,
) -> list[MeasureSeries]:
    totals: dict[tuple[str, int], float] = defaultdict(float)
    for pair, year, value in scores:
        a, b = pair
        for country, partner in ((a, b), (b, a)):
            if partner not in majors:
                continue
            w = weights.share(year, partner)
            if w is None:
                raise ConfigError(f"no GDP share for major nation {partner} in {year}")
            totals[(country, year)] += value * w
    return [
        MeasureSeries(country=c, year=y, value=v, kind=kind)
        for (c, y), v in sorted(totals.items())
    ]


def aggregate_country(
    pair_scores: Iterable[DynamicPairScore],
    weights: WeightTable,
    majors: Iterable[str],
) -> list[MeasureSeries]:
    """GDP-weighted average of dynamic scores against major-nation partners.

    A country's own weight never enters its index (partners only), and weights
    are used as-is, without renormalizing to sum to one.
    """
    majors = frozenset(majors)
    return _aggregate(
        ((s.pair, s.year, s.s) for s in pair_scores), weights, majors, MeasureKind.DYNAMIC_RELATION
    )


def aggregate_yearly(
    yearly: Iterable[YearlyPairScore],
    weights: WeightTable,
    majors: Iterable[str],
) -> list[MeasureSeries]:
    """Unsmoothed variant: aggregate the raw yearly scores (pairs without events skipped)."""
    majors = frozenset(majors)
    return _aggregate(
        ((s.pair, s.year, s.s_tilde) for s in yearly),
        weights,
        majors,
        MeasureKind.YEARLY_EVENT_SCORE,
    )


def build_instrument(
    events: Iterable[EventRecord],
    weights: WeightTable,
    majors: Iterable[str],
    flt: EventFilter | None = None,
) -> list[MeasureSeries]:
    """Index built from the non-economic mild-conflict event subset only.

    Pair-years with no qualifying events contribute nothing (skip, not zero).
    """
    flt = flt if flt is not None else EventFilter.mild_conflict_instrument()
    subset = filter_events(list(events), flt)
    yearly = yearly_pair_scores(subset)
    majors = frozenset(majors)
    return _aggregate(
        ((s.pair, s.year, s.s_tilde) for s in yearly), weights, majors, MeasureKind.INSTRUMENT
    )


@dataclass(frozen=True)
class SanctionFlag:
    major: str
    country: str
    year: int
    indicator: int


def build_sanctions_measure(
    flags: Iterable[SanctionFlag | tuple],
    weights: WeightTable,
) -> list[MeasureSeries]:
    """Exposure index: sum of sanctioning majors' GDP shares per country-year."""
    totals: dict[tuple[str, int], float] = defaultdict(float)
    for flag in flags:
        if not isinstance(flag, SanctionFlag):
            flag = SanctionFlag(*flag)
        if flag.indicator not in (0, 1):
            raise DataError(f"sanction indicator must be 0 or 1, got {flag.indicator}")
        totals.setdefault((flag.country, flag.year), 0.0)
        if flag.indicator == 0:
            continue
        w = weights.share(flag.year, flag.major)
        if w is None:
            raise ConfigError(f"no GDP share for major nation {flag.major} in {flag.year}")
        totals[(flag.country, flag.year)] += w
    return [
        MeasureSeries(country=c, year=y, value=v, kind=MeasureKind.SANCTIONS_EXPOSURE)
        for (c, y), v in sorted(totals.items())
    ]


def measures_to_csv(measures: Iterable[MeasureSeries], path: str | Path) -> None:
    """Write measures ordered by country, year, kind."""
    rows = sorted(measures, key=lambda m: (m.country, m.year, m.kind.value))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["country", "year", "kind", "value"])
        for m in rows:
            writer.writerow([m.country, m.year, m.kind.value, repr(m.value)])


def measures_from_csv(path: str | Path) -> list[MeasureSeries]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        out = []
        for row in reader:
            out.append(
                MeasureSeries(
                    country=row["country"],
                    year=int(row["year"]),
                    value=float(row["value"]),
                    kind=MeasureKind(row["kind"]),
                )
            )
    return out
