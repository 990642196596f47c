"""Synthetic data generators used to validate every estimator against known truth.

The panel generator simulates a measure with autoregressive dynamics (plus an
exogenous instrument loading) and an outcome that follows the lag model the
estimators target, with optional country and region-year effects. True
response paths ship with the generated frame so tests never re-derive them.
Innovations are independent of everything dated earlier by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from .dyn import ArdlIrf, ardl_irf, lag_polynomial_stable
from .errors import ConfigError
from .events import EconomicClass, EventRecord, QuadClass
from .panel import PanelFrame
from .relations import WeightTable
from .rng import substream

# Substream layout for panel generation: 0 region-year effects, 1 reserved,
# 2 + c for country c. Event generation uses 2 + pair index.
_STREAM_SHARED = 0
_STREAM_COUNTRY_BASE = 2


@dataclass(frozen=True)
class DgpSpec:
    n_countries: int
    n_years: int
    alpha: float
    beta: tuple[float, ...] = ()
    gamma: tuple[float, ...] = ()
    measure_ar: tuple[float, ...] = ()
    measure_scale: float = 1.0
    noise_scale: float = 1.0
    country_effect_scale: float = 0.0
    region_year_effect_scale: float = 0.0
    instrument_loading: float = 0.0
    instrument_scale: float = 1.0
    n_regions: int = 1
    start_year: int = 1960
    burn_in: int = 50
    seed: int = 0
    allow_unstable: bool = False

    def __post_init__(self):
        if self.n_countries < 1 or self.n_years < 1:
            raise ConfigError("need at least one country and one year")
        if len(self.beta) != len(self.gamma):
            raise ConfigError("beta and gamma must have the same length")
        if not self.allow_unstable:
            if not lag_polynomial_stable(self.beta):
                raise ConfigError("outcome lag polynomial is unstable")
            if not lag_polynomial_stable(self.measure_ar):
                raise ConfigError("measure AR polynomial is unstable")


@dataclass(frozen=True)
class GroundTruth:
    """True response paths implied by the generating parameters."""

    transitory: ArdlIrf
    measure_own_irf: np.ndarray
    lp_irf: np.ndarray  # response to a measure innovation, own dynamics included
    alpha: float
    beta: tuple[float, ...]
    gamma: tuple[float, ...]
    instrument_loading: float


def _measure_own_irf(ar: Sequence[float], horizon: int) -> np.ndarray:
    ar = np.asarray(ar, dtype=float)
    q = np.zeros(horizon + 1)
    q[0] = 1.0
    for k in range(1, horizon + 1):
        m = min(k, ar.size)
        if m:
            q[k] = float(ar[:m] @ q[k - m : k][::-1])
    return q


def ground_truth(spec: DgpSpec, horizon: int = 50) -> GroundTruth:
    transitory = ardl_irf(spec.alpha, spec.beta, spec.gamma, horizon)
    q = _measure_own_irf(spec.measure_ar, horizon)
    lp_irf = np.convolve(q, transitory.phi)[: horizon + 1]
    return GroundTruth(
        transitory=transitory,
        measure_own_irf=q,
        lp_irf=lp_irf,
        alpha=spec.alpha,
        beta=spec.beta,
        gamma=spec.gamma,
        instrument_loading=spec.instrument_loading,
    )


def generate_panel(spec: DgpSpec, *, horizon: int = 50) -> tuple[PanelFrame, GroundTruth]:
    """Simulate the panel; deterministic in the seed, per-country substreams."""
    J = len(spec.beta)
    P = len(spec.measure_ar)
    total = spec.burn_in + spec.n_years
    shared = substream(spec.seed, _STREAM_SHARED)
    region_year = spec.region_year_effect_scale * shared.standard_normal(
        (spec.n_regions, total)
    )
    frames = []
    for c in range(spec.n_countries):
        rng = substream(spec.seed, _STREAM_COUNTRY_BASE + c)
        country_effect = spec.country_effect_scale * rng.standard_normal()
        e_measure = spec.measure_scale * rng.standard_normal(total)
        z = spec.instrument_scale * rng.standard_normal(total)
        e_outcome = spec.noise_scale * rng.standard_normal(total)
        region = c % spec.n_regions
        p = np.zeros(total)
        y = np.zeros(total)
        for t in range(total):
            ar_part = sum(
                spec.measure_ar[k] * p[t - 1 - k] for k in range(min(P, t))
            )
            p[t] = ar_part + spec.instrument_loading * z[t] + e_measure[t]
            lag_y = sum(spec.beta[k] * y[t - 1 - k] for k in range(min(J, t)))
            lag_p = sum(spec.gamma[k] * p[t - 1 - k] for k in range(min(J, t)))
            y[t] = (
                spec.alpha * p[t]
                + lag_y
                + lag_p
                + country_effect
                + region_year[region, t]
                + e_outcome[t]
            )
        keep = slice(spec.burn_in, total)
        years = np.arange(spec.start_year, spec.start_year + spec.n_years)
        frames.append(
            pd.DataFrame(
                {
                    "country": f"C{c:03d}",
                    "year": years,
                    "region": f"R{region}",
                    "y": y[keep],
                    "p": p[keep],
                    "z": z[keep],
                }
            )
        )
    df = pd.concat(frames, ignore_index=True)
    df["region_year"] = df["region"] + ":" + df["year"].astype(str)
    return PanelFrame.from_frame(df), ground_truth(spec, horizon=horizon)


# CAMEO-style root code families for synthetic events: representative verbal /
# material cooperation roots (1-8) and conflict roots (9-20).
_COOPERATION_ROOTS = (
    (1, QuadClass.VERBAL_COOPERATION),
    (4, QuadClass.VERBAL_COOPERATION),
    (5, QuadClass.MATERIAL_COOPERATION),
    (6, QuadClass.MATERIAL_COOPERATION),
    (7, QuadClass.MATERIAL_COOPERATION),
)
_CONFLICT_ROOTS = (
    (9, QuadClass.VERBAL_CONFLICT),
    (11, QuadClass.VERBAL_CONFLICT),
    (13, QuadClass.VERBAL_CONFLICT),
    (16, QuadClass.MATERIAL_CONFLICT),
    (17, QuadClass.MATERIAL_CONFLICT),
)
_ECON_CLASSES = tuple(EconomicClass)


@dataclass(frozen=True)
class EventDgpSpec:
    countries: tuple[str, ...]
    majors: tuple[str, ...]
    start_year: int
    end_year: int
    events_per_pair_year: float = 2.0
    goldstein_mean: float = 3.0
    goldstein_sd: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.events_per_pair_year < 0:
            raise ConfigError("event rate must be nonnegative")
        if self.end_year < self.start_year:
            raise ConfigError("end_year before start_year")
        if not self.majors:
            raise ConfigError("need at least one major nation")


def _synthetic_event(rng: np.random.Generator, a: str, b: str, year: int, k: int, spec: EventDgpSpec) -> EventRecord:
    goldstein = float(np.clip(rng.normal(spec.goldstein_mean, spec.goldstein_sd), -10.0, 10.0))
    roots = _COOPERATION_ROOTS if goldstein >= 0 else _CONFLICT_ROOTS
    root, quad = roots[rng.integers(0, len(roots))]
    event_code = root * 10 + int(rng.integers(0, 6))
    econ = _ECON_CLASSES[rng.integers(0, len(_ECON_CLASSES))]
    return EventRecord(
        year=year,
        country1=a,
        country2=b,
        event_name=f"synthetic event {a}-{b}-{year}-{k}",
        event_description="generated for pipeline validation",
        quad_class=quad,
        root_code=root,
        event_code=event_code,
        economic_class=econ,
        goldstein=goldstein,
        relationship="Selective Cooperation / Transactional Relationship",
    )


def generate_events(spec: EventDgpSpec) -> list[EventRecord]:
    """Poisson event streams for every pair involving a major nation."""
    majors = set(spec.majors)
    everyone = sorted(set(spec.countries) | majors)
    pairs = [
        (a, b)
        for i, a in enumerate(everyone)
        for b in everyone[i + 1 :]
        if a in majors or b in majors
    ]
    events: list[EventRecord] = []
    for idx, (a, b) in enumerate(pairs):
        rng = substream(spec.seed, _STREAM_COUNTRY_BASE + idx)
        for year in range(spec.start_year, spec.end_year + 1):
            n = int(rng.poisson(spec.events_per_pair_year))
            for k in range(n):
                events.append(_synthetic_event(rng, a, b, year, k, spec))
    return events


def equal_weight_table(
    majors: Sequence[str], years: Sequence[int], total_share: float = 0.9
) -> WeightTable:
    """Constant equal GDP shares for the majors, summing to ``total_share``."""
    share = total_share / len(majors)
    return WeightTable.from_records(
        (year, major, share) for year in years for major in majors
    )
