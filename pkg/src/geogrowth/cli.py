"""Command-line front end: ingestion -> measures -> panel -> estimation -> accounting.

Configuration comes from a JSON file; any command-line flag overrides the file,
which overrides built-in defaults. Each command writes its results plus a
manifest (config hash, seed, library versions, per-horizon sample sizes) into
the output directory. Exit codes: 1 configuration, 2 data, 3 numerical.
"""

from __future__ import annotations

import hashlib
import json
import sys
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import click
import numpy as np
import pandas as pd

from . import __version__, account, dyn, infer, iv, lp, relations, sim
from .errors import ConfigError, DataError, GeogrowthError, NumericalError
from .events import EventFilter, parse_events, serialize_events, write_rejection_report
from .panel import LagSpec, PanelFrame, balanced_subset, build_shifts, composite_key
from .relations import MeasureKind, WeightTable

DEFAULT_CONFIG: dict[str, Any] = {
    "events": None,
    "weights": None,
    "panel": None,
    "sanctions": None,
    "output_dir": "out",
    "seed": 0,
    "threads": 1,
    "strict_events": True,
    "measure": {
        "delta": 0.3,
        "majors": [],
        "decay_empty_years": True,
        "through_year": None,
        "instrument": {"root_lo": 9, "root_hi": 18, "goldstein_max": 0.0},
        "columns": {
            "dynamic_relation": "relation",
            "yearly_event_score": "relation_yearly",
            "instrument": "relation_instrument",
            "sanctions_exposure": "sanctions",
        },
    },
    "estimation": {
        "outcome": "y",
        "measure": "p",
        "instrument": "z",
        "lags": 4,
        "horizons": [0, 10],
        "groups": ["country", "region_year"],
        "hac_bandwidth": "auto",
        "controls": None,
        "balanced": False,
    },
    "bootstrap": {"scheme": "country_block", "replications": 200, "target": "lp", "seed": None},
    "decompose": {"own_horizon": 30},
    "account": {"window": 25, "decades": None, "permanent_horizon": 25},
    "simulate": {
        "n_countries": 10,
        "n_years": 40,
        "alpha": 2.0,
        "beta": [0.5],
        "gamma": [0.2],
        "measure_ar": [0.5],
        "noise_scale": 0.5,
        "country_effect_scale": 1.0,
        "region_year_effect_scale": 0.5,
        "instrument_loading": 0.5,
        "n_regions": 3,
        "start_year": 1980,
        "events": {
            "n_countries": 4,
            "n_majors": 3,
            "events_per_pair_year": 3.0,
            "goldstein_mean": 3.0,
            "goldstein_sd": 3.0,
        },
    },
    "stats": {"kind": "dynamic_relation"},
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        elif value is not None:
            out[key] = value
    return out


@dataclass
class RunConfig:
    raw: dict[str, Any] = field(default_factory=lambda: dict(DEFAULT_CONFIG))

    @classmethod
    def load(cls, path: str | None, overrides: dict[str, Any]) -> "RunConfig":
        merged = dict(DEFAULT_CONFIG)
        if path is not None:
            try:
                file_cfg = json.loads(Path(path).read_text(encoding="utf-8"))
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {path}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
            merged = _merge(merged, file_cfg)
        merged = _merge(merged, overrides)
        cfg = cls(merged)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        delta = self.raw["measure"]["delta"]
        if not 0.0 < delta <= 1.0:
            raise ConfigError(f"delta must lie in (0, 1], got {delta}")
        horizons = self.raw["estimation"]["horizons"]
        if len(horizons) != 2 or horizons[0] > horizons[1]:
            raise ConfigError(f"horizons must be [lo, hi] with lo <= hi, got {horizons}")

    def path(self, key: str) -> Path:
        value = self.raw.get(key)
        if value is None:
            raise ConfigError(f"config is missing required input path: {key}")
        p = Path(value)
        if not p.exists():
            raise ConfigError(f"input path does not exist: {p}")
        return p

    def out_dir(self) -> Path:
        out = Path(self.raw["output_dir"])
        out.mkdir(parents=True, exist_ok=True)
        return out

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_manifest(cfg: RunConfig, command: str, samples: dict | None = None) -> Path:
    manifest = {
        "command": command,
        "config_hash": cfg.config_hash(),
        "seed": cfg.raw["seed"],
        "versions": {
            "geogrowth": __version__,
            "numpy": np.__version__,
            "pandas": pd.__version__,
        },
        "samples": samples or {},
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    path = cfg.out_dir() / f"manifest_{command}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _instrument_filter(cfg: RunConfig) -> EventFilter:
    icfg = cfg.raw["measure"]["instrument"]
    base = EventFilter.mild_conflict_instrument()
    return EventFilter(
        root_code_range=(icfg.get("root_lo", 9), icfg.get("root_hi", 18)),
        economic_classes=base.economic_classes,
        goldstein_max=icfg.get("goldstein_max", 0.0),
    )


def _load_measures_panel(cfg: RunConfig) -> PanelFrame:
    frame = PanelFrame.from_csv(cfg.path("panel"))
    if "region" in frame.columns and "region_year" not in frame.columns:
        frame = composite_key(frame, ["region", "year"], name="region_year")
    return frame


def _default_controls(cfg: RunConfig, *, with_instrument: bool = False) -> list[str]:
    est = cfg.raw["estimation"]
    if est.get("controls"):
        return list(est["controls"])
    J = est["lags"]
    names = [est["outcome"], est["measure"]]
    if with_instrument:
        names.append(est["instrument"])
    return [f"{v}_lag{j}" for v in names for j in range(1, J + 1)]


def _build_estimation_frame(cfg: RunConfig, *, with_instrument: bool = False) -> PanelFrame:
    frame = _load_measures_panel(cfg)
    est = cfg.raw["estimation"]
    J = est["lags"]
    for var in {est["outcome"], est["measure"], *([est["instrument"]] if with_instrument else [])}:
        if var in frame.columns:
            frame = build_shifts(frame, LagSpec(var, lags=tuple(range(1, J + 1))))
    return frame


def _echo_done(path: Path) -> None:
    click.echo(f"wrote {path}")


class _ExitCodes:
    CONFIG = 1
    DATA = 2
    NUMERICAL = 3


def _run(command_fn, cfg: RunConfig) -> None:
    try:
        command_fn(cfg)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(_ExitCodes.CONFIG)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(_ExitCodes.DATA)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(_ExitCodes.NUMERICAL)
    except GeogrowthError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_ExitCodes.DATA)


_CONFIG_OPTION = click.option("--config", "config_path", type=str, default=None, help="JSON config file.")
_OUTPUT_OPTION = click.option("--output-dir", type=str, default=None, help="Output directory.")
_SEED_OPTION = click.option("--seed", type=int, default=None, help="Master seed.")
_THREADS_OPTION = click.option("--threads", type=int, default=None, help="Worker cap for resampling.")


def _collect_overrides(**kwargs) -> dict:
    out: dict[str, Any] = {}
    if kwargs.get("output_dir") is not None:
        out["output_dir"] = kwargs["output_dir"]
    if kwargs.get("seed") is not None:
        out["seed"] = kwargs["seed"]
    if kwargs.get("threads") is not None:
        out["threads"] = kwargs["threads"]
    if kwargs.get("delta") is not None:
        out.setdefault("measure", {})["delta"] = kwargs["delta"]
    if kwargs.get("events") is not None:
        out["events"] = kwargs["events"]
    if kwargs.get("weights") is not None:
        out["weights"] = kwargs["weights"]
    if kwargs.get("panel") is not None:
        out["panel"] = kwargs["panel"]
    if kwargs.get("lenient"):
        out["strict_events"] = False
    return out


@click.group()
def main() -> None:
    """Geopolitical relation measurement and growth estimation pipeline."""


@main.command()
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--events", type=str, default=None, help="Event JSONL/JSON path.")
@click.option("--weights", type=str, default=None, help="GDP share CSV path.")
@click.option("--delta", type=float, default=None, help="Depreciation rate in (0, 1].")
@click.option("--lenient", is_flag=True, default=False, help="Collect rejections instead of aborting.")
def scores(config_path, output_dir, events, weights, delta, lenient):
    """Build measure series (relation index, yearly index, instrument, sanctions)."""
    cfg = RunConfig.load(config_path, _collect_overrides(
        output_dir=output_dir, events=events, weights=weights, delta=delta, lenient=lenient
    ))
    _run(_cmd_scores, cfg)


def _cmd_scores(cfg: RunConfig) -> None:
    out = cfg.out_dir()
    parsed = parse_events(cfg.path("events"), strict=cfg.raw["strict_events"])
    if parsed.rejections:
        report = out / "rejections.csv"
        write_rejection_report(parsed.rejections, report)
        click.echo(f"{len(parsed.rejections)} records rejected; see {report}", err=True)
    if not parsed.events:
        warnings.warn("no valid events parsed; measures will be empty")
    weights = WeightTable.from_csv(cfg.path("weights"))
    mcfg = cfg.raw["measure"]
    majors = list(mcfg["majors"]) or sorted(
        {c for year_row in weights.shares.values() for c in year_row}
    )
    yearly = relations.yearly_pair_scores(parsed.events)
    dynamic = relations.dynamic_pair_series(
        yearly,
        delta=mcfg["delta"],
        decay_empty=mcfg["decay_empty_years"],
        through_year=mcfg["through_year"],
    )
    measures = []
    measures += relations.aggregate_country(dynamic, weights, majors)
    measures += relations.aggregate_yearly(yearly, weights, majors)
    instrument_events = [e for e in parsed.events if _instrument_filter(cfg).matches(e)]
    measures += relations.build_instrument(parsed.events, weights, majors, _instrument_filter(cfg))
    if cfg.raw.get("sanctions"):
        flags_df = pd.read_csv(cfg.path("sanctions"))
        flags = [
            relations.SanctionFlag(r["major"], r["country"], int(r["year"]), int(r["indicator"]))
            for _, r in flags_df.iterrows()
        ]
        measures += relations.build_sanctions_measure(flags, weights)
    path = out / "measures.csv"
    relations.measures_to_csv(measures, path)
    canonical = out / "events_validated.jsonl"
    canonical.write_text(serialize_events(parsed.events), encoding="utf-8")
    diagnostics = {
        "events": len(parsed.events),
        "rejected": len(parsed.rejections),
        "duplicates": parsed.duplicate_count,
        "no_event_pair_years": len(parsed.no_event_years),
        "instrument_events": len(instrument_events),
        "instrument_mean_goldstein": (
            float(np.mean([e.goldstein for e in instrument_events]))
            if instrument_events
            else None
        ),
        "measure_rows": len(measures),
    }
    write_manifest(cfg, "scores", diagnostics)
    _echo_done(path)


@main.command("panel")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--panel", type=str, default=None, help="Country-year CSV path.")
@click.option("--measures", "measures_path", type=str, default=None, help="Measures CSV to merge.")
def panel_cmd(config_path, output_dir, panel, measures_path):
    """Assemble the estimation panel: merge measures, build lag columns."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, panel=panel))
    if measures_path is not None:
        cfg.raw["measures_csv"] = measures_path
    _run(_cmd_panel, cfg)


def _cmd_panel(cfg: RunConfig) -> None:
    frame = _load_measures_panel(cfg)
    if cfg.raw.get("measures_csv"):
        measures = relations.measures_from_csv(cfg.raw["measures_csv"])
        columns = cfg.raw["measure"]["columns"]
        table = pd.DataFrame(
            {
                "country": [m.country for m in measures],
                "year": [m.year for m in measures],
                "kind": [m.kind.value for m in measures],
                "value": [m.value for m in measures],
            }
        )
        df = frame.data
        for kind, column in columns.items():
            sub = table[table["kind"] == kind][["country", "year", "value"]]
            if sub.empty:
                continue
            if column in df.columns:  # merged measures replace same-named panel columns
                df = df.drop(columns=[column])
            df = df.merge(sub.rename(columns={"value": column}), on=["country", "year"], how="left")
        frame = PanelFrame.from_frame(df)
    est = cfg.raw["estimation"]
    J = est["lags"]
    for var in (est["outcome"], est["measure"], est["instrument"]):
        if var in frame.columns:
            frame = build_shifts(frame, LagSpec(var, lags=tuple(range(1, J + 1))))
    if est.get("balanced"):
        required = [v for v in (est["outcome"], est["measure"]) if v in frame.columns]
        frame = balanced_subset(frame, required, tuple(est["horizons"]))
    out = cfg.out_dir() / "panel_built.csv"
    frame.to_csv(out)
    write_manifest(
        cfg,
        "panel",
        {
            "rows": len(frame.data),
            "columns": len(frame.columns),
            "countries": int(frame.data["country"].nunique()),
        },
    )
    _echo_done(out)


@main.command("lp")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--panel", type=str, default=None)
def lp_cmd(config_path, output_dir, panel):
    """Per-horizon projections of the outcome on the measure."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, panel=panel))
    _run(_cmd_lp, cfg)


def _cmd_lp(cfg: RunConfig) -> None:
    frame = _build_estimation_frame(cfg)
    est = cfg.raw["estimation"]
    spec = lp.LpSpec(
        outcome=est["outcome"],
        shocks=(est["measure"],),
        controls=tuple(_default_controls(cfg)),
        groups=tuple(est["groups"]),
        horizons=tuple(est["horizons"]),
        hac_bandwidth=est["hac_bandwidth"],
    )
    results = lp.estimate_lp(frame, spec)
    out = cfg.out_dir() / "lp_irf.csv"
    lp.irf_to_csv(results, out)
    samples = {f"h{r.horizon}": {"nobs": r.nobs, "n_countries": r.n_countries} for r in results}
    write_manifest(cfg, "lp", samples)
    _echo_done(out)


@main.command("lpiv")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--panel", type=str, default=None)
def lpiv_cmd(config_path, output_dir, panel):
    """Instrumented projections: reduced form over first stage."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, panel=panel))
    _run(_cmd_lpiv, cfg)


def _cmd_lpiv(cfg: RunConfig) -> None:
    frame = _build_estimation_frame(cfg, with_instrument=True)
    est = cfg.raw["estimation"]
    spec = iv.LpIvSpec(
        outcome=est["outcome"],
        shock=est["measure"],
        instrument=est["instrument"],
        controls=tuple(_default_controls(cfg, with_instrument=True)),
        groups=tuple(est["groups"]),
        horizons=tuple(est["horizons"]),
        hac_bandwidth=est["hac_bandwidth"],
    )
    results = iv.estimate_lp_iv(frame, spec)
    out = cfg.out_dir() / "lpiv.csv"
    iv.lpiv_to_csv(results, out)
    first = iv.first_stage_irf(frame, spec)
    lp.irf_to_csv(first, cfg.out_dir() / "lpiv_first_stage_irf.csv")
    samples = {f"h{r.horizon}": {"nobs": r.nobs, "n_countries": r.n_countries} for r in results}
    write_manifest(cfg, "lpiv", samples)
    _echo_done(out)


@main.command("ardl")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--panel", type=str, default=None)
def ardl_cmd(config_path, output_dir, panel):
    """Dynamic lag-model estimation with the implied response paths."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, panel=panel))
    _run(_cmd_ardl, cfg)


def _cmd_ardl(cfg: RunConfig) -> None:
    frame = _load_measures_panel(cfg)
    est = cfg.raw["estimation"]
    spec = dyn.ArdlSpec(
        outcome=est["outcome"],
        measure=est["measure"],
        lags=est["lags"],
        groups=tuple(est["groups"]),
        hac_bandwidth=est["hac_bandwidth"],
    )
    fit = dyn.estimate_ardl(frame, spec)
    irf = dyn.irf_from_ardl(fit, cfg.raw["decompose"]["own_horizon"])
    params_path = cfg.out_dir() / "ardl_params.csv"
    irf_path = cfg.out_dir() / "ardl_irf.csv"
    dyn.ardl_to_csv(fit, irf, params_path, irf_path)
    write_manifest(
        cfg,
        "ardl",
        {"nobs": fit.nobs, "n_countries": fit.n_countries, "stable": fit.stable,
         "phi_inf": irf.phi_inf if np.isfinite(irf.phi_inf) else None},
    )
    _echo_done(params_path)


@main.command("decompose")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--panel", type=str, default=None)
def decompose_cmd(config_path, output_dir, panel):
    """Transitory/permanent decomposition from projection estimates."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, panel=panel))
    _run(_cmd_decompose, cfg)


def _cmd_decompose(cfg: RunConfig) -> None:
    frame = _build_estimation_frame(cfg)
    est = cfg.raw["estimation"]
    H = cfg.raw["decompose"]["own_horizon"]
    controls = tuple(_default_controls(cfg))
    own_spec = lp.LpSpec(
        outcome=est["measure"],
        shocks=(est["measure"],),
        controls=controls,
        groups=tuple(est["groups"]),
        horizons=(0, H),
        hac_bandwidth=est["hac_bandwidth"],
    )
    outcome_spec = lp.LpSpec(
        outcome=est["outcome"],
        shocks=(est["measure"],),
        controls=controls,
        groups=tuple(est["groups"]),
        horizons=(0, H),
        hac_bandwidth=est["hac_bandwidth"],
    )
    own = lp.irf_path(lp.estimate_lp(frame, own_spec), est["measure"])
    outcome = lp.irf_path(lp.estimate_lp(frame, outcome_spec), est["measure"])
    if own.size != H + 1 or outcome.size != H + 1:
        raise DataError("projection skipped horizons; decomposition needs a full path")
    decomposition = dyn.decompose_response(own, outcome)
    out = cfg.out_dir() / "decomposition.csv"
    decomposition.to_csv(out)
    write_manifest(cfg, "decompose", {"horizon": H})
    _echo_done(out)


@main.command("bootstrap")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@_SEED_OPTION
@_THREADS_OPTION
@click.option("--panel", type=str, default=None)
@click.option("--scheme", type=click.Choice(infer.SCHEMES), default=None)
@click.option("--replications", type=int, default=None)
def bootstrap_cmd(config_path, output_dir, seed, threads, panel, scheme, replications):
    """Resampling intervals for the configured estimator."""
    cfg = RunConfig.load(config_path, _collect_overrides(
        output_dir=output_dir, seed=seed, threads=threads, panel=panel
    ))
    if scheme is not None:
        cfg.raw["bootstrap"]["scheme"] = scheme
    if replications is not None:
        cfg.raw["bootstrap"]["replications"] = replications
    _run(_cmd_bootstrap, cfg)


def _cmd_bootstrap(cfg: RunConfig) -> None:
    bcfg = cfg.raw["bootstrap"]
    est = cfg.raw["estimation"]
    target_kind = bcfg.get("target", "lp")
    with_instrument = target_kind == "lpiv"
    frame = _build_estimation_frame(cfg, with_instrument=with_instrument)
    if target_kind == "lp":
        target: infer.TargetSpec = lp.LpSpec(
            outcome=est["outcome"],
            shocks=(est["measure"],),
            controls=tuple(_default_controls(cfg)),
            groups=tuple(est["groups"]),
            horizons=tuple(est["horizons"]),
            hac_bandwidth=est["hac_bandwidth"],
        )
    elif target_kind == "lpiv":
        target = iv.LpIvSpec(
            outcome=est["outcome"],
            shock=est["measure"],
            instrument=est["instrument"],
            controls=tuple(_default_controls(cfg, with_instrument=True)),
            groups=tuple(est["groups"]),
            horizons=tuple(est["horizons"]),
            hac_bandwidth=est["hac_bandwidth"],
        )
    elif target_kind == "ardl":
        target = dyn.ArdlSpec(
            outcome=est["outcome"],
            measure=est["measure"],
            lags=est["lags"],
            groups=tuple(est["groups"]),
            hac_bandwidth=est["hac_bandwidth"],
        )
    else:
        raise ConfigError(f"unknown bootstrap target: {target_kind}")
    seed = bcfg.get("seed")
    if seed is None:
        seed = cfg.raw["seed"]
    spec = infer.BootstrapSpec(
        scheme=bcfg["scheme"],
        replications=bcfg["replications"],
        seed=seed,
        target=target,
        wild_unit=bcfg.get("wild_unit", "country"),
    )
    result = infer.run_bootstrap(frame, spec, n_workers=cfg.raw["threads"])
    out = cfg.out_dir() / "bootstrap.csv"
    infer.bootstrap_to_csv(result, out)
    write_manifest(cfg, "bootstrap", {
        "scheme": result.scheme, "replications": result.replications, "seed": result.seed
    })
    _echo_done(out)


@main.command("account")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--panel", type=str, default=None)
@click.option("--decomposition", "decomposition_path", type=str, default=None,
              help="Decomposition CSV with the transitory column.")
def account_cmd(config_path, output_dir, panel, decomposition_path):
    """Decade effects and median-path counterfactuals."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, panel=panel))
    if decomposition_path is not None:
        cfg.raw["decomposition_csv"] = decomposition_path
    _run(_cmd_account, cfg)


def _cmd_account(cfg: RunConfig) -> None:
    acfg = cfg.raw["account"]
    decomposition_csv = cfg.raw.get("decomposition_csv")
    if decomposition_csv is None:
        decomposition_csv = str(cfg.out_dir() / "decomposition.csv")
    if not Path(decomposition_csv).exists():
        raise ConfigError(f"decomposition CSV not found: {decomposition_csv}")
    table = pd.read_csv(decomposition_csv)
    if "transitory" not in table.columns or "permanent" not in table.columns:
        raise DataError("decomposition CSV must have transitory and permanent columns")
    transitory = table["transitory"].to_numpy(dtype=float)
    if transitory.size < 10:
        raise ConfigError(
            "decade accounting needs a transitory response through horizon 9; "
            "increase the decompose horizon"
        )
    perm_h = min(acfg["permanent_horizon"], len(table) - 1)
    permanent_25 = float(table["permanent"].iloc[perm_h])
    frame = _load_measures_panel(cfg)
    est = cfg.raw["estimation"]
    measure_col = est["measure"]
    if measure_col not in frame.columns:
        raise DataError(f"panel has no measure column {measure_col!r}")
    measures = frame.data[["country", "year", measure_col]].rename(columns={measure_col: "value"})
    inputs = account.AccountingInputs(
        transitory_irf=transitory,
        permanent_25=permanent_25,
        measures=measures,
        window=acfg["window"],
    )
    decades = acfg["decades"]
    if decades is None:
        y0 = int(measures["year"].min())
        y1 = int(measures["year"].max())
        decades = [d for d in range((y0 // 10) * 10, y1 - 8, 10) if d > y0 - 10]
    decade_tables = []
    excluded_all: dict[str, list[str]] = {}
    for decade in decades:
        try:
            table_d, excluded = account.decade_effects(inputs, decade)
        except DataError:
            continue
        decade_tables.append(table_d)
        excluded_all[str(decade)] = excluded
    if not decade_tables:
        raise DataError("no decade has complete coverage")
    decades_path = cfg.out_dir() / "account_decades.csv"
    account.decades_to_csv(decade_tables, decades_path)
    countries = sorted(measures["country"].unique())
    paths = [account.counterfactual_path(inputs, c) for c in countries]
    counterfactual_path_csv = cfg.out_dir() / "account_counterfactual.csv"
    account.counterfactuals_to_csv(paths, counterfactual_path_csv)
    write_manifest(cfg, "account", {"decades": decades, "excluded": excluded_all})
    _echo_done(decades_path)


@main.command("simulate")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@_SEED_OPTION
def simulate_cmd(config_path, output_dir, seed):
    """Generate a synthetic corpus: events, weights, and a panel with known truth."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir, seed=seed))
    _run(_cmd_simulate, cfg)


def _cmd_simulate(cfg: RunConfig) -> None:
    scfg = cfg.raw["simulate"]
    seed = cfg.raw["seed"]
    out = cfg.out_dir()
    spec = sim.DgpSpec(
        n_countries=scfg["n_countries"],
        n_years=scfg["n_years"],
        alpha=scfg["alpha"],
        beta=tuple(scfg["beta"]),
        gamma=tuple(scfg["gamma"]),
        measure_ar=tuple(scfg["measure_ar"]),
        noise_scale=scfg["noise_scale"],
        country_effect_scale=scfg["country_effect_scale"],
        region_year_effect_scale=scfg["region_year_effect_scale"],
        instrument_loading=scfg["instrument_loading"],
        n_regions=scfg["n_regions"],
        start_year=scfg["start_year"],
        seed=seed,
    )
    frame, truth = sim.generate_panel(spec)
    frame.to_csv(out / "panel.csv")
    ecfg = scfg["events"]
    start = scfg["start_year"]
    end = start + scfg["n_years"] - 1
    majors = tuple(f"M{i}" for i in range(ecfg["n_majors"]))
    espec = sim.EventDgpSpec(
        countries=tuple(f"C{i:03d}" for i in range(ecfg["n_countries"])),
        majors=majors,
        start_year=start,
        end_year=end,
        events_per_pair_year=ecfg["events_per_pair_year"],
        goldstein_mean=ecfg["goldstein_mean"],
        goldstein_sd=ecfg["goldstein_sd"],
        seed=seed,
    )
    events = sim.generate_events(espec)
    (out / "events.jsonl").write_text(serialize_events(events), encoding="utf-8")
    weights = sim.equal_weight_table(majors, range(start, end + 1))
    rows = [
        {"year": year, "country": major, "share": share}
        for year, row in sorted(weights.shares.items())
        for major, share in sorted(row.items())
    ]
    pd.DataFrame(rows).to_csv(out / "weights.csv", index=False)
    truth_table = pd.DataFrame(
        {
            "horizon": np.arange(truth.transitory.phi.size),
            "phi": truth.transitory.phi,
            "measure_own_irf": truth.measure_own_irf,
            "lp_irf": truth.lp_irf,
        }
    )
    truth_table.to_csv(out / "ground_truth.csv", index=False)
    write_manifest(cfg, "simulate", {
        "panel_rows": len(frame.data), "events": len(events),
        "phi_inf": truth.transitory.phi_inf,
    })
    _echo_done(out / "panel.csv")


@main.command("stats")
@_CONFIG_OPTION
@_OUTPUT_OPTION
@click.option("--measures", "measures_path", type=str, default=None, help="Measures CSV path.")
@click.option("--kind", type=str, default=None, help="Measure kind to summarize.")
def stats_cmd(config_path, output_dir, measures_path, kind):
    """Decade summary tables for a measure series."""
    cfg = RunConfig.load(config_path, _collect_overrides(output_dir=output_dir))
    if measures_path is not None:
        cfg.raw["measures_csv"] = measures_path
    if kind is not None:
        cfg.raw["stats"]["kind"] = kind
    _run(_cmd_stats, cfg)


def _cmd_stats(cfg: RunConfig) -> None:
    measures_csv = cfg.raw.get("measures_csv")
    if measures_csv is None:
        measures_csv = str(cfg.out_dir() / "measures.csv")
    if not Path(measures_csv).exists():
        raise ConfigError(f"measures CSV not found: {measures_csv}")
    kind = MeasureKind(cfg.raw["stats"]["kind"])
    measures = [m for m in relations.measures_from_csv(measures_csv) if m.kind == kind]
    if not measures:
        raise DataError(f"no rows of kind {kind.value!r} in {measures_csv}")
    df = pd.DataFrame(
        {"country": [m.country for m in measures],
         "year": [m.year for m in measures],
         "value": [m.value for m in measures]}
    )
    df["decade"] = (df["year"] // 10) * 10
    grouped = df.groupby("decade")["value"]
    summary = pd.DataFrame(
        {
            "mean": grouped.mean(),
            "median": grouped.median(),
            "sd": grouped.std(ddof=1),
            "min": grouped.min(),
            "max": grouped.max(),
            "p5": grouped.quantile(0.05),
            "p25": grouped.quantile(0.25),
            "p75": grouped.quantile(0.75),
            "p95": grouped.quantile(0.95),
            "n": grouped.count(),
        }
    ).reset_index()
    out = cfg.out_dir() / f"stats_{kind.value}.csv"
    summary.to_csv(out, index=False)
    write_manifest(cfg, "stats", {"kind": kind.value, "decades": summary["decade"].tolist()})
    _echo_done(out)


if __name__ == "__main__":
    main()
