import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from geogrowth.cli import main


def write_config(path: Path, output_dir: Path, **overrides) -> Path:
    cfg = {
        "output_dir": str(output_dir),
        "seed": 42,
        "simulate": {
            "n_countries": 6,
            "n_years": 30,
            "alpha": 2.0,
            "beta": [0.5],
            "gamma": [0.2],
            "measure_ar": [0.5],
            "noise_scale": 0.5,
            "country_effect_scale": 1.0,
            "region_year_effect_scale": 0.3,
            "instrument_loading": 0.5,
            "n_regions": 2,
            "start_year": 1985,
            "events": {
                "n_countries": 4,
                "n_majors": 3,
                "events_per_pair_year": 3.0,
                "goldstein_mean": 3.0,
                "goldstein_sd": 3.0,
            },
        },
        "estimation": {
            "outcome": "y",
            "measure": "p",
            "instrument": "z",
            "lags": 2,
            "horizons": [0, 4],
            "groups": ["country", "region_year"],
            "hac_bandwidth": "auto",
        },
        "decompose": {"own_horizon": 12},
        "account": {"window": 10, "decades": [1990, 2000], "permanent_horizon": 12},
        "bootstrap": {"scheme": "wild", "replications": 25, "target": "lp", "seed": 7},
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


def run_pipeline(runner, config, out_dir):
    steps = [
        ["simulate", "--config", str(config)],
        ["scores", "--config", str(config), "--events", f"{out_dir}/events.jsonl",
         "--weights", f"{out_dir}/weights.csv"],
        ["panel", "--config", str(config), "--panel", f"{out_dir}/panel.csv",
         "--measures", f"{out_dir}/measures.csv"],
        ["lp", "--config", str(config), "--panel", f"{out_dir}/panel_built.csv"],
        ["decompose", "--config", str(config), "--panel", f"{out_dir}/panel.csv"],
        ["account", "--config", str(config), "--panel", f"{out_dir}/panel.csv"],
    ]
    for step in steps:
        result = runner.invoke(main, step, catch_exceptions=False)
        assert result.exit_code == 0, f"{step}: {result.output}"


def strip_timestamp(text: str) -> str:
    return "\n".join(l for l in text.splitlines() if '"timestamp"' not in l)


class TestGoldenRun:
    def test_pipeline_outputs_byte_identical_across_runs(self, tmp_path):
        runner = CliRunner()
        outputs = []
        for name in ("one", "two"):
            out_dir = tmp_path / name
            config = write_config(tmp_path / f"cfg_{name}.json", out_dir)
            run_pipeline(runner, config, out_dir)
            outputs.append(out_dir)
        first, second = outputs
        csvs = sorted(p.name for p in first.glob("*.csv"))
        assert csvs  # pipeline actually produced tables
        for name in csvs:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name
        jsonls = sorted(p.name for p in first.glob("*.jsonl"))
        for name in jsonls:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_manifests_identical_modulo_timestamp(self, tmp_path):
        runner = CliRunner()
        config = write_config(tmp_path / "c.json", tmp_path / "a")
        runner.invoke(main, ["simulate", "--config", str(config)], catch_exceptions=False)
        manifest = json.loads((tmp_path / "a" / "manifest_simulate.json").read_text())
        assert {"command", "config_hash", "seed", "versions", "samples", "timestamp"} <= set(
            manifest
        )
        # timestamp sits on its own line so diffs can ignore it
        raw = (tmp_path / "a" / "manifest_simulate.json").read_text()
        ts_lines = [l for l in raw.splitlines() if '"timestamp"' in l]
        assert len(ts_lines) == 1


class TestErrors:
    def test_bad_delta_is_config_error(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        config = write_config(tmp_path / "c.json", out)
        result = runner.invoke(
            main,
            ["scores", "--config", str(config), "--events", "x.jsonl",
             "--weights", "w.csv", "--delta", "0.0"],
        )
        assert result.exit_code == 1

    def test_missing_input_path_is_config_error(self, tmp_path):
        runner = CliRunner()
        config = write_config(tmp_path / "c.json", tmp_path / "out")
        result = runner.invoke(
            main, ["scores", "--config", str(config), "--events", "missing.jsonl",
                   "--weights", "missing.csv"]
        )
        assert result.exit_code == 1

    def test_missing_column_is_data_error_naming_column(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        out.mkdir()
        (out / "panel.csv").write_text("country,year,region,gdp\nA,2000,R0,1.0\n")
        config = write_config(tmp_path / "c.json", out)
        result = runner.invoke(
            main, ["lp", "--config", str(config), "--panel", str(out / "panel.csv")]
        )
        assert result.exit_code == 2
        assert "y" in result.output

    def test_invalid_config_json(self, tmp_path):
        runner = CliRunner()
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        result = runner.invoke(main, ["simulate", "--config", str(bad)])
        assert result.exit_code == 1

    def test_empty_event_file_warns_but_succeeds(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        out.mkdir()
        (out / "events.jsonl").write_text("")
        (out / "weights.csv").write_text("year,country,share\n2000,M0,0.5\n")
        config = write_config(tmp_path / "c.json", out)
        with pytest.warns(UserWarning, match="no valid events"):
            result = runner.invoke(
                main,
                ["scores", "--config", str(config), "--events", str(out / "events.jsonl"),
                 "--weights", str(out / "weights.csv")],
                catch_exceptions=False,
            )
        assert result.exit_code == 0
        assert (out / "measures.csv").read_text().strip() == "country,year,kind,value"


class TestCommands:
    def test_stats_emits_decade_summary(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        out.mkdir()
        measures = out / "measures.csv"
        measures.write_text(
            "country,year,kind,value\n"
            "A,1961,dynamic_relation,0.1\n"
            "A,1975,dynamic_relation,0.3\n"
            "B,1975,dynamic_relation,0.5\n"
        )
        config = write_config(tmp_path / "c.json", out)
        result = runner.invoke(
            main, ["stats", "--config", str(config), "--measures", str(measures)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        table = (out / "stats_dynamic_relation.csv").read_text().splitlines()
        assert table[0].startswith("decade,mean,median,sd")
        assert table[1].startswith("1960,")
        assert table[2].startswith("1970,")

    def test_bootstrap_command(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        config = write_config(tmp_path / "c.json", out)
        runner.invoke(main, ["simulate", "--config", str(config)], catch_exceptions=False)
        result = runner.invoke(
            main,
            ["bootstrap", "--config", str(config), "--panel", str(out / "panel.csv"),
             "--replications", "10"],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        lines = (out / "bootstrap.csv").read_text().splitlines()
        assert lines[0] == "# scheme=wild replications=10 seed=7"

    def test_ardl_and_lpiv_commands(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        config = write_config(tmp_path / "c.json", out)
        runner.invoke(main, ["simulate", "--config", str(config)], catch_exceptions=False)
        runner.invoke(
            main,
            ["panel", "--config", str(config), "--panel", str(out / "panel.csv")],
            catch_exceptions=False,
        )
        for cmd, artifact in [("ardl", "ardl_params.csv"), ("lpiv", "lpiv.csv")]:
            result = runner.invoke(
                main,
                [cmd, "--config", str(config), "--panel", str(out / "panel_built.csv")],
                catch_exceptions=False,
            )
            assert result.exit_code == 0, result.output
            assert (out / artifact).exists()

    def test_balanced_panel_option_drops_incomplete_countries(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        out.mkdir()
        rows = ["country,year,region,y,p,z"]
        for c in ("A", "B"):
            for y in range(2000, 2010):
                if c == "B" and y == 2005:
                    rows.append(f"{c},{y},R0,,0.1,0.0")  # missing outcome
                else:
                    rows.append(f"{c},{y},R0,1.0,0.1,0.0")
        (out / "panel.csv").write_text("\n".join(rows) + "\n")
        config = write_config(tmp_path / "c.json", out)
        cfg = json.loads(config.read_text())
        cfg["estimation"]["balanced"] = True
        cfg["estimation"]["horizons"] = [0, 2]
        config.write_text(json.dumps(cfg))
        result = runner.invoke(
            main, ["panel", "--config", str(config), "--panel", str(out / "panel.csv")],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        built = (out / "panel_built.csv").read_text()
        assert "A," in built and "B," not in built

    def test_cli_flag_overrides_config_file(self, tmp_path):
        runner = CliRunner()
        out_from_file = tmp_path / "from_file"
        out_from_flag = tmp_path / "from_flag"
        config = write_config(tmp_path / "c.json", out_from_file)
        result = runner.invoke(
            main,
            ["simulate", "--config", str(config), "--output-dir", str(out_from_flag)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        assert (out_from_flag / "panel.csv").exists()
        assert not out_from_file.exists()
