"""Command-line runs against temporary output directories."""

import json

import pytest
import yaml

from mlbgg.cli.config_loader import load_config
from mlbgg.cli.main import EXIT_CONFIG, EXIT_OK, main
from tests.fixtures.scenarios import scenario_dict


def _run(config_file, *args):
    return main([args[0], "--config", str(config_file), *args[1:]])


def _results(config_file):
    return config_file.parent / "results"


def _report(out_dir):
    return json.loads((out_dir / "report.json").read_text(encoding="utf-8"))


class TestSelftest:
    def test_passes(self, capsys):
        assert main(["selftest", "--sequences", "10"]) == EXIT_OK
        assert "PASS composition" in capsys.readouterr().out

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.startswith("mlbgg ")


class TestSimulate:
    def test_writes_outputs(self, config_file, capsys):
        assert _run(config_file, "simulate") == EXIT_OK

        out = _results(config_file)
        for name in ("report.json", "trials.csv", "effective_config.yaml", "audit.jsonl"):
            assert (out / name).is_file()
        assert "rho1=" in capsys.readouterr().out
        assert (out / "trials.csv").read_text(encoding="utf-8").startswith("# mlbgg ")

    def test_reruns_are_byte_identical(self, config_file, tmp_path):
        assert _run(config_file, "simulate", "--out", str(tmp_path / "a")) == EXIT_OK
        assert _run(config_file, "simulate", "--out", str(tmp_path / "b")) == EXIT_OK

        # effective_config.yaml records the output directory, so it differs
        for name in ("report.json", "trials.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_effective_config_reloads_to_same_fingerprint(self, config_file):
        assert _run(config_file, "simulate", "--seed", "31") == EXIT_OK

        out = _results(config_file)
        effective = load_config(out / "effective_config.yaml")
        report = _report(out)

        assert effective.fingerprint() == report["fingerprint"]
        assert effective.seed == report["seed"] == 31

    def test_audit_log_brackets_the_run(self, config_file):
        assert _run(config_file, "simulate") == EXIT_OK

        lines = (_results(config_file) / "audit.jsonl").read_text(encoding="utf-8").splitlines()
        events = [json.loads(line)["event"] for line in lines]

        assert events[0] == "run_started"
        assert events[-1] == "run_finished"

    def test_cli_overrides(self, config_file):
        args = ["--trials", "20", "--threshold-rule", "strict-majority", "--r1-variant"]
        assert _run(config_file, "simulate", *args, "binomial-bar") == EXIT_OK

        report = _report(_results(config_file))
        assert report["n_trials"] == 20
        assert report["threshold_rule"] == "strict-majority"
        assert report["r1_variant"] == "binomial-bar"
        assert report["layer0"]["action_bar"] is None

    @pytest.mark.parametrize("rule", ["paper-geq-half", "geq-half"])
    def test_geq_half_rule_names(self, config_file, rule):
        assert _run(config_file, "simulate", "--trials", "10", "--threshold-rule", rule) == EXIT_OK

        assert _report(_results(config_file))["threshold_rule"] == "paper-geq-half"

    def test_no_trial_records_when_disabled(self, tmp_path):
        document = scenario_dict(n_trials=20)
        document["output"] = {
            "directory": str(tmp_path / "out"),
            "trial_records": False,
            "audit_log": False,
        }
        path = tmp_path / "scenario.yaml"
        path.write_text(yaml.safe_dump(document), encoding="utf-8")

        assert _run(path, "simulate") == EXIT_OK
        assert not (tmp_path / "out" / "trials.csv").exists()
        assert not (tmp_path / "out" / "audit.jsonl").exists()


class TestEnvironment:
    def test_seed_from_environment(self, config_file, monkeypatch):
        monkeypatch.setenv("MLBGG_SEED", "11")

        assert _run(config_file, "simulate") == EXIT_OK
        assert _report(_results(config_file))["seed"] == 11

    def test_flag_beats_environment(self, config_file, monkeypatch):
        monkeypatch.setenv("MLBGG_SEED", "11")

        assert _run(config_file, "simulate", "--seed", "12") == EXIT_OK
        assert _report(_results(config_file))["seed"] == 12

    def test_output_dir_from_environment(self, config_file, monkeypatch, tmp_path):
        monkeypatch.setenv("MLBGG_OUTPUT_DIR", str(tmp_path / "env_out"))

        assert _run(config_file, "simulate", "--trials", "10") == EXIT_OK
        assert (tmp_path / "env_out" / "report.json").is_file()

    def test_invalid_environment(self, config_file, monkeypatch):
        monkeypatch.setenv("MLBGG_WORKERS", "zero")

        assert _run(config_file, "simulate") == EXIT_CONFIG


class TestConfigurationErrors:
    def test_missing_config(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG

    def test_invalid_config(self, tmp_path):
        document = scenario_dict()
        document["layer0"]["alpha"] = -1.0
        path = tmp_path / "bad.yaml"
        path.write_text(yaml.safe_dump(document), encoding="utf-8")

        assert main(["simulate", "--config", str(path)]) == EXIT_CONFIG

    def test_rejected_override(self, config_file):
        assert _run(config_file, "simulate", "--trials", "0") == EXIT_CONFIG

    def test_bad_worker_count(self, config_file):
        assert _run(config_file, "simulate", "--workers", "0") == EXIT_CONFIG

    def test_bad_repeat(self, config_file):
        assert _run(config_file, "optimize-backup", "--repeat", "0") == EXIT_CONFIG


class TestOptimizers:
    def test_backup_single_seed(self, config_file):
        assert _run(config_file, "optimize-backup") == EXIT_OK

        out = _results(config_file)
        optimum = json.loads((out / "backup_optimum.json").read_text(encoding="utf-8"))
        lines = (out / "backup_curve.csv").read_text(encoding="utf-8").splitlines()

        assert len(optimum["optima"]) == 1
        assert optimum["optima"][0]["curve"] == "backup_curve.csv"
        # provenance, header, B = 0..10
        assert len(lines) == 2 + 11
        assert lines[1] == "B,mean_cost,stderr,q1_B,censor_rate"

    def test_backup_repeat(self, config_file):
        assert _run(config_file, "optimize-backup", "--repeat", "2") == EXIT_OK

        out = _results(config_file)
        optimum = json.loads((out / "backup_optimum.json").read_text(encoding="utf-8"))

        assert [o["seed"] for o in optimum["optima"]] == [7, 8]
        fingerprints = {o["fingerprint"] for o in optimum["optima"]}
        assert len(fingerprints) == 2
        assert optimum["optima"][0]["fingerprint"] == optimum["fingerprint"]
        first_line = (out / "backup_curve_seed8.csv").read_text(encoding="utf-8").splitlines()[0]
        assert optimum["optima"][1]["fingerprint"] in first_line
        assert (out / "backup_curve_seed7.csv").is_file()
        assert (out / "backup_curve_seed8.csv").is_file()

    def test_alpha(self, config_file):
        assert _run(config_file, "optimize-alpha") == EXIT_OK

        out = _results(config_file)
        optimum = json.loads((out / "alpha_optimum.json").read_text(encoding="utf-8"))
        lines = (out / "alpha_curve.csv").read_text(encoding="utf-8").splitlines()

        assert [s["eta"] for s in optimum["sweeps"]] == [5, 11]
        assert all("curve" not in s for s in optimum["sweeps"])
        assert all(s["alpha_star"] <= optimum["rho1"] for s in optimum["sweeps"])
        # provenance, header, 7 alphas x 2 sizes
        assert len(lines) == 2 + 14

    def test_eta(self, config_file):
        assert _run(config_file, "optimize-eta") == EXIT_OK

        out = _results(config_file)
        optimum = json.loads((out / "eta_optimum.json").read_text(encoding="utf-8"))

        assert optimum["eta_star"] == min(optimum["eta1"], optimum["eta0"])
        assert optimum["fingerprint"]
        assert (out / "eta_curve.csv").is_file()
