"""Tests for loading, validating and dumping scenario files."""

import pytest
import yaml

from mlbgg.cli.config_loader import default_config_path, dump_config, load_config, parse_config
from mlbgg.core.exceptions import MissingConfigError, SchemaError
from tests.fixtures.scenarios import scenario_dict


def _write(tmp_path, document):
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(document), encoding="utf-8")
    return path


def _fields(error):
    return [e["field"] for e in error.details["errors"]]


class TestShippedScenario:
    def test_loads(self):
        scenario = load_config(default_config_path())

        assert len(scenario.networks) == 41
        assert scenario.sweep.backup_values == list(range(0, 41))
        assert scenario.n_trials == 1000
        assert scenario.layer0.eta == 41


class TestLoadConfig:
    def test_valid_file(self, tmp_path):
        scenario = load_config(_write(tmp_path, scenario_dict()))

        assert scenario.name == "small"
        assert len(scenario.networks) == 4

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingConfigError):
            load_config(tmp_path / "absent.yaml")

    def test_out_of_range_field_is_named(self, tmp_path):
        document = scenario_dict()
        document["layer0"]["alpha"] = -0.5

        with pytest.raises(SchemaError) as exc:
            load_config(_write(tmp_path, document))

        assert "layer0.alpha" in _fields(exc.value)

    def test_nested_field_path(self, tmp_path):
        document = scenario_dict()
        document["layer1"]["template"]["lambda_attacker"] = -1.0

        with pytest.raises(SchemaError) as exc:
            load_config(_write(tmp_path, document))

        assert "layer1.template.lambda_attacker" in _fields(exc.value)

    def test_unknown_key_rejected(self, tmp_path):
        document = scenario_dict(bogus=1)

        with pytest.raises(SchemaError) as exc:
            load_config(_write(tmp_path, document))

        assert "bogus" in _fields(exc.value)

    def test_malformed_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("layer1: [unclosed\n", encoding="utf-8")

        with pytest.raises(SchemaError):
            load_config(path)

    def test_top_level_must_be_mapping(self):
        with pytest.raises(SchemaError) as exc:
            parse_config([1, 2, 3])

        assert _fields(exc.value) == ["<root>"]

    def test_template_and_networks_are_exclusive(self, tmp_path):
        document = scenario_dict()
        document["layer1"]["networks"] = [document["layer1"]["template"]] * 4

        with pytest.raises(SchemaError):
            load_config(_write(tmp_path, document))


class TestDumpConfig:
    def test_round_trip_keeps_fingerprint(self, tmp_path, scenario):
        path = tmp_path / "effective.yaml"
        path.write_text(dump_config(scenario), encoding="utf-8")

        reloaded = load_config(path)

        assert reloaded.fingerprint() == scenario.fingerprint()
        assert reloaded.seed == scenario.seed

    def test_fingerprint_ignores_output(self, scenario):
        moved = scenario.with_overrides(output_dir="elsewhere")

        assert moved.fingerprint() == scenario.fingerprint()

    def test_fingerprint_covers_seed(self, scenario):
        reseeded = scenario.with_overrides(seed=123)

        assert reseeded.fingerprint() != scenario.fingerprint()
        assert reseeded.with_overrides(seed=scenario.seed).fingerprint() == scenario.fingerprint()
        assert scenario.with_overrides(n_trials=5).fingerprint() != scenario.fingerprint()
