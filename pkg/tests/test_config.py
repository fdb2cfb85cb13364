"""Tests for the config module."""

import json
from pathlib import Path

import pytest
import yaml

from numrad.bounds import BoundId, list_bounds
from numrad.config import PROPERTY_CHECKS, PROPERTY_TRIALS, SuiteConfig
from numrad.ensembles import ENSEMBLE_KINDS
from numrad.errors import ConfigError


class TestSuiteConfig:
    def test_default_config(self):
        """Test default configuration values."""
        config = SuiteConfig()

        assert config.bounds == ["all"]
        assert config.ensembles == list(ENSEMBLE_KINDS)
        assert config.properties == list(PROPERTY_CHECKS)
        assert config.trials == 1000
        assert config.property_trials is None
        assert all(config.trials_for(name) == PROPERTY_TRIALS[name] for name in PROPERTY_CHECKS)
        assert config.master_seed == 20240601
        assert config.tol == 1e-9
        assert config.grid == 512
        assert config.gate_hypotheses is True
        assert config.jobs == 1

    def test_comma_separated_lists(self):
        """Test comma-separated strings are split into lists."""
        config = SuiteConfig(bounds="abs_sum_upper, norm_sandwich_upper", ensembles="gue,normal")
        assert config.bounds == ["abs_sum_upper", "norm_sandwich_upper"]
        assert config.ensembles == ["gue", "normal"]

    def test_output_path_normalization(self):
        """Test the output path becomes a Path."""
        assert isinstance(SuiteConfig(output_path="report.json").output_path, Path)

    def test_validation(self):
        """Test configuration validation."""
        with pytest.raises(ConfigError, match="Invalid bound"):
            SuiteConfig(bounds=["nope"])

        with pytest.raises(ConfigError, match="Invalid ensemble"):
            SuiteConfig(ensembles=["wigner"])

        with pytest.raises(ConfigError, match="Invalid property check"):
            SuiteConfig(properties=["lemma:nope"])

        with pytest.raises(ConfigError) as exc:
            SuiteConfig(trials=0)
        assert exc.value.field == "trials"

        with pytest.raises(ConfigError) as exc:
            SuiteConfig(dim_min=4, dim_max=2)
        assert exc.value.field == "dim_min"

        with pytest.raises(ConfigError) as exc:
            SuiteConfig(dim_max=64)
        assert exc.value.field == "dim_max"

        with pytest.raises(ConfigError, match="tol"):
            SuiteConfig(tol=1e-14)

    def test_invalid_params(self):
        """Test per-bound parameter literals are validated up front."""
        with pytest.raises(ConfigError) as exc:
            SuiteConfig(params={"single_young": {"gauge": "cubic:r=3"}})
        assert exc.value.field == "params.single_young"

        with pytest.raises(ConfigError, match="Invalid bound in params"):
            SuiteConfig(params={"nope": {"r": 2}})

    def test_bound_ids(self):
        """Test 'all' expands to the catalog and explicit ids keep catalog order."""
        assert len(SuiteConfig().bound_ids()) == len(list_bounds())
        config = SuiteConfig(bounds=["abs_sum_upper", "norm_sandwich_lower"])
        assert config.bound_ids() == [BoundId.NORM_SANDWICH_LOWER, BoundId.ABS_SUM_UPPER]

    def test_bound_params(self):
        """Test overrides parse into bound parameters."""
        config = SuiteConfig(params={"single_abs_power": {"r": 3}})
        assert config.bound_params("single_abs_power").r == 3.0
        assert config.bound_params("abs_sum_upper") is None

    def test_apply_env(self):
        """Test NUMRAD_SEED overrides the master seed."""
        config = SuiteConfig().apply_env({"NUMRAD_SEED": "17"})
        assert config.master_seed == 17
        assert SuiteConfig().apply_env({}).master_seed == 20240601

    def test_apply_env_invalid(self):
        """Test a non-integer seed names the variable."""
        with pytest.raises(ConfigError, match="NUMRAD_SEED"):
            SuiteConfig().apply_env({"NUMRAD_SEED": "abc"})

    def test_to_dict(self):
        """Test converting config to dictionary."""
        config_dict = SuiteConfig(output_path="out.json").to_dict()
        assert isinstance(config_dict, dict)
        assert config_dict["output_path"] == "out.json"
        assert config_dict["bounds"] == ["all"]

    def test_save_and_load_json(self, tmp_path):
        """Test saving and loading config as JSON."""
        config = SuiteConfig(trials=20, ensembles=["gue"], params={"single_abs_power": {"r": 2}})

        config_path = tmp_path / "suite.json"
        config.save(config_path)
        assert config_path.exists()

        loaded_config = SuiteConfig.load(config_path)
        assert loaded_config.trials == 20
        assert loaded_config.ensembles == ["gue"]
        assert loaded_config.params == {"single_abs_power": {"r": 2}}

    def test_save_and_load_yaml(self, tmp_path):
        """Test saving and loading config as YAML."""
        config = SuiteConfig(trials=20, dim_max=4)

        config_path = tmp_path / "suite.yaml"
        config.save(config_path)
        assert yaml.safe_load(config_path.read_text())["dim_max"] == 4

        loaded_config = SuiteConfig.load(config_path)
        assert loaded_config.trials == 20
        assert loaded_config.dim_max == 4

    def test_load_unknown_key(self, tmp_path):
        """Test an unknown key is rejected with its name."""
        config_path = tmp_path / "suite.json"
        config_path.write_text(json.dumps({"trails": 5}))
        with pytest.raises(ConfigError) as exc:
            SuiteConfig.load(config_path)
        assert exc.value.field == "trails"

    def test_load_invalid_json(self, tmp_path):
        """Test malformed JSON reports its position."""
        config_path = tmp_path / "suite.json"
        config_path.write_text('{\n  "trials": ,\n}')
        with pytest.raises(ConfigError) as exc:
            SuiteConfig.load(config_path)
        assert exc.value.line == 2

    def test_load_invalid_yaml(self, tmp_path):
        """Test malformed YAML reports its line."""
        config_path = tmp_path / "suite.yaml"
        config_path.write_text("trials: 5\nbounds: [abs_sum_upper\n")
        with pytest.raises(ConfigError) as exc:
            SuiteConfig.load(config_path)
        assert exc.value.line is not None

    def test_load_missing_file(self, tmp_path):
        """Test a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            SuiteConfig.load(tmp_path / "missing.yaml")

    def test_from_cli_args(self):
        """Test creating config from CLI args."""
        config = SuiteConfig.from_cli_args(output="report.csv", seed=5, trials=None, jobs=2)

        assert config.output_path == Path("report.csv")
        assert config.master_seed == 5
        assert config.trials == 1000
        assert config.jobs == 2

    def test_find_config_file(self, tmp_path):
        """Test finding config file in directory."""
        assert SuiteConfig.find_config_file(tmp_path) is None

        yaml_config = tmp_path / ".numrad.yaml"
        yaml_config.write_text("trials: 3\n")
        assert SuiteConfig.find_config_file(tmp_path) == yaml_config

        json_config = tmp_path / ".numrad.json"
        json_config.write_text("{}")
        assert SuiteConfig.find_config_file(tmp_path) == json_config
