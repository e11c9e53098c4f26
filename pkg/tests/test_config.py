import json
from pathlib import Path

import pytest

from fakeseg.harness import ConfigError, load_experiment_config
from fakeseg.harness.config import parse_experiment_config
from helpers import micro_config_dict

QUICKSTART = Path(__file__).parent.parent / "configs" / "quickstart.json"


def test_quickstart_config_loads():
    cfg = load_experiment_config(QUICKSTART)
    assert cfg.dataset.num_train_videos + cfg.dataset.num_val_videos == 20
    assert cfg.dataset.num_test_videos == 10
    assert cfg.model.window == 5
    assert cfg.eval.overlap == 4
    assert cfg.eval.smooth_k == 7


def test_model_input_dim_defaults_to_feature_dim():
    cfg = parse_experiment_config(micro_config_dict())
    assert cfg.model.input_dim == cfg.dataset.feature_dim


def test_unknown_top_level_section_rejected():
    data = micro_config_dict()
    data["extra"] = {}
    with pytest.raises(ConfigError, match="top-level"):
        parse_experiment_config(data)


def test_unknown_section_key_rejected():
    data = micro_config_dict(dataset={"bogus": 1})
    with pytest.raises(ConfigError, match="bogus"):
        parse_experiment_config(data)
    data = micro_config_dict(model={"bogus": 1})
    with pytest.raises(ConfigError, match="model"):
        parse_experiment_config(data)


def test_invalid_values_rejected():
    with pytest.raises(ConfigError, match="mode"):
        parse_experiment_config(micro_config_dict(dataset={"mode": "three"}))
    with pytest.raises(ConfigError, match="train"):
        parse_experiment_config(micro_config_dict(train={"learning_rate": -1}))
    with pytest.raises(ConfigError, match="overlap"):
        parse_experiment_config(micro_config_dict(eval={"overlap": 5}))
    with pytest.raises(ConfigError, match="input_dim"):
        parse_experiment_config(micro_config_dict(model={"input_dim": 99}))


def test_sections_get_defaults():
    cfg = parse_experiment_config({"dataset": {"feature_dim": 4, "min_length": 250, "max_length": 300}})
    assert cfg.train.learning_rate == pytest.approx(1e-4)
    assert cfg.train.early_stop_patience == 10
    assert cfg.eval.smooth_k == 7
    assert cfg.model.input_dim == 4


def test_config_file_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="cannot read"):
        load_experiment_config(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_experiment_config(bad)


def test_config_round_trip():
    cfg = parse_experiment_config(micro_config_dict())
    again = parse_experiment_config(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
