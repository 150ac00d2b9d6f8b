import pytest

from src.config import build_config, load_config_file, merge_options, parse_bool, settings
from src.config.loader import normalize_key
from src.exceptions import ConfigError
from src.training import Decay, TrainConfig
from src.utils import write_manifest


DEFAULTS = {"lr_max": 0.5, "epochs": 10, "decay": "linear", "report": None}
CONVERTERS = {"lr_max": float, "epochs": int, "decay": str, "report": str}


def test_precedence_defaults_file_cli():
    merged = merge_options(
        DEFAULTS,
        {"lr_max": "0.2", "epochs": "3"},
        {"lr_max": None, "epochs": 7, "decay": None, "report": None},
        CONVERTERS,
    )
    assert merged == {"lr_max": 0.2, "epochs": 7, "decay": "linear", "report": None}


def test_unknown_and_malformed_keys():
    with pytest.raises(ConfigError, match="lr_maximum"):
        merge_options(DEFAULTS, {"lr_maximum": "1"}, {}, CONVERTERS)
    with pytest.raises(ConfigError, match="epochs"):
        merge_options(DEFAULTS, {"epochs": "ten"}, {}, CONVERTERS)


def test_empty_file_value_keeps_an_unset_option_unset():
    assert merge_options(DEFAULTS, {"report": ""}, {}, CONVERTERS)["report"] is None


def test_config_file_accepts_dashes_and_skips_manifest_keys(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# tuned\nLR-MAX=0.25\nepochs=4\ncommand=train\nhash.corpus=abc\n", encoding="utf-8")
    assert load_config_file(path) == {"lr_max": "0.25", "epochs": "4"}


def test_manifest_is_a_valid_config_file(tmp_path):
    out = tmp_path / "model.npz"
    out.write_bytes(b"x")
    manifest = write_manifest(out, "train", {"lr_max": 0.1, "report": None, "warm_start": True}, {"corpus": out})
    values = load_config_file(manifest)
    assert values == {"lr_max": "0.1", "report": "", "warm_start": "true"}


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "nope.cfg")


def test_build_config_wraps_validation_errors():
    assert build_config(TrainConfig, decay="exponential", lr_min=0.01).decay is Decay.EXPONENTIAL
    with pytest.raises(ConfigError, match="TrainConfig"):
        build_config(TrainConfig, epochs=-1)


@pytest.mark.parametrize("value, expected", [("true", True), ("Yes", True), ("1", True), ("off", False), ("", False)])
def test_parse_bool(value, expected):
    assert parse_bool(value) is expected


def test_parse_bool_rejects_other_words():
    with pytest.raises(ValueError):
        parse_bool("maybe")


def test_settings_defaults():
    assert normalize_key(" Hidden-Size ") == "hidden_size"
    assert settings.partition_fractions == pytest.approx([10 / 12, 1 / 12, 1 / 12], abs=1e-6)
    assert settings.SSL_DD_QUANTILE / settings.SSL_NDD_QUANTILE == pytest.approx(5.0)
