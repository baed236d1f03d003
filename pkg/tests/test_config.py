import json

import pytest

import run  # noqa: F401
from utils.config import ABLATIONS, PRESETS, RunConfig
from utils.errors import ConfigError
from utils.options import get_parser


def test_presets_fill_unset_values():
    config = RunConfig(preset="twitter2017")
    assert (config.lr, config.alpha, config.lam) == (3e-4, 0.1, 0.5)
    assert RunConfig(preset="political", lr=1e-3).lr == 1e-3
    assert set(PRESETS) == {"twitter2015", "twitter2017", "political"}


def test_validate_collects_every_problem():
    config = RunConfig(alpha=1.5, beta=-0.1, tau=0.0, n_f=0)
    with pytest.raises(ConfigError) as info:
        config.validate()
    assert len(info.value.problems) == 4


def test_missing_dataset_directory(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(dataset=str(tmp_path / "nope")).validate(require_dataset=True)


def test_n_f_accepts_digit_strings():
    assert RunConfig(n_f="3").n_f == 3
    assert RunConfig().validate().n_f == "half"


def test_ablated_switches():
    config = RunConfig().ablated(["srg", "lsa"])
    assert not config.enable_srg and not config.enable_lsa and config.enable_irg
    assert config.enabled_terms() == ["sc", "irg"]
    with pytest.raises(ConfigError):
        RunConfig().ablated(["vision"])


def test_ablation_rows():
    assert ABLATIONS["wo_irg_ac"] == {"enable_irg": False, "aesthetic_vs_generic_caption": "generic"}
    for overrides in ABLATIONS.values():
        RunConfig().with_overrides(**overrides).validate()


def test_save_and_load(tmp_path):
    config = RunConfig(epochs=3, components={"d_model": 32})
    config.save(str(tmp_path))
    assert RunConfig.load(str(tmp_path)) == config


def test_parser_reads_config_file_defaults(tmp_path):
    path = tmp_path / "flags.json"
    path.write_text(json.dumps({"lambda": 0.3, "epochs": 5}))
    args = get_parser(["train", "--config", str(path), "--epochs", "7"])
    config = RunConfig.from_args(args)
    assert config.lam == 0.3
    assert config.epochs == 7
    assert config.components["d_model"] == 64


def test_parser_adds_component_flags():
    args = get_parser(["build-rationales", "--engine", "Engine.Mock", "--mock_mode", "fail"])
    assert args.mock_mode == "fail"


def test_unknown_component():
    with pytest.raises(ConfigError):
        get_parser(["train", "--backbone", "Backbone.Missing"])
