import json

import pytest

from design_explorer.config import (
    ExplorerConfig,
    OutputFormat,
    RunConfigFile,
    build_config,
    load_config,
    parse_override,
    save_config,
)
from design_explorer.config.manager import OUTPUT_DIR_ENV, get_default_config
from design_explorer.errors import ConfigError
from design_explorer.geometry import ClipMode
from design_explorer.trees.forest import UpdateMode


def test_defaults_match_dataclass():
    config = build_config({})
    assert config.explorer == ExplorerConfig()
    assert config.output_format is OutputFormat.JSONL
    assert config.emit_per_iteration is True


def test_packaged_defaults_round_trip():
    assert RunConfigFile.from_dict(get_default_config()).to_dict() == get_default_config()


@pytest.mark.parametrize(
    ("data", "field"),
    [
        ({"epsilon": -1}, "epsilon"),
        ({"epsilon": "wide"}, "epsilon"),
        ({"batch_size": 0}, "batch_size"),
        ({"num_trees": 2.5}, "num_trees"),
        ({"warmup_size": 1}, "warmup_size"),
        ({"collision_tolerance": 0.5, "epsilon": 0.1}, "collision_tolerance"),
        ({"seed": -3}, "seed"),
        ({"update_mode": "sometimes"}, "update_mode"),
        ({"subsample_size": 0}, "subsample_size"),
        ({"bounds": {"min": [0, 0], "max": [0, 1]}}, "bounds"),
        ({"bounds": {"min": [0, 0], "max": [1, 1], "clip_mode": "wrap"}}, "bounds.clip_mode"),
        ({"warmup_box": {"min": [0, 0], "max": [2, 2]}}, "warmup_box"),
        ({"stop": {"max_points": 0}}, "stop.max_points"),
        ({"stop": {"max_points": "x"}}, "stop.max_points"),
        ({"stop": {"max_points": True}}, "stop.max_points"),
        ({"stop": {"max_seconds": "soon"}}, "stop.max_seconds"),
        ({"bounds": {"min": ["a", 0], "max": [1, 1]}}, "bounds"),
        ({"output_dir": 5}, "output_dir"),
        ({"stop": {"max_hours": 1}}, "stop.max_hours"),
        ({"output_format": "xml"}, "output_format"),
        ({"emit_per_iteration": "yes"}, "emit_per_iteration"),
        ({"colour": "red"}, "colour"),
    ],
)
def test_invalid_values_name_the_field(data, field):
    with pytest.raises(ConfigError) as info:
        build_config(data)
    assert info.value.field == field
    assert f"'{field}'" in str(info.value)


def test_nested_values_merge_with_defaults():
    config = build_config({"bounds": {"clip_mode": "reject"}})
    assert config.explorer.bounds.clip_mode is ClipMode.REJECT
    assert config.explorer.bounds.box.max == (1.0, 1.0)


@pytest.mark.parametrize(
    ("item", "expected"),
    [
        ("epsilon=0.2", ("epsilon", 0.2)),
        ("bounds.clip_mode=reject", ("bounds.clip_mode", "reject")),
        ("subsample_size=null", ("subsample_size", None)),
        ("warmup_box={\"min\": [0, 0], \"max\": [1, 1]}", ("warmup_box", {"min": [0, 0], "max": [1, 1]})),
        ("output_dir=runs/a=b", ("output_dir", "runs/a=b")),
    ],
)
def test_parse_override(item, expected):
    assert parse_override(item) == expected


@pytest.mark.parametrize("item", ["epsilon", "=3"])
def test_parse_override_rejects_malformed(item):
    with pytest.raises(ConfigError):
        parse_override(item)


def test_overrides_apply_after_file():
    config = build_config(
        {"epsilon": 0.3}, ["epsilon=0.2", "bounds.clip_mode=reject", "update_mode=retrain"]
    )
    assert config.explorer.epsilon == 0.2
    assert config.explorer.bounds.clip_mode is ClipMode.REJECT
    assert config.explorer.update_mode is UpdateMode.RETRAIN


def test_override_unknown_key():
    with pytest.raises(ConfigError) as info:
        build_config({}, ["epsilom=0.2"])
    assert info.value.field == "epsilom"


def test_output_dir_from_environment(monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, "/tmp/from-env")
    assert str(build_config({}).output_dir) == "/tmp/from-env"
    assert str(build_config({"output_dir": "mine"}).output_dir) == "mine"
    assert str(build_config({}, ["output_dir=flag"]).output_dir) == "flag"


def test_invalid_json_reports_line(write_config, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "epsilon": 0.1,\n  "seed": ,\n}\n', encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.line == 3
    assert "line 3" in str(info.value)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")


def test_top_level_must_be_object(write_config):
    path = write_config([1, 2])
    with pytest.raises(ConfigError):
        load_config(path)


def test_save_and_load(write_config, tmp_path):
    config = load_config(write_config({"epsilon": 0.25, "seed": 12, "stop": {"max_points": 500}}))
    target = tmp_path / "saved" / "config.json"
    save_config(config, target)
    assert load_config(target).to_dict() == config.to_dict()
    assert json.loads(target.read_text())["stop"] == {"max_points": 500, "max_seconds": None}
