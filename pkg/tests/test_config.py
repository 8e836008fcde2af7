from pathlib import Path

import pytest

from phigamma.config import Config, ConfigValueInvalid, ConfigValueMissing


def test_config(conf: Config) -> None:
    assert conf.precision == 40
    assert conf.h1_budget == 32
    assert conf.precision_max == 384
    assert conf.continuity_bound == 64
    assert conf.lattice_rounds == 200


def test_config_override(conf: Config) -> None:
    conf.override(precision=64, h1_budget=None)
    assert conf.precision == 64
    assert conf.h1_budget == 32
    assert conf.as_dict()["precision"] == 64


def test_config_defaults() -> None:
    assert Config().precision == 48


def test_config_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigValueMissing):
        Config(tmp_path / "missing.yaml").precision


@pytest.mark.parametrize(
    "content", ["precision: lots\n", "precision: 2\n", "- 1\n- 2\n"]
)
def test_config_invalid(tmp_path: Path, content: str) -> None:
    path = tmp_path / "conf.yaml"
    path.write_text(content)
    with pytest.raises(ConfigValueInvalid):
        Config(path).precision


def test_config_working_precision(conf: Config) -> None:
    with conf.working_precision(96) as precision:
        assert precision == 96
        assert conf.precision == 96
        assert conf.precision_max == 384
    assert conf.precision == 40
    with pytest.raises(ConfigValueInvalid):
        with conf.working_precision(2):
            pass
