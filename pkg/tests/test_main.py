import json
from pathlib import Path
from typing import Any
from unittest import mock

import pytest

from phigamma.coeffs import CoefficientAlgebra
from phigamma.exceptions import MalformedInput
from phigamma.main import PgmApp, RunConfig, run_command
from phigamma.schema import ModuleData, SeriesData

from .data import (
    make_broken_payload,
    make_tate_payload,
    make_trivial_payload,
    make_unipotent_payload,
)


def _write(tmp_path: Path, name: str, payload: dict[str, Any]) -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def _run(command: str, *inputs: Path, **kwargs: Any) -> dict[str, Any]:
    run = RunConfig(command=command, inputs=list(inputs), **kwargs)
    return run_command(run).to_dict()


def _app(*argv: str) -> int:
    with mock.patch("sys.argv", ["pgm", *argv]):
        return PgmApp().run()


def test_cohomology_report(tmp_path: Path) -> None:
    path = _write(tmp_path, "trivial.json", make_trivial_payload())
    report = _run("cohomology", path)
    assert report["chi_gamma_convention"] == "1+p"
    assert report["command"] == "cohomology"
    assert (report["h0"], report["h1"], report["h2"]) == (1, 2, 0)
    assert report["euler_ok"] and report["duality_ok"]
    assert "kernel-bound" in report["certificates"]
    assert "representatives" not in report
    assert "result" not in report


def test_euler_check_with_representatives(tmp_path: Path) -> None:
    path = _write(tmp_path, "tate.json", make_tate_payload())
    result = _run("euler-check", path, representatives=True)
    assert result["h1_direct"] == result["h1"] == 2
    assert len(result["representatives"]) == 2


def test_validate(tmp_path: Path) -> None:
    path = _write(tmp_path, "unipotent.json", make_unipotent_payload())
    result = _run("validate", path)
    assert result["valid"]
    assert result["rank"] == 2
    assert result["kernel_bound"] == 1


def test_identify_and_twist(tmp_path: Path) -> None:
    tate = _write(tmp_path, "tate.json", make_tate_payload())
    result = _run("identify", tate)
    assert (result["n"], result["a"]) == (1, [1])
    trivial = _write(tmp_path, "trivial.json", make_trivial_payload())
    twisted = _run("twist", trivial, n=1)
    assert twisted["matrices"]["delta"][0][0]["coeffs"] == [2]
    assert twisted["rank"] == 1 and twisted["chi_gamma"] == "1+p"
    dual = _run("dual", trivial)
    assert dual["matrices"]["delta"][0][0]["coeffs"] == [2]


def test_class_of_and_ext_build(tmp_path: Path) -> None:
    unipotent = _write(tmp_path, "unipotent.json", make_unipotent_payload())
    cocycle = _run("class-of", unipotent)
    assert cocycle["a"][0]["coeffs"] == [1]
    assert cocycle["b"][0]["coeffs"] == []
    assert cocycle["certified"]
    trivial = _write(tmp_path, "trivial.json", make_trivial_payload())
    c = _write(tmp_path, "cocycle.json", cocycle)
    e = _run("ext-build", trivial, trivial, c)
    assert e["rank"] == 2
    assert e["matrices"]["phi"][0][1]["coeffs"] == [1]
    assert e["matrices"]["phi"][1][0]["coeffs"] == []


def test_lift_dim(tmp_path: Path) -> None:
    path = _write(tmp_path, "trivial.json", make_trivial_payload())
    result = _run("lift-dim", path, lift_dim=2)
    assert result["lift_space_dim"] == 4


def test_input_count(tmp_path: Path) -> None:
    path = _write(tmp_path, "trivial.json", make_trivial_payload())
    with pytest.raises(MalformedInput, match="takes 2"):
        _run("tensor", path)
    with pytest.raises(MalformedInput, match="Unknown"):
        _run("frobnicate", path)


def test_empty_suite_command() -> None:
    result = _run("suite", count=0)
    assert result["passed"]
    assert result["cases"] == []


def test_app_writes_report(tmp_path: Path) -> None:
    path = _write(tmp_path, "trivial.json", make_trivial_payload())
    out = tmp_path / "report.json"
    assert _app("cohomology", "-i", str(path), "-o", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["command"] == "cohomology"
    assert report["h1"] == 2
    assert out.read_text().endswith("}\n")


def test_app_stdout(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    path = _write(tmp_path, "tate.json", make_tate_payload())
    assert _app("identify", "-i", str(path)) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["n"] == 1
    assert "identify" in captured.err


def test_app_validation_failure(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    path = _write(tmp_path, "broken.json", make_broken_payload())
    assert _app("validate", "-i", str(path)) == 2
    assert "CommutationFailure" in capsys.readouterr().err


def test_app_malformed_input(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert _app("validate", "-i", str(path)) == 5
    payload = make_trivial_payload()
    del payload["matrices"]["phi"]
    path = _write(tmp_path, "missing.json", payload)
    assert _app("validate", "-i", str(path)) == 5


def test_app_bad_config(tmp_path: Path) -> None:
    conf = tmp_path / "conf.yaml"
    conf.write_text("precision: 1\n")
    path = _write(tmp_path, "trivial.json", make_trivial_payload())
    assert _app("validate", "-i", str(path), "-c", str(conf)) == 5


def test_series_data_rejects_bad_coefficients(
    f9: CoefficientAlgebra,
) -> None:
    with pytest.raises(MalformedInput):
        SeriesData(coeffs=[[1, 2, 0]]).to_series(f9)
    assert SeriesData(coeffs=[1, [0, 1]]).to_series(f9).valuation == 0


def test_module_data_roundtrip(tmp_path: Path) -> None:
    path = _write(tmp_path, "unipotent.json", make_unipotent_payload())
    m = ModuleData.load(path).to_module()
    again = ModuleData.from_module(m).to_module()
    assert again.phi.agrees(m.phi)
    assert again.name == "unipotent"


def test_module_file_layout(tmp_path: Path) -> None:
    payload = {
        "p": 3,
        "coeff": {"kind": "finite_field", "degree": 1},
        "rank": 1,
        "chi_gamma": "1+p",
        "matrices": {
            "phi": [[{"valuation": 0, "coeffs": [[1]]}]],
            "gamma": [[{"valuation": 0, "coeffs": [[1]]}]],
            "delta": [[{"valuation": 0, "precision": 40, "coeffs": [[2]]}]],
        },
    }
    path = _write(tmp_path, "tate.json", payload)
    m = ModuleData.load(path).to_module()
    assert m.rank == 1
    assert not m.delta[0, 0].is_exact
    report = _run("cohomology", path)
    assert (report["h0"], report["h1"], report["h2"]) == (0, 2, 1)
    written = ModuleData.from_module(m).to_dict()
    assert set(written) >= {"p", "coeff", "rank", "chi_gamma", "matrices"}
    assert set(written["matrices"]) == {"phi", "gamma", "delta"}


@pytest.mark.parametrize(
    "key, value", [("rank", 2), ("chi_gamma", "1+p+p^2")]
)
def test_module_file_header_checked(
    tmp_path: Path, key: str, value: Any
) -> None:
    payload = make_trivial_payload()
    payload[key] = value
    path = _write(tmp_path, "bad.json", payload)
    with pytest.raises(MalformedInput, match=key.split("_")[0]):
        ModuleData.load(path).to_module()
    assert _app("validate", "-i", str(path)) == 5
