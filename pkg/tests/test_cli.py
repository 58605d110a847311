import json

import pytest

from hyperdomain import cli
from hyperdomain.cli_common import glue_option_values
from hyperdomain.config import SEED_VAR


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    monkeypatch.delenv(SEED_VAR, raising=False)
    monkeypatch.setenv("HOME", str(tmp_path / "home"))


def build(tmp_path, name, *extra):
    out = tmp_path / name
    assert cli.main(["build", "--out", str(out), *extra]) == 0
    return out


def test_glue_negative_values():
    assert glue_option_values(["build", "--t", "-1,1"]) == ["build", "--t=-1,1"]
    assert glue_option_values(["--t=-1,1", "--verbose"]) == ["--t=-1,1", "--verbose"]


def test_build_lens(tmp_path, capsys):
    out = build(tmp_path, "lens.json", "--t", "-1,1", "--labels", "0")
    blob = json.loads(out.read_text())
    assert (blob["n"], blob["L"]) == (2, 2)
    assert "Wrote:" in capsys.readouterr().out


def test_build_minimal_open(tmp_path):
    out = build(tmp_path, "d.json", "--t", "0,1,2", "--labels", "1,0")
    blob = json.loads(out.read_text())
    assert (blob["n"], blob["L"]) == (4, 8)


def test_build_rejects_non_increasing(tmp_path, capsys):
    assert cli.main(["build", "--t", "1,1,2", "--out", str(tmp_path / "x.json")]) == 2
    assert "error:" in capsys.readouterr().err


def test_build_rejects_unparsable_t():
    with pytest.raises(SystemExit) as exc:
        cli.main(["build", "--t", "a,b"])
    assert exc.value.code == 2


def test_check_exit_codes(tmp_path):
    lens = build(tmp_path, "lens.json", "--t", "-1,1")
    literal = build(tmp_path, "lit.json", "--t", "0,1,2", "--labels", "0,1", "--mode", "literal")
    assert cli.main(["check", str(lens), "--samples", "50"]) == 0
    report = tmp_path / "report.json"
    assert cli.main(["check", str(literal), "--samples", "50", "--literal-report", "--json", str(report)]) == 1
    blob = json.loads(report.read_text())
    assert blob["nc_ok"] is False
    assert blob["conditions"]["5"]["status"] == "fail"
    sizes = {(e["size"], e["rank"]) for e in blob["conditions"]["5"]["measured"]["deficient"]}
    assert (4, 3) in sizes


def test_check_missing_file(tmp_path, capsys):
    assert cli.main(["check", str(tmp_path / "nope.json")]) == 2
    assert "error:" in capsys.readouterr().err


def test_check_json_is_reproducible(tmp_path):
    lens = build(tmp_path, "lens.json", "--t", "-1,1")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.main(["check", str(lens), "--samples", "40", "--seed", "3", "--json", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_from_environment(tmp_path, monkeypatch):
    lens = build(tmp_path, "lens.json", "--t", "-1,1")
    monkeypatch.setenv(SEED_VAR, "9")
    out = tmp_path / "r.json"
    assert cli.main(["check", str(lens), "--samples", "20", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["seed"] == 9


def test_fiber_command(tmp_path, capsys):
    lens = build(tmp_path, "lens.json", "--t", "-1,1")
    out = tmp_path / "fiber.json"
    assert cli.main(["fiber", str(lens), "--d", "1,1", "--t", "0", "--eps", "0.3", "--json", str(out)]) == 0
    blob = json.loads(out.read_text())
    assert blob["bounded"] is True
    assert blob["sampled_components"] == 1
    assert cli.main(["fiber", str(lens), "--t", "-3"]) == 0
    assert "nonempty=False" in capsys.readouterr().out


def test_fiber_json_is_byte_stable(tmp_path):
    lens = build(tmp_path, "lens.json", "--t", "-1,1")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert cli.main(["fiber", str(lens), "--t", "0.25", "--seed", "5", "--json", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_singular_command(tmp_path):
    lens = build(tmp_path, "lens.json", "--t", "-1,1")
    out = tmp_path / "sing.json"
    assert cli.main(["singular", str(lens), "--d", "1,1", "--samples", "50", "--json", str(out)]) == 0
    blob = json.loads(out.read_text())
    assert blob["predicted_values"] == [-1.0, 1.0]
    assert [c["verified"] for c in blob["corners"]] == [True, True]


def test_image_command(tmp_path):
    d = build(tmp_path, "d.json", "--t", "0,1,2", "--labels", "0,1")
    out = tmp_path / "image.json"
    assert cli.main(["image", str(d), "--json", str(out)]) == 0
    blob = json.loads(out.read_text())
    assert abs(blob["lo"] - 0.0) <= blob["step"]
    assert abs(blob["hi"] - 2.0) <= blob["step"]


def test_export_and_plot(tmp_path):
    d = build(tmp_path, "d.json", "--t", "0,1,2", "--labels", "0,0")
    system = tmp_path / "system.json"
    assert cli.main(["export-system", str(d), "--out", str(system)]) == 0
    assert json.loads(system.read_text())["ambient_dim"] == 15

    svg = tmp_path / "pinch.svg"
    assert cli.main(["plot", str(d), "--factor", "1", "--out", str(svg)]) == 0
    assert svg.read_text().count('class="corner"') == 2
    assert cli.main(["plot", str(d), "--factor", "5", "--out", str(svg)]) == 2


def test_plot_from_system_file(tmp_path):
    d = build(tmp_path, "d.json", "--t", "-1,1")
    system = tmp_path / "system.json"
    assert cli.main(["export-system", str(d), "--out", str(system)]) == 0
    svg = tmp_path / "lens.svg"
    assert cli.main(["plot", str(system), "--out", str(svg), "--window", "-2,2,-3,3"]) == 0
    assert svg.read_text().count('class="branch"') == 2
