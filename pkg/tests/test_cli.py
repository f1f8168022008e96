"""CLI behaviour: exit codes, deterministic reports, schema diagnostics."""

import json
from pathlib import Path

import pytest

from bishopdiscs.cli import main, parse_x_grid


def read(path):
    return Path(path).read_bytes()


def test_verify_quadric_exits_zero(tmp_path):
    out = tmp_path / "v"
    code = main(["verify", "--spec", "builtin:quadric", "--out", str(out),
                 "--r-list", "0.05,0.1"])
    assert code == 0
    report = json.loads((out / "verify_report.json").read_text())
    assert report["allPassed"]
    assert all(s["normU"] < 1e-10 for s in report["slices"])
    trivial = [c for c in report["checks"] if c["name"].startswith("trivial_")]
    assert trivial and all(c["passed"] for c in trivial)


def test_sweep_order7_reports_rate(tmp_path):
    out = tmp_path / "s"
    code = main(["sweep", "--spec", "builtin:order7", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "sweep_report.json").read_text())
    fit = report["report"]["rate_fits"][0]
    assert 4.5 <= fit["slope_norm_u"] <= 5.5
    csv_text = (out / "sweep.csv").read_text().splitlines()
    assert csv_text[0].split(",") == [
        "x2", "y2", "r", "iterations", "normU", "residual", "slopeU",
        "slopeDrU", "minDisjointDistance", "jacobianDefect"]
    assert len(csv_text) == 1 + 5


def test_reports_are_byte_identical(tmp_path):
    args = ["disc", "--spec", "builtin:order7", "--r-list", "0.05,0.1",
            "--seed", "3"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    ra = json.loads((out_a / "disc_report.json").read_text())
    rb = json.loads((out_b / "disc_report.json").read_text())
    ra["config"].pop("out")
    rb["config"].pop("out")
    assert json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)


def test_malformed_spec_fails_with_schema_message(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "N": 2, "l": 7, "validityRadius": 0.2,
        "lambda": [[[0, 0], 0.2]],
        "P": [],
        "K": [[5, 0, [[[0, 0], 0.01]], []], [0, 5, [[[0, 0], 0.01]], []]],
    }))
    code = main(["verify", "--spec", str(bad), "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "K coefficient" in err and "(0,5)" in err or "(5,0)" in err


def test_curve_command_with_figures(tmp_path):
    out = tmp_path / "c"
    code = main(["curve", "--spec", "builtin:perturbed", "--out", str(out),
                 "--r-list", "0.05,0.1", "--figures"])
    assert code == 0
    report = json.loads((out / "curve_report.json").read_text())
    assert all(s["derivAtZero"] > 0 for s in report["slices"])
    assert (out / "curves_0.svg").exists()
    assert (out / "mapped_grid.svg").exists()
    svg = (out / "curves_0.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_normalize_command(tmp_path):
    out = tmp_path / "n"
    code = main(["normalize", "--spec", "builtin:raw_example", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "normalize_report.json").read_text())
    assert report["maxLowOrderImagCoeff"] < 1e-10
    assert all(r["roundTripResidual"] < 1e-10 for r in report["records"].values())
    normalized = out / "normalized_spec.json"
    assert normalized.exists()
    from bishopdiscs import specio
    reloaded = specio.load(normalized)
    assert reloaded.l == 7


def test_invalid_run_config(tmp_path, capsys):
    code = main(["sweep", "--spec", "builtin:quadric", "--out", str(tmp_path / "x"),
                 "--ntheta", "100"])
    assert code == 2
    assert "power of two" in capsys.readouterr().err


def test_x_grid_parsing():
    assert parse_x_grid("0", 2) == [(0.0, 0.0)]
    grid = parse_x_grid("-0.05:0.05:3", 2)
    assert len(grid) == 9
    pts = parse_x_grid("0.1,0.2;0.3,0.4", 2)
    assert pts == [(0.1, 0.2), (0.3, 0.4)]
    with pytest.raises(ValueError):
        parse_x_grid("0.1;0.2,0.3,0.4", 2)
