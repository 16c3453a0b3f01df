import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from geoaffine.affine import AffineProbe
from geoaffine.cli import main
from geoaffine.levelset import Chart, contour_crosses_between, level_grid, levelset_svg
from geoaffine.manifold import SpaceSpec, distance
from geoaffine.report import SCAN_COLUMNS, SCHEMA, normalize, to_json


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else None


# --- verify-counterexample ------------------------------------------------------------


def test_verify_counterexample_default(tmp_path, capsys):
    code, text = run(tmp_path, "verify-counterexample")
    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert [ln.split()[0] for ln in lines] == ["PASS"] * 4
    assert "-0.43040894096" in lines[0] and "-0.34657359028" in lines[0]
    doc = json.loads(text)
    assert doc["schema"] == SCHEMA and doc["kind"] == "counterexample"


def test_verify_counterexample_tight_tolerance(tmp_path, capsys):
    code, _ = run(tmp_path, "verify-counterexample", "--tol", "1e-15")
    lines = capsys.readouterr().out.splitlines()
    assert code == 1
    assert next(ln for ln in lines if "(iii)" in ln).startswith("FAIL")


def test_verify_counterexample_csv(tmp_path, capsys):
    code, text = run(tmp_path, "verify-counterexample", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert {r["assertion"] for r in rows} == {"i", "ii", "iii", "iv"}
    assert all(r["passed"] == "true" for r in rows)


def test_report_to_stdout_keeps_summary_on_stderr(capsys):
    assert main(["verify-counterexample"]) == 0
    cap = capsys.readouterr()
    assert json.loads(cap.out)["kind"] == "counterexample"
    assert cap.err.count("PASS") == 4


# --- scan / sweep -------------------------------------------------------------------------


def test_scan_example_chord(tmp_path, capsys):
    code, text = run(tmp_path, "scan", "--space", "halfplane", "--c", "-0.4", "--inject-paper-points")
    assert code == 0
    w = json.loads(text)["witness"]
    assert w["p"] == [0.5, 0.5] and w["q"] == [-0.5, 0.5]
    assert w["t"] == pytest.approx(0.5, abs=1e-6)
    assert "WitnessFound" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["--space", "sphere", "--kappa", "1", "--c", "-0.2"], ["--space", "euclidean", "--c", "7"]])
def test_scan_no_witness(tmp_path, argv):
    code, text = run(tmp_path, "scan", *argv)
    assert code == 0 and json.loads(text)["verdict"] == "NoWitnessAtBudget"


def test_scan_csv_columns(tmp_path):
    code, text = run(tmp_path, "scan", "--c", "-0.4", "--inject-paper-points", "--format", "csv", "--pairs", "50")
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == SCAN_COLUMNS and len(rows) == 2
    assert rows[1][1] == "WitnessFound"


def test_scan_empty_sublevel_exit(capsys):
    assert main(["scan", "--space", "sphere", "--c", "-3", "--pairs", "10"]) == 3
    assert "EmptySublevel" in capsys.readouterr().err


def test_scan_missing_level_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["scan"])
    assert e.value.code == 2


def test_bad_format_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["scan", "--c", "0", "--format", "svg"])
    assert e.value.code == 2


def test_sweep_sphere(tmp_path):
    code, text = run(tmp_path, "sweep", "--space", "sphere", "--c-grid", "-0.2,0.5,1.6", "--inject-construction")
    assert code == 0
    rows = json.loads(text)["rows"]
    assert [r["verdict"] for r in rows] == ["NoWitnessAtBudget", "WitnessFound", "NoWitnessAtBudget"]
    assert all(r["agrees"] for r in rows)


def test_sweep_csv(tmp_path):
    code, text = run(tmp_path, "sweep", "--c-grid", "-0.4", "0.1", "--inject-construction", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and [r["verdict"] for r in rows] == ["WitnessFound", "NoWitnessAtBudget"]


# --- triangles / transport ------------------------------------------------------------------


@pytest.mark.parametrize("space", ["sphere", "halfplane", "euclidean"])
def test_triangles(tmp_path, space):
    code, text = run(tmp_path, "triangles", "--space", space, "--triangles", "300")
    d = json.loads(text)
    assert code == 0
    if space == "sphere":
        assert d["combination"]["min_sum"] >= 1 - 1e-9
    elif space == "halfplane":
        assert d["combination"]["max_sum"] <= 1 + 1e-9
    else:
        assert abs(d["law_of_cosines"]["min_expression"]) <= 1e-10 and abs(d["law_of_cosines"]["max_expression"]) <= 1e-10


def test_transport_command(tmp_path):
    code, text = run(tmp_path, "transport", "--x0", "0,1", "--to", "0.5,0.5", "--u0", "0,1")
    d = json.loads(text)
    assert code == 0 and d["transported"] == pytest.approx([0.3, 0.4], abs=1e-12)


def test_transport_geometry_error(capsys):
    assert main(["transport", "--space", "sphere", "--x0", "0,0,1", "--to", "0,0,-1", "--u0", "1,0,0"]) == 3


# --- determinism ------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-counterexample"],
        ["scan", "--space", "sphere", "--c", "0.8", "--pairs", "300"],
        ["sweep", "--space", "sphere", "--c-grid", "-0.1,0.2", "--pairs", "200", "--format", "csv"],
        ["triangles", "--space", "halfplane", "--triangles", "200"],
        ["plot-levelset", "--resolution", "41"],
    ],
    ids=["counterexample", "scan", "sweep", "triangles", "plot"],
)
def test_byte_identical_reruns(tmp_path, argv):
    main([*argv, "--out", str(tmp_path / "a")])
    main([*argv, "--out", str(tmp_path / "b")])
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "geoaffine", "verify-counterexample", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.count("PASS") == 4


# --- reports ---------------------------------------------------------------------------------


def test_json_number_format():
    text = to_json("x", {"a": math.pi, "b": math.inf, "c": np.float64(1e-20), "d": [1, 2.5]})
    d = json.loads(text)
    assert d["a"] == 3.14159265359 and d["b"] == "inf" and d["d"] == [1, 2.5]
    assert list(d) == sorted(d)


def test_normalize_handles_numpy():
    assert normalize({"v": np.array([1.0, 2.0]), "i": np.int64(3)}) == {"v": [1.0, 2.0], "i": 3}


# --- level sets ------------------------------------------------------------------------------


def test_plot_contour_separates_chord_ends():
    grid = level_grid(AffineProbe.standard_halfplane(), -0.4, resolution=241)
    assert contour_crosses_between(grid, (0.5, 0.5), (0.0, 1 / math.sqrt(2)))
    assert contour_crosses_between(grid, (-0.5, 0.5), (0.0, 1 / math.sqrt(2)))
    assert not contour_crosses_between(grid, (0.5, 0.5), (-0.5, 0.5))
    assert grid.window == (-1.5, 1.5, 0.02, 2.0)


def test_plot_zero_level_passes_through_x0():
    grid = level_grid(AffineProbe.standard_halfplane(), 0.0, resolution=241)
    pts = np.concatenate(grid.contour())
    assert np.min(np.hypot(pts[:, 0], pts[:, 1] - 1.0)) < 1e-3


def test_plot_sphere_contour_closed_inside_cap():
    S2 = SpaceSpec.sphere(2, 1.0)
    probe = AffineProbe.canonical(S2)
    grid = level_grid(probe, 0.5, resolution=201)
    chart = Chart(S2)
    lines = grid.contour()
    assert lines
    for seg in lines:
        assert np.allclose(seg[0], seg[-1], atol=1e-9)
        for x in chart.to_space(seg):
            assert distance(S2, probe.x0, S2.point(x / np.linalg.norm(x))) < math.pi / 2


def test_plot_svg(tmp_path):
    code, text = run(tmp_path, "plot-levelset", "--c", "-0.4", "--resolution", "61")
    assert code == 0 and text.startswith("<svg") and "<polyline" in text
    assert "x0" in levelset_svg(level_grid(AffineProbe.standard_halfplane(), -0.4, resolution=31))


def test_plot_csv(tmp_path):
    code, text = run(tmp_path, "plot-levelset", "--format", "csv", "--resolution", "11")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t1", "t2", "f0"] and len(rows) == 1 + 11 * 11


def test_plot_rejects_higher_dimension(capsys):
    assert main(["plot-levelset", "--space", "sphere", "--dim", "3", "--c", "0.5"]) == 3
    assert "UnsupportedDimension" in capsys.readouterr().err
