import json
import subprocess
import sys

import numpy as np
import pytest

from kantorovich.cli import (matrix_file_text, parse_matrix_json,
                             parse_matrix_text, read_matrix_file,
                             write_matrix_file)


def run_cli(*args, timeout=120):
    return subprocess.run([sys.executable, "-m", "kantorovich", *args],
                          capture_output=True, text=True, timeout=timeout)


@pytest.fixture
def diag16(tmp_path):
    p = tmp_path / "diag16.txt"
    p.write_text("2\n1 0\n0 6\n")
    return str(p)


@pytest.fixture
def identity3(tmp_path):
    p = tmp_path / "eye3.txt"
    p.write_text("3\n1 0 0\n0 1 0\n0 0 1\n")
    return str(p)


@pytest.fixture
def gap3(tmp_path):
    p = tmp_path / "gap3.txt"
    p.write_text("3\n1 0 0\n0 2 0\n0 0 4.5\n")
    return str(p)


# --- matrix file formats -----------------------------------------------------

def test_plain_round_trip(tmp_path, rng):
    a = rng.standard_normal((4, 4))
    a = a + a.T
    path = str(tmp_path / "m.txt")
    write_matrix_file(path, a)
    np.testing.assert_array_equal(read_matrix_file(path), a)


def test_json_round_trip(tmp_path, rng):
    a = rng.standard_normal((3, 3))
    a = a + a.T
    path = str(tmp_path / "m.json")
    write_matrix_file(path, a, fmt="json")
    np.testing.assert_array_equal(read_matrix_file(path), a)
    obj = json.loads(open(path).read())
    assert obj["n"] == 3
    assert len(obj["entries"]) == 9


def test_json_detected_without_suffix(tmp_path):
    p = tmp_path / "m.dat"
    p.write_text('{"n": 2, "entries": [1, 0, 0, 6]}')
    np.testing.assert_array_equal(read_matrix_file(str(p)),
                                  np.diag([1.0, 6.0]))


def test_plain_parse_errors():
    with pytest.raises(ValueError):
        parse_matrix_text("")
    with pytest.raises(ValueError):
        parse_matrix_text("2\n1 0\n")  # missing row
    with pytest.raises(ValueError):
        parse_matrix_text("2\n1 0 0\n0 1\n")  # ragged row
    with pytest.raises(ValueError):
        parse_matrix_text("x\n1\n")
    with pytest.raises(ValueError):
        parse_matrix_text("2\n1 a\n0 1\n")


def test_json_parse_errors():
    with pytest.raises(ValueError):
        parse_matrix_json('{"entries": [1]}')
    with pytest.raises(ValueError):
        parse_matrix_json('{"n": 2, "entries": [1, 2, 3]}')


def test_matrix_text_17_digits():
    text = matrix_file_text(np.array([[1.0 / 3.0]]))
    assert "0.33333333333333331" in text


# --- analyze -----------------------------------------------------------------

def test_analyze_not_convex(diag16):
    res = run_cli("analyze", diag16)
    assert res.returncode == 1
    assert "status: NotConvex" in res.stdout
    assert "certificate: necessary-violated" in res.stdout
    assert "5.82842712474619" in res.stdout


def test_analyze_convex(identity3):
    res = run_cli("analyze", identity3)
    assert res.returncode == 0
    assert "status: Convex" in res.stdout


def test_analyze_gap_matrix(gap3):
    res = run_cli("analyze", gap3, "--samples-3d", "20000")
    assert res.returncode in (1, 2)
    assert "status: Convex" not in res.stdout


def test_analyze_json_format(diag16):
    res = run_cli("analyze", diag16, "--format", "json")
    assert res.returncode == 1
    out = json.loads(res.stdout)
    assert out["status"] == "NotConvex"
    assert out["kappa"] == 6.0
    assert out["witness"] is not None
    assert out["thresholds"]["necessary"] == pytest.approx(5.82842712474619)


def test_analyze_missing_file():
    res = run_cli("analyze", "/nonexistent/m.txt")
    assert res.returncode == 64
    assert "error" in res.stderr


def test_analyze_invalid_matrix(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2\n1 2\n2 1\n")  # indefinite
    res = run_cli("analyze", str(p))
    assert res.returncode == 64


def test_analyze_asymmetric_matrix(tmp_path):
    p = tmp_path / "asym.txt"
    p.write_text("2\n1 0.5\n0.2 1\n")
    res = run_cli("analyze", str(p))
    assert res.returncode == 64


def test_unknown_command_exits_64():
    res = run_cli("frobnicate")
    assert res.returncode == 64


def test_unknown_flag_exits_64(diag16):
    res = run_cli("analyze", diag16, "--no-such-flag")
    assert res.returncode == 64


# --- lemmas ------------------------------------------------------------------

def test_lemmas_coarse_pass(tmp_path):
    csv_path = str(tmp_path / "cells.csv")
    res = run_cli("lemmas", "--grid", "5", "--csv", csv_path)
    assert res.returncode == 0
    assert "overall: PASS" in res.stdout
    lines = open(csv_path).read().strip().split("\n")
    assert lines[0] == "grid_id,coords,min_value,tolerance,passed"
    assert len(lines) == 13  # 5 box + 3 robust + 4 detm
    assert all(line.endswith(",true") for line in lines[1:])


def test_lemmas_csv_deterministic(tmp_path):
    runs = []
    for k in range(2):
        p = str(tmp_path / f"r{k}.csv")
        res = run_cli("lemmas", "--grid", "4", "--csv", p)
        assert res.returncode == 0
        runs.append(open(p, "rb").read())
    assert runs[0] == runs[1]


def test_lemmas_fails_outside_box():
    res = run_cli("lemmas", "--grid", "5", "--omega-max", "6",
                  "--format", "csv")
    assert res.returncode == 1
    assert ",false" in res.stdout


def test_lemmas_csv_format_stdout():
    res = run_cli("lemmas", "--grid", "3", "--format", "csv")
    assert res.returncode == 0
    assert res.stdout.startswith("grid_id,coords,min_value,tolerance,passed")


# --- boundary ----------------------------------------------------------------

def test_boundary_two_point_2d(tmp_path):
    csv_path = str(tmp_path / "sweep.csv")
    res = run_cli("boundary", "--families", "two_point", "--dims", "2",
                  "--tol", "1e-2", "--samples-2d", "1024", "--csv", csv_path)
    assert res.returncode == 0
    lines = open(csv_path).read().strip().split("\n")
    assert lines[0] == "family,dim,kappa_lo,kappa_hi,tol,samples,seed,wall_ms"
    parts = lines[1].split(",")
    lo, hi = float(parts[2]), float(parts[3])
    assert lo <= 5.8284271247461903 <= hi


def test_boundary_deterministic_modulo_wall(tmp_path):
    outs = []
    for k in range(2):
        p = str(tmp_path / f"s{k}.csv")
        res = run_cli("boundary", "--families", "two_point", "--dims", "2",
                      "--tol", "5e-2", "--samples-2d", "512", "--csv", p)
        assert res.returncode == 0
        rows = [line.split(",")[:-1]  # drop wall_ms
                for line in open(p).read().strip().split("\n")]
        outs.append(rows)
    assert outs[0] == outs[1]


def test_boundary_bad_family():
    res = run_cli("boundary", "--families", "nope", "--dims", "2")
    assert res.returncode == 64


def test_boundary_bad_bracket_exits_70():
    res = run_cli("boundary", "--families", "two_point", "--dims", "2",
                  "--tol", "1e-2", "--samples-2d", "256",
                  "--bracket-lo", "1.0", "--bracket-hi", "2.0")
    assert res.returncode == 70


# --- lmi ---------------------------------------------------------------------

def test_lmi_pass_boundary():
    res = run_cli("lmi", "--dim", "2", "--delta", "6", "--samples-2d", "4096")
    assert res.returncode == 0
    assert "passed: true" in res.stdout


def test_lmi_fail():
    res = run_cli("lmi", "--dim", "2", "--delta", "6.2",
                  "--samples-2d", "1024")
    assert res.returncode == 1
    assert "passed: false" in res.stdout


def test_lmi_json():
    res = run_cli("lmi", "--dim", "3", "--delta", "2.5,3.0,2.8",
                  "--samples-3d", "5000", "--format", "json")
    assert res.returncode == 0
    out = json.loads(res.stdout)
    assert out["report"]["passed"] is True


def test_lmi_wrong_count_exits_64():
    res = run_cli("lmi", "--dim", "3", "--delta", "2.5,3.0")
    assert res.returncode == 64


def test_lmi_below_two_exits_64():
    res = run_cli("lmi", "--dim", "2", "--delta", "1.5")
    assert res.returncode == 64


def test_lmi_malformed_exits_64():
    res = run_cli("lmi", "--dim", "2", "--delta", "abc")
    assert res.returncode == 64


# --- hessian-check / kantorovich-bound ----------------------------------------

def test_hessian_check(tmp_path, rng):
    a = rng.standard_normal((3, 3))
    spd = a @ a.T + 3.0 * np.eye(3)
    p = str(tmp_path / "h.txt")
    write_matrix_file(p, spd)
    res = run_cli("hessian-check", p)
    assert res.returncode == 0
    assert "ok: true" in res.stdout


def test_kantorovich_bound_extremal(diag16):
    res = run_cli("kantorovich-bound", diag16, "--point", "1,1")
    assert res.returncode == 0
    assert "holds = true" in res.stdout
    assert "holds = false" in res.stdout  # the as-printed variant


def test_kantorovich_bound_json(diag16):
    res = run_cli("kantorovich-bound", diag16, "--point", "1,0",
                  "--format", "json")
    assert res.returncode == 0
    out = json.loads(res.stdout)
    assert out["classical"]["holds"] is True
    assert out["k_value"] == pytest.approx(1.0)


def test_kantorovich_bound_zero_point_exits_64(diag16):
    res = run_cli("kantorovich-bound", diag16, "--point", "0,0")
    assert res.returncode == 64
