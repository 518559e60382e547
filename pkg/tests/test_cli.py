import json

import pytest

from handlers import verify
from handlers.verify import CRITERIA
from lshape import build_parser, main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_polygon_writes_weights(tmp_path):
    assert run(tmp_path, "polygon", "--format", "csv") == 0
    lines = (tmp_path / "polygon.csv").read_text().splitlines()
    assert lines[0] == "key,value"
    assert "annuli.Pi_1.alpha,1/3" in lines
    assert "annuli.Pi_2.alpha,2/3" in lines
    assert "euler_characteristic,1" in lines


def test_polygon_json_twist(tmp_path):
    assert run(tmp_path, "polygon", "--format", "json", "--target", "1,1,1/3", "--twist") == 0
    payload = json.loads((tmp_path / "polygon.json").read_text())
    assert payload["twist"] == {"t": "2", "n": [3, 1]}
    assert payload["metadata"]["q0"] == "1/2"
    assert "polyplane_point" not in payload


def test_polygon_degenerate_twist(tmp_path):
    assert run(tmp_path, "polygon", "--target", "1,0,1/2", "--twist") == 3
    assert run(tmp_path, "polygon", "--target", "1,0,1/2") == 0


def test_polygon_invalid_target(tmp_path):
    assert run(tmp_path, "polygon", "--target", "1,1,2") == 2
    assert run(tmp_path, "polygon", "--target", "1,1") == 2


def test_bad_config_file(tmp_path):
    path = tmp_path / "bad.env"
    path.write_text("LSHAPE_A0=1/0\n")
    assert run(tmp_path, "polygon", "--config", str(path)) == 2
    assert run(tmp_path, "polygon", "--config", str(tmp_path / "missing.env")) == 2


def test_cover_table(tmp_path, capsys):
    assert run(tmp_path, "cover-table") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("l,k1,k2")
    assert len(lines) == 6
    assert all(line.endswith(",yes") for line in lines[1:])
    assert all(len(line.split(",")) == len(lines[0].split(",")) for line in lines)


def test_cover_table_custom_spec(tmp_path, capsys):
    assert run(tmp_path, "cover-table", "--spec", "1,0,0,0,1,0") == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("1,0,0,0,1,0,1,0,2")
    assert run(tmp_path, "cover-table", "--spec", "0,0,0,0,1,1") == 2
    assert run(tmp_path, "cover-table", "--spec", "1,2") == 2


def test_annulus_check(tmp_path, capsys):
    assert run(tmp_path, "annulus-check", "--count", "3") == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert (tmp_path / "annulus.csv").exists()
    assert run(tmp_path, "annulus-check", "--r0", "1") == 2


def test_solve_rejects_bad_initial(tmp_path):
    assert run(tmp_path, "solve", "--initial", "0.1,0.2,0.0") == 4
    assert run(tmp_path, "solve", "--initial", "a,b,c") == 2


def test_sweep_rejects_t_beyond_q0(tmp_path):
    assert run(tmp_path, "sweep", "--t-max", "0.6") == 2


def test_overrides_reach_the_config(tmp_path):
    args = build_parser().parse_args(["sweep", "--t-min", "0.01", "--linear", "--tol", "1e-9"])
    assert args.t_min == 0.01
    assert args.linear
    assert args.tol == 1e-9


@pytest.mark.slow
def test_solve_base_point(tmp_path):
    assert run(tmp_path, "solve", "--format", "json") == 0
    payload = json.loads((tmp_path / "solve.json").read_text())
    assert float(payload["residual"]) <= 1e-8
    assert float(payload["prevertices"]["r"]) > 0


@pytest.mark.slow
def test_single_point_sweep(tmp_path):
    code = run(tmp_path, "sweep", "--t-min", "0.05", "--t-max", "0.05", "--t-count", "1", "--jobs", "1")
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    header = [line for line in lines if not line.startswith("#")]
    assert header[0].startswith("t,lambda,zeta,r")
    assert len(header) == 2
    assert header[1].endswith(",")
    assert not (tmp_path / "fit.csv").exists()


@pytest.mark.slow
def test_verify_quick_passes_every_criterion(tmp_path, capsys):
    assert run(tmp_path, "verify", "--quick") == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == len(CRITERIA)
    failed = [line for line in lines if not line.startswith("PASS")]
    assert not failed, failed


def test_verify_reports_tolerance_below_rounding_floor(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(verify, "CRITERIA", (("quadrature convergence", verify.quadrature_convergence),))
    assert run(tmp_path, "verify", "--quick", "--tol", "1e-14") == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL   1. quadrature convergence:")
    assert "binary64 floor" in out
