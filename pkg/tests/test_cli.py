import json
import subprocess
import sys
from fractions import Fraction

import pytest

from w2lab import io as wio
from w2lab.cli import run
from w2lab.measure import same_measure

CROSS_MU = '{"dimension": 2, "points": [[-1, 0], [1, 0]], "weights": ["1/2", "1/2"]}'
CROSS_NU = '{"dimension": 2, "points": [[0, -1], [0, 1]]}'
LINE = '{"points": [[0]]}'
PM1 = '{"points": [[-1], [1]]}'


def call(capsys, *argv):
    status = run(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def doc(out):
    d = json.loads(out)
    assert d["schema"] == wio.SCHEMA
    return d


def test_w2_cross(capsys):
    status, out, _ = call(capsys, "w2", "--mu", CROSS_MU, "--nu", CROSS_NU)
    d = doc(out)
    assert status == 0 and d["w2_squared"] == "2"
    assert d["certificate"]["unique"] is False
    assert d["certificate"]["conditional_variance"] == "1"


def test_files_and_out(tmp_path, capsys):
    (tmp_path / "mu.json").write_text(CROSS_MU)
    (tmp_path / "nu.json").write_text(CROSS_NU)
    target = tmp_path / "res.json"
    status, out, _ = call(capsys, "w2", "--mu", str(tmp_path / "mu.json"), "--nu", str(tmp_path / "nu.json"),
                          "--out", str(target))
    assert status == 0 and out == ""
    assert doc(target.read_text())["w2_squared"] == "2"


def test_float_mode(capsys):
    status, out, _ = call(capsys, "w2", "--mu", CROSS_MU, "--nu", CROSS_NU, "--mode", "float")
    assert status == 0 and doc(out)["w2_squared"] == 2.0


def test_domain_errors(capsys):
    status, out, _ = call(capsys, "w2", "--mu", CROSS_MU, "--nu", LINE)
    assert status == 1 and doc(out)["error"]["code"] == "dimension_mismatch"
    status, out, _ = call(capsys, "w2", "--mu", '{"points": [[0.5]]}', "--nu", LINE)
    assert status == 1 and doc(out)["error"]["code"] == "invalid_input"
    status, out, _ = call(capsys, "w2", "--mu", "/nonexistent.json", "--nu", LINE)
    assert status == 1 and doc(out)["error"]["code"] == "invalid_input"
    status, out, _ = call(capsys, "fdcheck", "--mu", LINE, "--nu", PM1, "--directions", "[[1]]")
    assert status == 1 and doc(out)["error"]["code"] == "not_differentiable"
    status, out, _ = call(capsys, "primedemo", "--nu", LINE)
    assert status == 1 and doc(out)["error"]["code"] == "dirac_target"


def test_usage_errors(capsys):
    for argv in ([], ["bogus"], ["w2", "--mu", CROSS_MU], ["w2", "--tol", "-1"], ["fdcheck", "--t-list", "a,b",
                                                                                    "--mu", LINE, "--nu", LINE]):
        status, out, _ = call(capsys, *argv)
        assert status == 2 and doc(out)["error"]["code"] == "usage"


def test_every_subcommand_round_trips(capsys):
    cases = [
        ("w2", "--mu", CROSS_MU, "--nu", CROSS_NU),
        ("oned", "--mu", LINE, "--nu", PM1),
        ("cx", "--eta", LINE, "--nu", PM1),
        ("cx", "--eta", PM1, "--nu", LINE),
        ("decompose", "--mu", CROSS_MU, "--nu", CROSS_NU, "--eta", CROSS_NU),
        ("decompose", "--mu", CROSS_MU, "--nu", CROSS_NU, "--coupling", '[["1/8", "3/8"], ["3/8", "1/8"]]'),
        ("eta", "--mu", CROSS_MU, "--nu", CROSS_NU),
        ("eta", "--mu", CROSS_MU, "--nu", CROSS_NU, "--phi", '{"A": [[1, 0], [0, 1]], "b": [0, 0]}', "--tie-break"),
        ("diff", "--mu", LINE, "--nu", PM1),
        ("diff", "--mu", PM1, "--nu", PM1),
    ]
    for argv in cases:
        status, out, _ = call(capsys, *argv)
        assert status == 0, argv
        d = doc(out)
        for key, value in d.items():
            if isinstance(value, dict) and "points" in value:
                wio.measure_from_json(value)
    status, out, _ = call(capsys, *cases[5])
    d = doc(out)
    assert same_measure(wio.measure_from_json(d["eta"]), wio.measure_from_json(
        {"points": [[0, "1/2"], [0, "-1/2"]]}))
    assert d["residual"] == "0"


def test_csv_commands(capsys):
    status, out, err = call(capsys, "fdcheck", "--mu", '{"points": [[0], [1]]}', "--nu", '{"points": [[2], [3]]}',
                            "--directions", "[[1], [1]]", "--t-list", "1/10,1/100")
    assert status == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,residual"
    assert [ln.split(",")[1] for ln in lines[1:]] == ["1/100", "1/10000"]
    assert "fitted_order=2.0000" in err
    status, out, err = call(capsys, "fdcheck", "--mu", LINE, "--nu", PM1)
    assert status == 0 and "differentiable=False" in err
    status, out, _ = call(capsys, "primedemo", "--nu", PM1, "--primes", "2,3,5,7")
    assert status == 0
    rows = [ln.split(",") for ln in out.strip().splitlines()]
    assert rows[0] == ["p", "mass_feasible", "optimal_is_map"]
    assert [r[1] for r in rows[1:]] == ["1", "0", "0", "0"]


def test_example_suite(capsys):
    status, out, _ = call(capsys, "paper-suite")
    d = doc(out)
    assert status == 0 and d["passed"] and len(d["checks"]) == 7


def test_deterministic_output_via_subprocess():
    argv = [sys.executable, "-m", "w2lab", "eta", "--mu", CROSS_MU, "--nu", '{"points": [[-1,-1],[0,-1],[0,1],[1,1]]}',
            "--phi", '{"A": [["1.36", "-0.6"], ["-0.6", 1]]}']
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    d = json.loads(first)
    pts = sorted(tuple(p) for p in d["eta"]["points"])
    assert pts[0] == pytest.approx((-0.5, -0.3), abs=1e-7)
    argv = [sys.executable, "-m", "w2lab", "primedemo", "--nu", PM1, "--seed", "3"]
    assert subprocess.run(argv, capture_output=True).stdout == subprocess.run(argv, capture_output=True).stdout


def test_rational_strings_survive():
    mu = wio.measure_from_json({"points": [["1/3"], ["2/3"]], "weights": ["1/7", "6/7"]})
    again = wio.measure_from_json(json.loads(json.dumps(wio.measure_to_json(mu))))
    assert same_measure(mu, again) and again.weights[0] == Fraction(1, 7)
