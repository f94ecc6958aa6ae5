"""Command-line behaviour: output formats, exit codes, error objects and config files."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from markovsymp import cli
from markovsymp.errors import InvalidInput


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_bracket(capsys):
    code, out = run(capsys, "bracket", "x", "y", "--surface", "markov")
    assert code == 0
    assert json.loads(out)["bracket"] == "2*z^1-3*x^1*y^1"


def test_enumerate_lines(capsys):
    code, out = run(capsys, "markov", "enumerate", "--bound", "30")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(rows) == 5


def test_domain_error_object(capsys):
    code, out = run(capsys, "markov", "lagrange", "--z", "3")
    data = json.loads(out)
    assert code == 1
    assert data["error"]["code"] == "not_markov_number"
    assert data["input"] == ["markov", "lagrange", "--z", "3"]


def test_bad_polynomial(capsys):
    code, out = run(capsys, "bracket", "x +* y", "y", "--surface", "markov")
    assert code == 1 and json.loads(out)["error"]["code"] == "invalid_input"


def test_usage_error(capsys):
    assert cli.main(["no-such-command"]) == 2
    assert cli.main(["markov", "enumerate"]) == 2


def test_classify(capsys):
    code, out = run(capsys, "classify", "--params", '{"A": 8, "B": 8, "C": 8, "D": -28, "E": 1}')
    (rep,) = json.loads(out)
    assert code == 0 and rep["ade_type"] == "D4"


def test_flow_and_orbit(capsys, tmp_path):
    csv = tmp_path / "orbit.csv"
    code, out = run(capsys, "flow", "--surface", "markov", "--point", "[1, 1, 1]", "--axis", "z",
                    "--time", "1/2", "--symplectic", "--orbit-csv", str(csv), "--orbit-samples", "4")
    data = json.loads(out)
    assert code == 0 and float(data["symplectic_defect"]) < 1e-6
    assert len(csv.read_text().strip().splitlines()) >= 4


def test_flow_needs_time(capsys):
    code, out = run(capsys, "flow", "--surface", "markov", "--point", "[1, 1, 1]", "--axis", "z")
    assert code == 1


def test_certify_monomial(capsys):
    code, out = run(capsys, "certify", "--surface", "markov", "--max-gen-deg", "3", "--max-deg", "3",
                    "--monomial", "x*y*z")
    assert code == 0 and "x" in out


def test_tame_build_and_verify(capsys, tmp_path):
    path = tmp_path / "sol.json"
    code, _ = run(capsys, "--output", str(path), "tame", "build", "--n", "2")
    assert code == 0 and path.exists()
    code, out = run(capsys, "tame", "verify", "--solution", str(path))
    assert code == 0


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# surface\nA = 4\nB = 0\nC = 0\nD = -4\nE = 1\nprecision = 300\nseed = 3\n")
    parsed = cli.read_config(str(cfg))
    assert parsed["precision"] == 300 and parsed["params"]["A"] == "4"
    code, out = run(capsys, "--config", str(cfg), "classify")
    assert code == 0 and json.loads(out)[0]["ade_type"] == "A3"


@pytest.mark.parametrize("text", ["precision = lots\n", "colour = red\n", "just words\n"])
def test_config_errors(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    with pytest.raises(InvalidInput):
        cli.read_config(str(cfg))


def test_precision_floor(capsys):
    code, out = run(capsys, "--precision", "8", "markov", "enumerate", "--bound", "5")
    assert code == 1


def test_selftest_passes():
    report = cli.selftest(0)
    assert report["passed"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "markovsymp.cli", "markov", "enumerate", "--bound", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 2
