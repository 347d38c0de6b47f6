import json

import pytest

from gridcover.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_phi_and_float(capsys):
    assert run(capsys, "phi", "--standard", "2") == (0, "3/2\n", "")
    code, out, _ = run(capsys, "--float", "phi", "--standard", "2")
    assert out == "3/2 (approx 1.500000)\n"
    code, out, _ = run(capsys, "phi", "--standard", "2", "--float")
    assert out.startswith("3/2 (approx")


def test_cov_and_output(capsys, tmp_path):
    target = tmp_path / "c.txt"
    code, out, _ = run(capsys, "cov", "--standard", "3", "-k", "2", "-o", str(target))
    assert (code, out) == (0, "6\n")
    assert target.exists()


def test_cov_budget_exit(capsys):
    code, out, _ = run(capsys, "cov", "--standard", "5", "-k", "3", "--nodes", "1")
    assert code == 3 and out.startswith("timeout best=")


def test_lines_listing(capsys):
    code, out, _ = run(capsys, "lines", "--standard", "2")
    assert code == 0
    first, *rest = out.splitlines()
    assert first == "3" and len(rest) == 3
    assert any("x+y=1" in r for r in rest)


def test_construct(capsys):
    assert run(capsys, "construct", "standard", "5", "-k", "8")[:2] == (0, "size=49 valid=true\n")
    assert run(capsys, "construct", "wide", "--standard", "3", "-k", "1")[:2] == (0, "size=4 valid=true\n")


def test_certify(capsys, tmp_path):
    assert run(capsys, "certify", "restricted", "5")[:2] == (0, "t=1 z=5/18 total=35/6 feasible=true\n")
    out_file = tmp_path / "w.json"
    code, out, _ = run(capsys, "certify", "generic", "--generic", "4", "3", "--seed", "1", "-o", str(out_file))
    assert (code, out) == (0, "total=19/5 feasible=true\n")
    assert json.loads(out_file.read_text())["total"] == "19/5"
    code, out, _ = run(capsys, "certify", "restricted", "13", "--audit-full")
    assert code == 0 and "full-family violations=" in out and "slope 1:" in out


def test_certify_degenerate_delta_fails(capsys):
    code, out, _ = run(capsys, "certify", "delta", "--standard", "4", "--delta", "5")
    assert code == 1 and out.endswith("feasible=false\n")


def test_delta_and_bounds(capsys):
    assert run(capsys, "delta", "--standard", "5")[:2] == (0, "3\n")
    code, out, _ = run(capsys, "bounds", "--generic", "4", "3", "--seed", "1", "-k", "2")
    assert code == 0 and "ball_serra=8" in out.splitlines()


@pytest.mark.parametrize("argv", [
    ["phi"],
    ["cov", "--standard", "3"],
    ["certify", "generic", "--standard", "4"],
    ["certify", "restricted"],
    ["nonsense"],
    ["experiment", "E9", "-o", "/tmp/x"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_experiment_command(capsys, tmp_path):
    code, out, _ = run(capsys, "experiment", "E5", "-o", str(tmp_path))
    assert code == 0 and out.startswith("E5 delta-generic grids: 10 cells, 0 failures")
    assert (tmp_path / "E5.csv").exists() and (tmp_path / "E5.json").exists()
