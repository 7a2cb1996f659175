import json
import os

import pytest

from loopcliff.cli import DEFAULTS, SUITES, main, report_text, run_suite


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_every_suite_has_defaults():
    assert set(SUITES) == set(DEFAULTS)


@pytest.mark.parametrize(
    "argv",
    [
        ["clifford-relations", "--d", "4"],
        ["lagrangian-parity", "--trials", "10"],
        ["implementers", "--trials", "5"],
        ["loop-cocycles", "--d", "3", "--trials", "3", "--identity", "corrected"],
        ["dbeta", "--d", "3", "--trials", "2", "--points", "256"],
        ["superfactor-kinds", "--d", "4", "--trials", "5"],
        ["cech", "--fixture", "T2", "--trials", "3"],
        ["tensor-formula", "--fixture", "RP2"],
    ],
)
def test_small_runs_pass(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 0, out
    report = json.loads(out)
    assert report["pass"] and report["n_failed"] == 0
    assert "PASS" in err


def test_reports_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["implementers", "--trials", "4", "--seed", "3", "--report", str(p)]) == 0
    capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert "wall" not in paths[0].read_text()


def test_seed_changes_the_report():
    a = report_text(run_suite("lagrangian-parity", {"trials": 5}, seed=1))
    b = report_text(run_suite("lagrangian-parity", {"trials": 5}, seed=2))
    assert a != b


def test_superfactor_kinds_small(capsys):
    code, out, _ = run(["superfactor-kinds", "--d", "6", "--trials", "0"], capsys)
    assert code == 0
    kinds = {c["id"]: c["info"]["kind"] for c in json.loads(out)["checks"] if c["id"].startswith("kind-Cl")}
    assert [kinds[f"kind-Cl{d}"] for d in range(1, 7)] == ["odd-kind", "even-kind"] * 3


def test_literal_loop_identity_reports_failures(capsys):
    code, out, err = run(["loop-cocycles", "--d", "3", "--trials", "3"], capsys)
    assert code == 1
    report = json.loads(out)
    assert not report["pass"]
    failed = [c for c in report["checks"] if not c["pass"]]
    assert failed and all(c["residual"] > 1e-9 for c in failed)
    assert "FAIL" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["no-such-suite"],
        [],
        ["dbeta", "--trials", "many"],
        ["loop-cocycles", "--modes", "1"],
        ["cech", "--fixture", "Klein"],
        ["lagrangian-parity", "--trials", "-1"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err


def test_unwritable_report_exits_3(tmp_path, capsys):
    target = tmp_path / "missing" / "report.json"
    code, _, err = run(["superfactor-kinds", "--d", "2", "--trials", "1", "--report", str(target)], capsys)
    assert code == 3
    assert str(target) in err


def test_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("VERIFY_TOL", "1e-3")
    code, out, _ = run(["implementers", "--trials", "2"], capsys)
    assert code == 0
    assert json.loads(out)["parameters"]["tol"] == 1e-3
    code, out, _ = run(["implementers", "--trials", "2", "--tol", "1e-7"], capsys)
    assert json.loads(out)["parameters"]["tol"] == 1e-7


def test_flags_outside_a_suite_are_ignored(capsys):
    code, out, _ = run(["tensor-formula", "--fixture", "T2", "--cutoff", "99"], capsys)
    assert code == 0
    assert "cutoff" not in json.loads(out)["parameters"]


def test_console_script_is_installed():
    from importlib.metadata import entry_points

    names = {ep.name: ep.value for ep in entry_points(group="console_scripts")}
    assert names.get("verify") == "loopcliff.cli:main"
    assert os.path.exists(os.path.join(os.path.dirname(__file__), "..", "pyproject.toml"))
