import json

import pytest

from padic_gz import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classical_json(capsys):
    code, out, _ = run(capsys, "classical-gz", "--format", "json")
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "pass"
    assert report["schemaVersion"] == cli.SCHEMA_VERSION
    assert report["results"]["product"]["exponents"]["433"] == 2


def test_shimura_text(capsys):
    code, out, _ = run(capsys, "shimura-rhs")
    assert code == 0 and out.startswith("shimura-rhs: PASS")
    assert "exponent: 2" in out


def test_usage_errors(capsys):
    assert run(capsys, "nope")[0] == 64
    assert run(capsys, "classical-gz", "--precision", "x")[0] == 64
    assert run(capsys, "theta-lhs", "--precision", "0")[0] == 64


@pytest.mark.parametrize("argv", [
    ("identity-check", "--q", "11"),
    ("census", "--d2", "-9"),
    ("classical-gz", "--d1", "-43", "--d2", "-43"),
])
def test_invalid_setup_exit(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 64 and "invalid configuration" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": 3, "q": 2, "n-max": 2, "precision": 6}))
    report_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "theta-lhs", "--config", str(cfg), "--n-max", "3",
                     "--report", str(report_path), "--workers", "1")
    report = json.loads(report_path.read_text())
    assert report["config"]["p"] == 3 and report["config"]["n_max"] == 3
    assert report["config"]["precision"] == 6
    assert code in (0, 2) and code == {"pass": 0, "inconclusive": 2}[report["verdict"]]


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run(capsys, "classical-gz", "--config", str(cfg))[0] == 64
    assert run(capsys, "classical-gz", "--config", str(tmp_path / "missing.json"))[0] == 64


def test_reports_are_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        run(capsys, "shimura-rhs", "--report", str(path))
    assert paths[0].read_text() == paths[1].read_text()
    assert "timing" not in json.loads(paths[0].read_text())


def test_timing_opt_in(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(capsys, "classical-gz", "--timing", "--report", str(path))
    assert json.loads(path.read_text())["timing"]["seconds"] >= 0


def test_inconclusive_exit(capsys):
    code, out, _ = run(capsys, "theta-lhs", "--p", "3", "--q", "5", "--workers", "1", "--format", "json")
    assert code == 2 and json.loads(out)["verdict"] == "inconclusive"


def test_census_on_unsupported_q(capsys):
    code, out, _ = run(capsys, "census", "--q", "7", "--format", "json")
    assert code == 2 and "no tabulated order" in json.loads(out)["results"]["orientation"]["note"]


def test_module_entry():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "padic_gz", "classical-gz"], capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
