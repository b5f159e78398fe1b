import json
import subprocess
import sys

import pytest

from bvtt import cli

from matrix import EXPECTED, EXTRA, STRUCTURE_COMMANDS, document_text


def run(tmp_path, key, argv):
    path = tmp_path / "input.txt"
    path.write_text(document_text(key), encoding="utf-8")
    out = tmp_path / "report.json"
    code = cli.main([argv[0], str(path), "--out", str(out)] + argv[1:])
    return code, (json.loads(out.read_text(encoding="utf-8")) if out.exists() else None)


@pytest.mark.parametrize("key", list(EXPECTED))
@pytest.mark.parametrize("k", range(len(STRUCTURE_COMMANDS)), ids=STRUCTURE_COMMANDS)
def test_structure_command_matrix(tmp_path, key, k):
    code, report = run(tmp_path, key, [STRUCTURE_COMMANDS[k]])
    assert code == EXPECTED[key][k]
    if code != 2:
        assert report["verdict"] is (code == 0)
        assert report["command"] == STRUCTURE_COMMANDS[k]


@pytest.mark.parametrize("key, argv, want", EXTRA, ids=[f"{k}-{' '.join(a)}" for k, a, _ in EXTRA])
def test_solver_command_matrix(tmp_path, key, argv, want):
    code, _ = run(tmp_path, key, argv)
    assert code == want


def test_degeneration_failure_carries_d1_witness(tmp_path):
    code, report = run(tmp_path, "delta_only", ["degeneration"])
    assert code == 1
    assert report["d1_witness"]
    assert report["degenerates_at_E1"]["verdict"] is False


def test_deform_report_has_series(tmp_path):
    code, report = run(tmp_path, "abelian_torus",
                       ["deform", "--class", "1,0,0", "--order", "8", "--method", "tt"])
    assert code == 0
    assert len(report["series"]["coefficients"]) == 8


def test_reports_are_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    for key, argv in [("square_bicomplex", ["quasiabelian"]), ("heisenberg", ["transfer", "--arity", "3"])]:
        run(a, key, argv)
        run(b, key, argv)
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["nonsense"])
    assert err.value.code == 2
    assert cli.main(["verify", str(tmp_path / "missing.txt")]) == 2
    assert cli.main(["gallery", "nope"]) == 2
    assert cli.main(["gallery", "square_bicomplex", "--replay"]) == 0


def test_gallery_pipes_into_verify():
    listing = subprocess.run([sys.executable, "-m", "bvtt.cli", "gallery", "heisenberg"],
                             capture_output=True, check=True)
    res = subprocess.run([sys.executable, "-m", "bvtt.cli", "verify", "-"], input=listing.stdout,
                         capture_output=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["verdict"] is True
