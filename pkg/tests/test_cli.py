import json
import math
import subprocess
import sys

import pytest

from afstruct import __version__
from afstruct.cli import EXIT_FAILED, EXIT_INPUT, EXIT_IO, EXIT_OK, main

SMALL = """
schema_version = 1
seed = 42
n_points = 8
n_tangents = 3
[grid]
p = [1, 2]
q = [2]
nu = ["plus", "alternating"]
eps = ["plus"]
R = [1.0]
split = [[1, 1]]
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "suite.toml"
    path.write_text(SMALL)
    return path


def test_verify_small_grid(small_config, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", "--config", str(small_config), "--out", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["schema_version"] == 1 and data["passed"] is True
    assert len(data["cases"]) == 4
    for case in data["cases"]:
        identities = [r for r in case["reports"] if r["identity_id"][:3] in ("2.2", "2.3", "2.6", "2.7")]
        assert len(identities) == 20
    assert "4 cases" in capsys.readouterr().out


def test_verify_csv(small_config, tmp_path):
    out = tmp_path / "report.csv"
    assert main(["verify", "--config", str(small_config), "--out", str(out), "--format", "csv"]) == EXIT_OK
    assert out.read_text().startswith("case_index,p,q,")


def test_verify_unreachable_tolerance(tmp_path, capsys):
    cfg = tmp_path / "tight.toml"
    cfg.write_text(SMALL + "[tolerances]\ndefault = 1e-30\n")
    out = tmp_path / "r.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == EXIT_FAILED
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("FAIL")]
    assert lines and json.loads(out.read_text())["summary"]["failed"] == len(lines)


def test_verify_missing_config(tmp_path, capsys):
    code = main(["verify", "--config", str(tmp_path / "nope.toml")])
    assert code == EXIT_IO
    assert "file not found" in capsys.readouterr().err


def test_verify_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("schema_version = 1\nn_tangents = 0\n")
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == EXIT_INPUT
    assert "n_tangents" in capsys.readouterr().err
    assert not (tmp_path / "r.json").exists()


def test_verify_unwritable_output(small_config, tmp_path):
    out = tmp_path / "missing-dir" / "r.json"
    assert main(["verify", "--config", str(small_config), "--out", str(out)]) == EXIT_IO


def test_verify_empty_grid(tmp_path):
    cfg = tmp_path / "empty.toml"
    cfg.write_text("schema_version = 1\n")
    out = tmp_path / "r.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["cases"] == []


def test_verify_byte_identical_reruns(small_config, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "--config", str(small_config), "--out", str(a)])
    main(["verify", "--config", str(small_config), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def _induce(capsys, *args):
    code = main(["induce", *args])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_induce_sphere(capsys):
    code, out, _ = _induce(capsys, "--sphere", "--p", "1", "--q", "1", "--R", "1", "--point", "1,0,0")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["a11"] == 0.0
    assert data["xi1"] == pytest.approx([0, 1, 0], abs=1e-15)
    assert list(data) == sorted(data)


def test_induce_product(capsys):
    code, out, _ = _induce(capsys, "--product", "--p", "1", "--q", "2", "--r", "1", "--r3", "1", "--point", "1,0,1,0")
    assert code == EXIT_OK
    a = json.loads(out)["a"]
    assert a[0] == pytest.approx([0.5, -0.5], abs=1e-15)
    assert a[1] == pytest.approx([-0.5, 0.5], abs=1e-15)
    assert json.loads(out)["N2"] == pytest.approx([1 / math.sqrt(2), 0, -1 / math.sqrt(2), 0], abs=1e-15)


def test_induce_is_deterministic(capsys):
    args = ("--product", "--p", "2", "--q", "2", "--nu", "+-", "--eps", "minus", "--r", "1", "--r3", "0.5",
            "--point", "0.6,0,0,0.8,0.3,0.4")
    first = _induce(capsys, *args)
    assert first == _induce(capsys, *args)


def test_induce_off_manifold(capsys):
    code, _, err = _induce(capsys, "--sphere", "--p", "1", "--q", "1", "--R", "1", "--point", "2,0,0")
    assert code == EXIT_INPUT
    assert "residual 3" in err


@pytest.mark.parametrize("args", [
    ("--sphere", "--p", "1", "--q", "1", "--point", "1,0,0"),
    ("--sphere", "--p", "1", "--q", "1", "--R", "1", "--point", "1,0"),
    ("--sphere", "--p", "1", "--q", "1", "--R", "1", "--point", "a,b,c"),
    ("--sphere", "--p", "1", "--q", "1", "--R", "1", "--nu", "++", "--point", "1,0,0"),
    ("--product", "--p", "1", "--q", "2", "--r", "1", "--point", "1,0,1,0"),
])
def test_induce_bad_input(capsys, args):
    code, _, err = _induce(capsys, *args)
    assert code == EXIT_INPUT and err.startswith("afstruct:")


def test_version(capsys):
    assert main(["version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "afstruct", "version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
