import json
import subprocess
import sys

import pytest

from fib_example import FIB
from wiring_operad.bundle import load_bundle, packaged_bundle
from wiring_operad.cli import main

FIB_PATH = str(packaged_bundle("fib.bundle"))


def wd(*args, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "wiring_operad", *args], capture_output=True, text=True, input=stdin, timeout=60
    )


def test_run_fibonacci():
    res = wd("run", FIB_PATH, "--steps", "10")
    assert res.returncode == 0, res.stderr
    assert res.stdout == "c_Z = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]\n"


def test_run_is_byte_stable():
    outs = {wd("run", FIB_PATH, "--steps", "12", "--format", "json").stdout for _ in range(2)}
    assert len(outs) == 1


@pytest.mark.parametrize("engine", ["session", "oracle"])
@pytest.mark.parametrize("diagram", ["fib", "psi"])
def test_engines_and_nesting_agree(engine, diagram, capsys):
    assert main(["run", FIB_PATH, "--steps", "10", "--engine", engine, "--diagram", diagram, "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["outputs"]["c_Z"] == FIB


def test_packaged_bundle_by_bare_name(capsys):
    assert main(["run", "fib.bundle", "--steps", "3"]) == 0
    assert capsys.readouterr().out == "c_Z = [1, 1, 2, 3]\n"


def test_validate(capsys):
    assert main(["validate", FIB_PATH]) == 0
    out = capsys.readouterr().out
    assert "ok diagram phi" in out and "ok composition fib" in out and "valid" in out


def test_validate_rejection_exit_code(tmp_path, capsys):
    raw = json.loads(open(FIB_PATH).read())
    raw["diagrams"][0]["supplier"].pop("X.in.b_X")
    path = tmp_path / "bad.bundle"
    path.write_text(json.dumps(raw))
    assert main(["validate", str(path)]) == 1
    err = capsys.readouterr().err
    assert "X.in.b_X" in err and "violation" in err


def test_parse_error_exit_code(tmp_path):
    path = tmp_path / "broken.bundle"
    path.write_text("{\n,}")
    res = wd("validate", str(path))
    assert res.returncode == 2
    assert res.stderr.startswith(f"{path}:2:1: parse:")


def test_usage_errors():
    assert wd().returncode == 2
    assert wd("run", FIB_PATH).returncode == 2
    assert wd("run", FIB_PATH, "--steps", "-1").returncode == 2
    assert wd("run", "/no/such/file.bundle", "--steps", "1").returncode == 2


def test_missing_binding_exit_code(tmp_path, capsys):
    raw = json.loads(open(FIB_PATH).read())
    del raw["bindings"]["X"]
    path = tmp_path / "nobind.bundle"
    path.write_text(json.dumps(raw))
    assert main(["run", str(path), "--steps", "2"]) == 1
    assert "no binding" in capsys.readouterr().err


def test_compose_to_file(tmp_path, capsys):
    out = tmp_path / "omega.bundle"
    assert main(["compose", FIB_PATH, "--outer", "psi", "--inner", "phi", "--out", str(out), "--name", "omega"]) == 0
    printed = capsys.readouterr().out
    assert "ext.out.c_Z <- delay.d_psi" in printed
    b = load_bundle(out)
    assert "omega" in b.diagrams
    assert main(["run", str(out), "--diagram", "omega", "--steps", "10"]) == 0
    assert capsys.readouterr().out == f"c_Z = {FIB}\n"


def test_compose_canonical_to_stdout(capsys):
    assert main(["compose", FIB_PATH, "--outer", "psi", "--inner", "phi", "--out", "-", "--canonical"]) == 0
    raw = json.loads(capsys.readouterr().out)
    (d,) = [d for d in raw["diagrams"] if d["name"] == "psi_phi"]
    assert d["supplier"] == {
        "ext.out.c_Z": "delay.d0",
        "y0.in.a_X": "delay.d0",
        "y0.in.b_X": "y0.out.c_X",
        "delay.d0": "y0.out.c_X",
    }


def test_compose_shape_error(capsys):
    assert main(["compose", FIB_PATH, "--outer", "psi", "--inner", "psi", "--out", "-"]) == 1


def test_trace_json(capsys):
    assert main(["trace", FIB_PATH, "--steps", "3", "--format", "json"]) == 0
    raw = json.loads(capsys.readouterr().out)
    assert raw["format"] == "wd-trace/1" and raw["steps"] == 3
    assert raw["output"]["rows"] == [[1], [1], [2], [3]]


def test_trace_table_empty(capsys):
    assert main(["trace", FIB_PATH, "--steps", "0"]) == 0
    assert capsys.readouterr().out.split() == ["step", "wire", "role", "value"]


@pytest.mark.parametrize("fmt", ["array", "jsonl"])
def test_input_files(tmp_path, fmt, capsys):
    rows = [{"a_Y": v} for v in (5, 2, 4)]
    path = tmp_path / "in.json"
    path.write_text(json.dumps(rows) if fmt == "array" else "\n".join(json.dumps(r) for r in rows))
    assert main(["run", FIB_PATH, "--diagram", "phi", "--input", str(path)]) == 0
    assert capsys.readouterr().out == "c_Y = [1, 6, 8, 12]\n"
    assert main(["run", FIB_PATH, "--diagram", "phi", "--input", str(path), "--steps", "1"]) == 0
    assert capsys.readouterr().out == "c_Y = [1, 6]\n"


def test_input_from_stdin():
    res = wd("run", FIB_PATH, "--diagram", "phi", "--input", "-", stdin='{"a_Y": 3}\n')
    assert res.returncode == 0 and res.stdout == "c_Y = [1, 4]\n"


def test_input_errors(tmp_path, capsys):
    path = tmp_path / "in.json"
    path.write_text('[{"a_Y": -1}]')
    assert main(["run", FIB_PATH, "--diagram", "phi", "--input", str(path)]) == 1
    path.write_text('[{"b": 1}]')
    assert main(["run", FIB_PATH, "--diagram", "phi", "--input", str(path)]) == 1
    assert main(["run", FIB_PATH, "--diagram", "phi", "--steps", "2"]) == 2


def test_laws_command():
    res = wd("laws", "--seed", "1", "--cases", "10")
    assert res.returncode == 0, res.stdout + res.stderr
    lines = res.stdout.splitlines()
    assert len(lines) == 7 and all(l.startswith("PASS ") for l in lines)
