import json
import shutil
import subprocess
import sys

import pytest

from aztec.cli import run
from aztec.io import load_tiling, load_trajectory


def test_kernel_value(capsys):
    assert run(["kernel", "qplus", "--n", "1", "--t", "1", "--from", "1,2;1", "--to", "1,2;1"]) == 0
    assert capsys.readouterr().out == "1/4 (0.25)\n"
    assert run(["kernel", "pplus", "--n", "2", "--t", "1", "--from", "1,2", "--to", "2,3"]) == 0
    assert capsys.readouterr().out == "1/4 (0.25)\n"


def test_sample_svg(tmp_path):
    out = tmp_path / "t.svg"
    assert run(["sample", "--order", "8", "--seed", "7", "--format", "svg", "-o", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<svg") and text.count("<rect") == 1 + 8 * 9


def test_sample_json_and_render(tmp_path, capsys):
    js = tmp_path / "t.json"
    assert run(["sample", "--order", "5", "--seed", "3", "--format", "json", "-o", str(js)]) == 0
    tiling = load_tiling(js.read_text())
    assert tiling.order == 5
    assert run(["render", "-i", str(js), "--format", "ascii"]) == 0
    header, *rows = capsys.readouterr().out.splitlines()
    assert header.startswith("# order=5 seed=3")
    assert len(rows) == 10


def test_seed_from_environment(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("AZTEC_SEED", "12")
    assert run(["sample", "--order", "6", "--format", "json", "-o", str(a)]) == 0
    assert run(["sample", "--order", "6", "--seed", "12", "--format", "json", "-o", str(b)]) == 0
    assert a.read_text() == b.read_text()
    monkeypatch.setenv("AZTEC_SEED", "nope")
    assert run(["sample", "--order", "2"]) == 2


def test_evolve(tmp_path, capsys):
    rec = tmp_path / "traj.jsonl"
    assert run(["evolve", "--lines", "3", "--steps", "10", "--seed", "1", "--record-json", str(rec)]) == 0
    out = json.loads(capsys.readouterr().out)
    traj = load_trajectory(rec.read_text())
    assert [list(line) for line in traj.frames[-1].lines] == out["final"]


def test_validate_kernels(capsys):
    assert run(["validate", "kernels", "--n", "2", "--t", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["statistic"] == 0


def test_usage_errors(tmp_path, capsys):
    assert run(["frobnicate"]) == 2
    assert run(["kernel", "q", "--n", "1", "--t", "1", "--from", "2,1;1", "--to", "1,2;1"]) == 2
    assert run(["sample", "--order", "-1"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "aztec-tiling/1", "order": 2, "domin')
    assert run(["render", "-i", str(bad)]) == 2
    assert run(["render", "-i", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()


@pytest.mark.skipif(shutil.which("aztec") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["aztec", "kernel", "q", "--n", "1", "--t", "1", "--from", "1,2;1", "--to", "2,3;2"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout == "1/4 (0.25)\n"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "aztec.cli", "kernel", "p", "--n", "1", "--t", "2",
                          "--from", "1", "--to", "2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout == "1/2 (0.5)\n"
