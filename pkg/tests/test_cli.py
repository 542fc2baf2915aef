import json
import subprocess
import sys

import numpy as np
import pytest

from alelab.cli import DEFAULTS, main

WALL = {"family": {"kind": "A", "rank": 2, "zeta_c": {"1": [1, 1, -2]}, "d": 1}}


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_root_system(capsys):
    assert main(["root-system", "--kind", "E", "--rank", "8"]) == 0
    out = capsys.readouterr().out
    assert "240 roots" in out and "696729600" in out


def test_c2_integral_prints_euler_number(capsys):
    assert main(["c2-integral", "--a", "2", "--strict"]) == 0
    assert "1.5000" in capsys.readouterr().out


def test_wall_path_reported_degenerate(tmp_path, capsys):
    assert main(["check-nondegenerate", "--config", write_config(tmp_path, WALL)]) == 0
    out = capsys.readouterr().out
    assert "verdict: degenerate" in out
    assert "witness" in out


def test_unknown_key_is_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, {"gluing": {"bogus": 1}})
    out_dir = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out_dir)]) == 2
    assert "config.gluing.bogus" in capsys.readouterr().err
    assert not out_dir.exists()


def test_bad_grid_leaves_no_artifacts(tmp_path):
    cfg = write_config(tmp_path, {"grid": {"top": 0.5, "n": 4}})
    out_dir = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out_dir)]) == 3
    assert not out_dir.exists()


def test_artifacts_idempotent_and_config_untouched(tmp_path):
    cfg = write_config(tmp_path, {"eh": {"a": 1.5}})
    before = (tmp_path / "cfg.json").read_bytes()
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["c2-integral", "--config", cfg, "--out", str(a)]) == 0
    assert main(["c2-integral", "--config", cfg, "--out", str(b)]) == 0
    assert (tmp_path / "cfg.json").read_bytes() == before
    names = sorted(p.name for p in a.iterdir())
    assert names == ["c2-integral.config.json", "c2-integral.csv", "c2-integral.json"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    resolved = json.loads((a / "c2-integral.config.json").read_text())
    assert resolved["eh"]["a"] == 1.5
    assert resolved["plan"] == DEFAULTS["plan"]


def test_format_selection(tmp_path):
    out = tmp_path / "o"
    assert main(["root-system", "--out", str(out), "--format", "json"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["root-system.config.json", "root-system.json"]


def test_sweep_then_fit_roundtrip(tmp_path, capsys):
    cfg = write_config(tmp_path, {"grid": {"n": 4}})
    out = tmp_path / "o"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--format", "json"]) == 0
    sweep = json.loads((out / "sweep.json").read_text())
    assert sweep["schema"] == "alelab.results/1"
    assert main(["fit", "--input", str(out / "sweep.json")]) == 0
    printed = capsys.readouterr().out
    gamma = float(printed.split("gamma = ")[-1].split()[0])
    assert gamma == pytest.approx(sweep["fit"]["gamma"], abs=1e-4)


def test_strict_exit_on_failed_fit(tmp_path):
    t = list(np.geomspace(1e-3, 1e-5, 5))
    F = [1.0 + x for x in (1e-3, 1e-8, 2e-3, 1e-9, 5e-4)]
    src = tmp_path / "noisy.json"
    src.write_text(json.dumps({"t": t, "F": F, "limit": 1.0, "errors": [0.0] * 5, "d": 1}))
    assert main(["fit", "--input", str(src)]) == 0
    assert main(["fit", "--input", str(src), "--strict"]) == 1


def test_fit_without_input_is_config_error():
    assert main(["fit"]) == 2


def test_bott_chern_check(capsys):
    assert main(["bott-chern-check", "--strict"]) == 0
    res = float(capsys.readouterr().out.split("max relative residual ")[1].split()[0])
    assert res <= 1e-6


def test_module_entry_point():
    run = subprocess.run([sys.executable, "-m", "alelab", "root-system"], capture_output=True, text=True)
    assert run.returncode == 0
    assert run.stdout.startswith("A2")
