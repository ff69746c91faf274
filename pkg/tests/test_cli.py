import subprocess
import sys

import pytest

from aerial_etc.cli import main
from aerial_etc.config import shipped_config


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "aerial_etc", *args], capture_output=True, text=True,
                          cwd=cwd, encoding="utf-8")


def short_cfg(tmp_path, name, body=""):
    path = tmp_path / f"{name}.cfg"
    path.write_text("[filter]\nrho = 1.0\nfilt_eps = 0.1\n[sim]\nt_end = 6.0\n" + body)
    return path


def test_bound_exact_output():
    r = run_cli("bound", "--l", "1", "--m", "1", "--omega", "0.5", "--p", "0.75")
    assert r.returncode == 0
    assert r.stdout == "T ≤ 10\n"


def test_bound_with_residual(capsys):
    assert main(["bound", "--l", "1", "--m", "1", "--n", "0.1", "--omega", "0.5", "--p", "0.75"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "T ≤ 10" and out[1].startswith("V ≤ ")


def test_bound_rejects_range(capsys):
    assert main(["bound", "--l", "1", "--m", "1", "--omega", "1.5", "--p", "0.75"]) == 2


def test_run_and_compare(tmp_path, capsys):
    a = short_cfg(tmp_path, "nn", "[run]\ncontroller = et_nn\n")
    b = short_cfg(tmp_path, "pid", "[run]\ncontroller = baseline_pid\n")
    out = tmp_path / "out"
    assert main(["run", str(a), "--out", str(out)]) == 0
    assert main(["run", str(b), "--out", str(out)]) == 0
    for name in ("nn", "pid"):
        for f in ("telemetry.csv", "metrics.txt", "config.txt"):
            assert (out / name / f).is_file()
    capsys.readouterr()
    assert main(["compare", str(out / "nn" / "metrics.txt"), str(out / "pid" / "metrics.txt")]) == 0
    text = capsys.readouterr().out
    assert "Reduced" in text and "Mean" in text and "Max" in text
    assert main(["compare", str(out / "nn" / "metrics.txt"), str(out / "pid" / "metrics.txt"), "--format", "kv"]) == 0
    assert "mean_reduced_x = " in capsys.readouterr().out


def test_compare_rejects_mismatched_horizons(tmp_path):
    a = short_cfg(tmp_path, "a")
    b = tmp_path / "b.cfg"
    b.write_text(a.read_text().replace("t_end = 6.0", "t_end = 7.0"))
    out = tmp_path / "out"
    assert main(["run", str(a), "--out", str(out)]) == 0
    assert main(["run", str(b), "--out", str(out)]) == 0
    assert main(["compare", str(out / "a" / "metrics.txt"), str(out / "b" / "metrics.txt")]) == 2


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[switch]\np_exp = 1.2\n")
    r = run_cli("run", str(bad), "--out", str(tmp_path))
    assert r.returncode == 2
    assert "bad.cfg:2" in r.stderr and "exponent must satisfy 0.5 < p < 1" in r.stderr


def test_divergence_exit_code(tmp_path):
    cfg = tmp_path / "blowup.cfg"
    cfg.write_text("[sim]\nt_end = 20.0\n")
    r = run_cli("run", str(cfg), "--out", str(tmp_path / "o"))
    assert r.returncode == 3
    assert "diverged" in r.stderr
    assert (tmp_path / "o" / "blowup" / "telemetry.csv").is_file()


def test_sweep(tmp_path, capsys):
    for name in ("s1", "s2"):
        short_cfg(tmp_path, name)
    assert main(["sweep", str(tmp_path / "s*.cfg"), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "s1" / "metrics.txt").is_file()
    assert (tmp_path / "o" / "s2" / "metrics.txt").is_file()
    assert main(["sweep", str(tmp_path / "none*.cfg")]) == 2


def test_shipped_configs_load():
    for name in ("ellipse_et_nn", "ellipse_time_triggered_nn", "ellipse_baseline_pid",
                 "figure_eight_et_nn", "figure_eight_time_triggered_nn", "figure_eight_baseline_pid",
                 "reference_gains_ellipse"):
        assert shipped_config(name).is_file()
    r = run_cli("--help")
    assert r.returncode == 0 and "bound" in r.stdout
