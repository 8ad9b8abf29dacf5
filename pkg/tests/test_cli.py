"""End-to-end harness behaviour: files, formats, exit codes, determinism.

Runs go through cli.main() in-process (fast, same code path as the console
script); one subprocess test confirms the module entry point works outside
the test process.
"""

import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from quantum_descent.cli import main
from quantum_descent.dynamics import damped_oscillator_closed_form
from quantum_descent.output import read_meta, read_table

NOISE_KEYS = {"wall_time_s"}


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _meta_without_noise(path):
    meta = read_meta(path)
    meta = {k: v for k, v in meta.items() if k not in NOISE_KEYS}
    # the echoed output directory tracks --out, which differs per invocation
    meta["effective_config"]["output"].pop("directory")
    return meta


# --- the flagship run ---------------------------------------------------------

def test_figure1_writes_expected_files(tmp_path):
    out = tmp_path / "fig"
    assert main(["figure1", "--out", str(out), "--quiet"]) == 0
    header, traj = read_table(out / "trajectory.csv")
    assert header == ["t", "x", "u", "V", "dis"]
    dheader, density = read_table(out / "density.csv")
    assert dheader[0] == "x"
    assert all(h.startswith("rho_t") for h in dheader[1:])
    meta = read_meta(out / "meta.json")
    assert meta["status"] == "ok"
    assert len(meta["pde"]["snapshot_times"]) == density.shape[1] - 1
    # the learner inset converges onto the minimum
    assert abs(traj[-1, 1]) < 1e-6


def test_summary_line_and_quiet(tmp_path, capsys):
    assert main(["learn", "--out", str(tmp_path / "a")]) == 0
    out = capsys.readouterr().out
    assert "learn: status=ok" in out
    assert main(["learn", "--out", str(tmp_path / "b"), "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_seed_flag_is_accepted(tmp_path):
    assert main(["learn", "--out", str(tmp_path / "s"), "--seed", "7", "--quiet"]) == 0


# --- determinism and the metadata echo ----------------------------------------

def test_repeated_runs_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: evolve\n"
                 "grid: {n: 512}\n"
                 "run: {t_final: 0.5, dt: 0.005, snapshot_every: 50}\n")
    for d in ("r1", "r2"):
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path / d),
                     "--quiet"]) == 0
    for name in ("trajectory.csv", "density.csv"):
        assert (tmp_path / "r1" / name).read_bytes() == \
               (tmp_path / "r2" / name).read_bytes()
    assert _meta_without_noise(tmp_path / "r1" / "meta.json") == \
           _meta_without_noise(tmp_path / "r2" / "meta.json")


def test_meta_echo_suffices_to_rerun(tmp_path):
    """Re-running from the echoed effective config reproduces the data."""
    import yaml
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: learn\nphysics: {mu: 0.5}\nrun: {steps: 40}\n")
    assert main(["learn", "--config", cfg, "--out", str(tmp_path / "first"),
                 "--quiet"]) == 0
    effective = read_meta(tmp_path / "first" / "meta.json")["effective_config"]
    echo = _write(tmp_path, "echo.yaml", yaml.safe_dump(effective))
    assert main(["learn", "--config", echo, "--out", str(tmp_path / "second"),
                 "--quiet"]) == 0
    assert (tmp_path / "first" / "trajectory.csv").read_bytes() == \
           (tmp_path / "second" / "trajectory.csv").read_bytes()


def test_json_format_mirror(tmp_path):
    out = tmp_path / "j"
    assert main(["learn", "--out", str(out), "--format", "json", "--quiet"]) == 0
    header, rows = read_table(out / "trajectory.json")
    assert header == ["t", "x", "u", "V", "dis"]
    assert rows.shape[1] == 5
    assert not (out / "trajectory.csv").exists()


# --- exit codes ----------------------------------------------------------------

def test_config_error_exit_2(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.yaml", "experiment: learn\nphysics: {gamma: 1}\n")
    assert main(["learn", "--config", cfg, "--out", str(tmp_path / "x")]) == 2
    report = json.loads(capsys.readouterr().err)
    assert report["exit_code"] == 2
    assert "gamma" in report["error"]["message"]


def test_missing_config_file_exit_2(tmp_path, capsys):
    assert main(["learn", "--config", str(tmp_path / "absent.yaml")]) == 2
    assert json.loads(capsys.readouterr().err)["status"] == "config_error"


@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # NaN seed divides by NaN norm
def test_numerical_failure_exit_3(tmp_path, capsys):
    table = tmp_path / "seed.csv"
    table.write_text("x,re,im\n-1.0,nan,0.0\n0.0,1.0,0.0\n1.0,0.5,0.0\n")
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: evolve\n"
                 f"initial: {{kind: custom, path: {json.dumps(str(table))}}}\n"
                 "run: {t_final: 0.1, dt: 0.01}\n"
                 "grid: {n: 256}\n")
    out = tmp_path / "nf"
    assert main(["evolve", "--config", cfg, "--out", str(out), "--quiet"]) == 3
    report = json.loads(capsys.readouterr().err)
    assert report["exit_code"] == 3
    error = json.loads((out / "error.json").read_text())
    assert error["status"] == "numerical_failure"
    meta = read_meta(out / "meta.json")
    assert meta["status"] == "numerical_failure"
    assert meta["error"]["step"] == 0


def test_divergence_exit_4_with_partial_data(tmp_path, capsys):
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: learn\n"
                 "physics: {mu: 0.0}\n"
                 "potential: {kind: polynomial, coefficients: [0, 0, -0.5]}\n"
                 "run: {steps: 300}\n")
    out = tmp_path / "div"
    assert main(["learn", "--config", cfg, "--out", str(out), "--quiet"]) == 4
    report = json.loads(capsys.readouterr().err)
    assert report["exit_code"] == 4
    _, rows = read_table(out / "trajectory.csv")  # partial data still written
    assert 1 < len(rows) < 301
    assert read_meta(out / "meta.json")["outcome"] == "diverged"
    assert (out / "error.json").exists()


# --- documented examples -------------------------------------------------------

def test_compare_with_zero_disruptor_is_identical(tmp_path):
    out = tmp_path / "cmp"
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: compare\nphysics: {m: 1.6, mu: 0.3}\nrun: {steps: 500}\n")
    assert main(["compare", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    _, diff = read_table(out / "difference.csv")
    assert np.max(np.abs(diff[:, 1])) == 0.0
    assert np.max(np.abs(diff[:, 2])) == 0.0
    assert read_meta(out / "meta.json")["max_abs_x_difference"] == 0.0
    for name in ("trajectory_quantum.csv", "trajectory_classical.csv"):
        assert (out / name).exists()


def test_evolve_tracks_damped_oscillator(tmp_path):
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: evolve\n"
                 "physics: {mu: 0.5}\n"
                 "grid: {n: 1024}\n"
                 "run: {t_final: 10.0, dt: 0.002}\n")
    out = tmp_path / "ev"
    assert main(["evolve", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    _, rows = read_table(out / "trajectory.csv")
    exact = np.array([damped_oscillator_closed_form(-5.0, 0.0, 0.5, 1.0, t)[0]
                      for t in rows[:, 0]])
    assert np.max(np.abs(rows[:, 1] - exact)) < 1e-3


def test_sweep_layout_and_ordering(tmp_path):
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: sweep\n"
                 "run: {steps: 120}\n"
                 "sweep: {parameter: physics.mu, values: [0.25, 0.5, 1.0], "
                 "experiment: learn}\n")
    out = tmp_path / "sw"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    header, summary = read_table(out / "sweep_summary.csv")
    assert header == ["index", "value", "exit_code", "steps", "final_x", "final_u"]
    assert list(summary[:, 0]) == [0.0, 1.0, 2.0]
    assert list(summary[:, 1]) == [0.25, 0.5, 1.0]   # deterministic config order
    assert np.all(summary[:, 2] == 0.0)
    for i, mu in enumerate((0.25, 0.5, 1.0)):
        point = out / f"point_{i:03d}"
        assert (point / "trajectory.csv").exists()
        meta = read_meta(point / "meta.json")
        assert meta["effective_config"]["physics"]["mu"] == mu


def test_sweep_determinism(tmp_path):
    cfg = _write(tmp_path, "c.yaml",
                 "experiment: sweep\n"
                 "run: {steps: 60}\n"
                 "sweep: {parameter: initial.x0, values: [-5.0, -2.5, 1.0, 3.0]}\n")
    for d in ("s1", "s2"):
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path / d),
                     "--quiet"]) == 0
    assert (tmp_path / "s1" / "sweep_summary.csv").read_bytes() == \
           (tmp_path / "s2" / "sweep_summary.csv").read_bytes()
    for i in range(4):
        assert (tmp_path / "s1" / f"point_{i:03d}" / "trajectory.csv").read_bytes() == \
               (tmp_path / "s2" / f"point_{i:03d}" / "trajectory.csv").read_bytes()


# --- entry point ----------------------------------------------------------------

def test_module_entry_point_subprocess(tmp_path):
    exe = shutil.which("quantum-descent")
    cmd = [exe] if exe else [sys.executable, "-m", "quantum_descent.cli"]
    proc = subprocess.run(cmd + ["learn", "--out", str(tmp_path / "sub"), "--quiet"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "sub" / "trajectory.csv").exists()
