"""Experiment orchestration: learn / evolve / compare / figure1 / sweep.

Each experiment is computed in memory first and persisted afterwards, so sweep
points can run concurrently while files are still written in config order.
Data files are deterministic; only the wall-time field in the metadata varies
between identical runs.
"""

from __future__ import annotations

import json
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy

from ._version import __version__
from .config import ExperimentConfig
from .dynamics import (CoherentStateParams, EvolutionRecord, PropagatorConfig,
                       coherent_state, evolve)
from .errors import ConfigError, NumericalError
from .fields import Wavefunction, gaussian_packet
from .learner import (FieldSampledDisruptor, LearnerRun, ZeroDisruptor,
                      run_learner, run_momentum_gd)
from .output import read_table, write_meta, write_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_DIVERGED = 4

TRAJECTORY_HEADER = ["t", "x", "u", "V", "dis"]


@dataclass
class ComputedRun:
    """In-memory result of one experiment: tables keyed by file stem."""

    tables: dict
    meta: dict
    exit_code: int


@dataclass
class ExperimentResult:
    exit_code: int
    out_dir: Path
    files: tuple
    meta: dict


def _initial_wavefunction(cfg: ExperimentConfig) -> Wavefunction:
    init = cfg.initial
    if init.kind == "coherent":
        if cfg.potential["kind"] != "harmonic":
            raise ConfigError("a coherent initial state needs a harmonic potential "
                              "(its width is set by the trap frequency)")
        cp = CoherentStateParams(x_t=init.x0, p_t=cfg.p0, s_t=0.0,
                                 omega=cfg.potential["omega"])
        return coherent_state(cp, cfg.grid)
    if init.kind == "gaussian":
        sigma = init.sigma
        if sigma is None:
            if cfg.potential["kind"] == "harmonic":
                sigma = 1.0 / np.sqrt(2.0 * cfg.potential["omega"])
            else:
                sigma = 1.0
        return gaussian_packet(cfg.grid, init.x0, p0=cfg.p0, sigma=sigma,
                               hbar=cfg.physics.hbar)
    # custom: tabulated (x, re, im), linearly interpolated onto the grid
    header, rows = read_table(Path(init.path))
    if header[:3] != ["x", "re", "im"]:
        raise ConfigError(f"custom initial state {init.path} must have columns x,re,im")
    xs, re, im = rows[:, 0], rows[:, 1], rows[:, 2]
    values = np.interp(cfg.grid.x, xs, re) + 1j * np.interp(cfg.grid.x, xs, im)
    return Wavefunction(values, cfg.grid).normalized()


def _build_disruptor(cfg: ExperimentConfig):
    if cfg.disruptor.kind == "zero":
        return ZeroDisruptor()
    psi0 = _initial_wavefunction(cfg)
    pde_dt = cfg.disruptor.pde_dt if cfg.disruptor.pde_dt is not None else 0.01
    return FieldSampledDisruptor(psi0, cfg.build_potential(), cfg.physics,
                                 pde_dt=pde_dt, macro_time=cfg.run.time_scale,
                                 scheme=cfg.run.scheme)


def _learner_rows(run: LearnerRun) -> np.ndarray:
    return run.rows


def _learner_meta(run: LearnerRun) -> dict:
    return {
        "outcome": run.outcome,
        "steps_taken": int(run.t[-1]),
        "final_x": float(run.x[-1]),
        "final_u": float(run.u[-1]),
    }


def _evolve_trajectory(rec: EvolutionRecord, cfg: ExperimentConfig) -> np.ndarray:
    potential = cfg.build_potential()
    v_vals = np.array([float(potential.evaluate(x)) for x in rec.x_mean])
    u_mean = rec.p_mean / cfg.physics.m
    return np.column_stack([rec.times, rec.x_mean, u_mean, v_vals, rec.dis_center])


def _density_table(rec: EvolutionRecord):
    header = ["x"] + [f"rho_t{k}" for k in range(len(rec.snapshot_times))]
    rows = np.column_stack([rec.grid.x, rec.densities])
    return header, rows


def _evolve_meta(rec: EvolutionRecord) -> dict:
    return {
        "snapshot_times": [float(t) for t in rec.snapshot_times],
        "norm_initial": float(rec.norm[0]),
        "norm_final": float(rec.norm[-1]),
        "norm_max_drift": float(np.max(np.abs(rec.norm - rec.norm[0]))),
        "final_x_mean": float(rec.x_mean[-1]),
        "final_p_mean": float(rec.p_mean[-1]),
    }


def _compute_learn(cfg: ExperimentConfig) -> ComputedRun:
    run = run_learner(cfg.initial.x0, cfg.initial.u0, cfg.build_potential(),
                      _build_disruptor(cfg), cfg.physics, steps=cfg.run.steps,
                      stop_tol=cfg.run.stop_tol, time_scale=cfg.run.time_scale)
    code = EXIT_DIVERGED if run.outcome == "diverged" else EXIT_OK
    return ComputedRun({"trajectory": (TRAJECTORY_HEADER, _learner_rows(run))},
                       _learner_meta(run), code)


def _compute_evolve(cfg: ExperimentConfig) -> ComputedRun:
    psi0 = _initial_wavefunction(cfg)
    prop_cfg = PropagatorConfig(dt=cfg.run.dt, scheme=cfg.run.scheme,
                                t_final=cfg.run.t_final,
                                snapshot_every=cfg.run.snapshot_every)
    rec = evolve(psi0, cfg.build_potential(), cfg.physics, prop_cfg)
    tables = {
        "trajectory": (TRAJECTORY_HEADER, _evolve_trajectory(rec, cfg)),
        "density": _density_table(rec),
    }
    return ComputedRun(tables, _evolve_meta(rec), EXIT_OK)


def _compute_compare(cfg: ExperimentConfig) -> ComputedRun:
    quantum = run_learner(cfg.initial.x0, cfg.initial.u0, cfg.build_potential(),
                          _build_disruptor(cfg), cfg.physics, steps=cfg.run.steps,
                          stop_tol=cfg.run.stop_tol, time_scale=cfg.run.time_scale)
    classical = run_momentum_gd(cfg.initial.x0, cfg.initial.u0, cfg.build_potential(),
                                alpha=cfg.physics.lam, beta=cfg.physics.beta,
                                steps=cfg.run.steps, stop_tol=cfg.run.stop_tol)
    rows_q = _learner_rows(quantum)
    rows_c = _learner_rows(classical)
    n = min(len(rows_q), len(rows_c))
    diff = rows_q[:n] - rows_c[:n]
    diff[:, 0] = rows_q[:n, 0]  # keep the shared time axis readable
    meta = {
        "quantum": _learner_meta(quantum),
        "classical": _learner_meta(classical),
        "max_abs_x_difference": float(np.max(np.abs(diff[:, 1]))),
        "max_abs_u_difference": float(np.max(np.abs(diff[:, 2]))),
        "compared_rows": int(n),
    }
    code = EXIT_OK
    if "diverged" in (quantum.outcome, classical.outcome):
        code = EXIT_DIVERGED
    tables = {
        "trajectory_quantum": (TRAJECTORY_HEADER, rows_q),
        "trajectory_classical": (TRAJECTORY_HEADER, rows_c),
        "difference": (TRAJECTORY_HEADER, diff),
    }
    return ComputedRun(tables, meta, code)


def _compute_figure1(cfg: ExperimentConfig) -> ComputedRun:
    """Density relaxation (main panel) plus the discrete learner inset."""
    pde = _compute_evolve(cfg)
    learner = _compute_learn(cfg)
    density_header, density_rows = pde.tables["density"]
    x = density_rows[:, 0]
    meta = {
        "pde": pde.meta,
        "learner": learner.meta,
        "density_argmax_first": float(x[int(np.argmax(density_rows[:, 1]))]),
        "density_argmax_last": float(x[int(np.argmax(density_rows[:, -1]))]),
    }
    tables = {
        "density": (density_header, density_rows),
        "trajectory": learner.tables["trajectory"],
    }
    return ComputedRun(tables, meta, max(pde.exit_code, learner.exit_code))


def _set_sweep_value(cfg: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    section, key = parameter.split(".", 1)
    if section == "physics":
        try:
            physics = replace(cfg.physics, **{key: value})
        except ValueError as err:
            raise ConfigError(f"sweep value {value} for {parameter}: {err}") from err
        return replace(cfg, physics=physics)
    if section == "potential":
        pot = dict(cfg.potential)
        if key not in pot:
            raise ConfigError(f"sweep parameter {parameter} does not apply to a "
                              f"{pot['kind']} potential")
        pot[key] = value
        return replace(cfg, potential=pot)
    initial = replace(cfg.initial, **{key: value})
    return replace(cfg, initial=initial)


def _compute_point(cfg: ExperimentConfig) -> ComputedRun:
    computer = {"learn": _compute_learn, "evolve": _compute_evolve,
                "compare": _compute_compare, "figure1": _compute_figure1}[cfg.experiment]
    try:
        return computer(cfg)
    except NumericalError as err:
        meta = {"error": {"type": type(err).__name__, "message": str(err),
                          "step": err.step}}
        return ComputedRun({}, meta, EXIT_NUMERICAL)


def _run_sweep(cfg: ExperimentConfig, out_dir: Path, fmt: str) -> ComputedRun:
    sweep = cfg.sweep
    sub_base = replace(cfg, experiment=sweep.experiment, sweep=None)
    # validate every point before computing any of them
    points = [_set_sweep_value(sub_base, sweep.parameter, v) for v in sweep.values]

    if len(points) > 1:
        with ThreadPoolExecutor(max_workers=min(4, len(points))) as pool:
            computed = list(pool.map(_compute_point, points))
    else:
        computed = [_compute_point(points[0])]

    summary_rows = []
    point_meta = []
    for i, (value, comp) in enumerate(zip(sweep.values, computed)):
        point_dir = out_dir / f"point_{i:03d}"
        point_dir.mkdir(parents=True, exist_ok=True)
        files = []
        for stem, (header, rows) in comp.tables.items():
            path = write_table(point_dir, stem, header, rows, fmt)
            files.append(path.name)
        sub_meta = _assemble_meta(points[i], point_dir, fmt, comp, files)
        write_meta(point_dir / "meta.json", sub_meta)
        point_meta.append({"index": i, "value": float(value),
                           "directory": point_dir.name,
                           "exit_code": comp.exit_code, **comp.meta})
        out = comp.meta.get("learner") or comp.meta.get("quantum") or comp.meta
        summary_rows.append([i, float(value), comp.exit_code,
                             out.get("steps_taken", -1),
                             out.get("final_x", out.get("final_x_mean", np.nan)),
                             out.get("final_u", out.get("final_p_mean", np.nan))])

    codes = [c.exit_code for c in computed]
    exit_code = EXIT_NUMERICAL if EXIT_NUMERICAL in codes else (
        EXIT_DIVERGED if EXIT_DIVERGED in codes else EXIT_OK)
    header = ["index", "value", "exit_code", "steps", "final_x", "final_u"]
    meta = {"parameter": sweep.parameter, "sub_experiment": sweep.experiment,
            "points": point_meta}
    return ComputedRun({"sweep_summary": (header, np.asarray(summary_rows, dtype=float))},
                       meta, exit_code)


def _assemble_meta(cfg: ExperimentConfig, out_dir: Path, fmt: str,
                   comp: ComputedRun, files: list) -> dict:
    effective = cfg.effective_dict()
    effective["output"] = {"directory": str(out_dir), "format": fmt}
    return {
        "experiment": cfg.experiment,
        "effective_config": effective,
        "status": {EXIT_OK: "ok", EXIT_NUMERICAL: "numerical_failure",
                   EXIT_DIVERGED: "diverged"}[comp.exit_code],
        "files": sorted(files),
        "versions": {
            "quantum_descent": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        **comp.meta,
    }


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None,
                   fmt: str | None = None) -> ExperimentResult:
    """Run one configured experiment and persist its artifacts.

    ``out_dir`` and ``fmt`` override the config's output section (the CLI
    passes its --out/--format flags here).  Returns the exit status alongside
    the written file names; numerical failures are reported, not raised.
    """
    t0 = time.perf_counter()
    out_dir = Path(out_dir if out_dir is not None else cfg.output.directory)
    fmt = fmt if fmt is not None else cfg.output.format
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")
    out_dir.mkdir(parents=True, exist_ok=True)

    if cfg.experiment == "sweep":
        comp = _run_sweep(cfg, out_dir, fmt)
    else:
        comp = _compute_point(cfg)

    files = []
    for stem, (header, rows) in comp.tables.items():
        path = write_table(out_dir, stem, header, rows, fmt)
        files.append(path.name)
    meta = _assemble_meta(cfg, out_dir, fmt, comp, files)
    meta["wall_time_s"] = time.perf_counter() - t0
    write_meta(out_dir / "meta.json", meta)
    if comp.exit_code != EXIT_OK:
        report = {"exit_code": comp.exit_code, "status": meta["status"],
                  "error": comp.meta.get("error",
                                         {"type": "Divergence",
                                          "message": "trajectory left the guard region"})}
        (out_dir / "error.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        files.append("error.json")
    return ExperimentResult(comp.exit_code, out_dir, tuple(sorted(files + ["meta.json"])),
                            meta)
