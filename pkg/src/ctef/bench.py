"""Simulation experiments: vary one Ellipsoid-Gaussian parameter, fit, score.

A grid is described by a JSON object::

    {
      "vary": "tau",                 # one of tau, noise, ratio
      "values": [0, 1, 3, 5],
      "w": [0.5, 0.65, 1.2, 2],      # one weight per value, or a single number
      "trials": 100,
      "seed": 0,
      "p": 3, "n": 18, "tau": 0, "noise": 0.01, "ratio": 2,   # fixed fields
      "thresholds": {"offset": 1.0, "shape": 1.0}            # optional
    }

Every trial draws its own generator from ``(seed, value index, trial)``,
so results do not depend on how trials are scheduled across workers.
"""
from __future__ import annotations

import csv
import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .datasim import SimSpec, simulate
from .fitting import A_UPPER, fit
from .metrics import offset_error, shape_error
from .svg import box_plot, box_stats

VARYING = ("tau", "noise", "ratio")
_FIXED = ("p", "n", "tau", "noise", "ratio")


class GridConfigError(ValueError):
    """The experiment configuration does not follow the documented schema."""


@dataclass(frozen=True)
class ExperimentGrid:
    vary: str
    values: tuple
    weights: tuple
    trials: int = 100
    seed: int = 0
    base: SimSpec = field(default_factory=SimSpec)
    thresholds: dict = field(default_factory=dict)

    def spec_for(self, index: int) -> SimSpec:
        return replace(self.base, **{self.vary: self.values[index]})

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentGrid":
        if not isinstance(cfg, dict):
            raise GridConfigError("configuration must be a JSON object")
        known = {"vary", "values", "w", "trials", "seed", "thresholds", *_FIXED}
        unknown = set(cfg) - known
        if unknown:
            raise GridConfigError(f"unknown keys: {sorted(unknown)}")
        vary = cfg.get("vary")
        if vary not in VARYING:
            raise GridConfigError(f"'vary' must be one of {VARYING}")
        values = cfg.get("values")
        if not isinstance(values, list) or not values or not all(_is_real(v) for v in values):
            raise GridConfigError("'values' must be a nonempty list of numbers")
        w = cfg.get("w", 0.5)
        if _is_real(w):
            weights = [float(w)] * len(values)
        elif isinstance(w, list) and len(w) == len(values) and all(_is_real(v) for v in w):
            weights = [float(v) for v in w]
        else:
            raise GridConfigError("'w' must be a number or a list with one weight per value")
        if any(v <= 0 for v in weights):
            raise GridConfigError("weights must be positive")
        trials = cfg.get("trials", 100)
        seed = cfg.get("seed", 0)
        if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
            raise GridConfigError("'trials' must be a positive integer")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise GridConfigError("'seed' must be a nonnegative integer")
        fixed = {}
        for key in _FIXED:
            if key in cfg:
                if not _is_real(cfg[key]):
                    raise GridConfigError(f"'{key}' must be a number")
                fixed[key] = int(cfg[key]) if key in ("p", "n") else float(cfg[key])
        thresholds = cfg.get("thresholds", {})
        if not isinstance(thresholds, dict) or set(thresholds) - {"offset", "shape"} \
                or not all(_is_real(v) for v in thresholds.values()):
            raise GridConfigError("'thresholds' may only hold numeric 'offset' and 'shape'")
        try:
            base = SimSpec(**fixed)
            grid = cls(vary, tuple(float(v) for v in values), tuple(weights),
                       trials, seed, base, {k: float(v) for k, v in thresholds.items()})
            for i in range(len(grid.values)):
                grid.spec_for(i)
        except ValueError as exc:
            raise GridConfigError(str(exc)) from None
        return grid


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def load_grid(path) -> ExperimentGrid:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GridConfigError(f"{path}: invalid JSON ({exc})") from None
    return ExperimentGrid.from_dict(cfg)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    value: float
    seed: int
    offset_error: float
    shape_error: float
    status: str
    iterations: int
    elliptic: bool
    a_boundary: bool
    failed: bool
    wall_time: float


def trial_seed(master: int, value_index: int, trial: int) -> int:
    """Integer seed for one trial, derived from the grid's master seed."""
    ss = np.random.SeedSequence([master, value_index, trial])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def run_trial(spec: SimSpec, w: float, seed: int, trial: int, value: float) -> TrialRecord:
    rng = np.random.default_rng(seed)
    X, truth = simulate(spec, rng)
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = fit(X, w)
    except (ValueError, RuntimeError, np.linalg.LinAlgError):
        return TrialRecord(trial, value, seed, float("nan"), float("nan"), "failed", 0,
                           False, False, True, time.perf_counter() - t0)
    wall = time.perf_counter() - t0
    a = result.params.a
    return TrialRecord(
        trial=trial,
        value=value,
        seed=seed,
        offset_error=offset_error(result.ellipsoid.center, truth.center),
        shape_error=shape_error(result.ellipsoid.shape_matrix, truth.shape_matrix),
        status=result.report.status,
        iterations=result.report.n_iterations,
        elliptic=bool(np.all(np.isfinite(a)) and np.all(a > 0) and np.all(a <= A_UPPER)),
        a_boundary=result.on_a_boundary,
        failed=False,
        wall_time=wall,
    )


def _run_job(job):
    return run_trial(*job)


def run_grid(grid: ExperimentGrid, workers: int | None = 1) -> list:
    """Run every trial of the grid; records come back ordered by (value, trial)."""
    jobs = []
    for i, value in enumerate(grid.values):
        spec = grid.spec_for(i)
        for t in range(grid.trials):
            jobs.append((spec, grid.weights[i], trial_seed(grid.seed, i, t), t, value))
    if workers is None or workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs, chunksize=8))
    return [_run_job(j) for j in jobs]


TRIAL_COLUMNS = ("param", "value", "trial", "seed", "offset_error", "shape_error",
                 "status", "iterations", "elliptic", "a_boundary", "failed")


def write_trials(path, grid: ExperimentGrid, records) -> None:
    """Per-trial results. Timing goes to a separate file so this one is reproducible."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for r in records:
            w.writerow([grid.vary, repr(r.value), r.trial, r.seed, repr(r.offset_error),
                        repr(r.shape_error), r.status, r.iterations, int(r.elliptic),
                        int(r.a_boundary), int(r.failed)])


def write_timings(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("value", "trial", "wall_time"))
        for r in records:
            w.writerow([repr(r.value), r.trial, f"{r.wall_time:.6f}"])


SUMMARY_COLUMNS = ("param", "value", "w", "error", "n", "n_failed", "median", "q1", "q3",
                   "whisker_low", "whisker_high", "n_outliers", "threshold", "n_exceed")


def summarize(grid: ExperimentGrid, records) -> list:
    """One row per (value, error type) with box-plot statistics and exceedance counts.

    Failed trials count toward ``n_exceed`` whenever a threshold is set.
    """
    rows = []
    for i, value in enumerate(grid.values):
        group = [r for r in records if r.value == value]
        n_failed = sum(r.failed for r in group)
        for error in ("offset", "shape"):
            vals = [getattr(r, f"{error}_error") for r in group if not r.failed]
            stats = box_stats(vals)
            thr = grid.thresholds.get(error)
            n_exceed = "" if thr is None else sum(v > thr for v in vals) + n_failed
            rows.append({
                "param": grid.vary, "value": value, "w": grid.weights[i], "error": error,
                "n": stats["n"], "n_failed": n_failed, "median": stats["median"],
                "q1": stats["q1"], "q3": stats["q3"], "whisker_low": stats["whisker_low"],
                "whisker_high": stats["whisker_high"], "n_outliers": stats["n_outliers"],
                "threshold": "" if thr is None else thr, "n_exceed": n_exceed,
            })
    return rows


def write_summary(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def write_plots(out_dir, grid: ExperimentGrid, records) -> list:
    """One SVG box plot per error type; returns the written paths."""
    paths = []
    for error, label in (("offset", "offset error"), ("shape", "shape error")):
        groups, exceed = [], []
        thr = grid.thresholds.get(error)
        for value in grid.values:
            vals = [getattr(r, f"{error}_error") for r in records if r.value == value and not r.failed]
            groups.append(vals)
            n_failed = sum(r.failed for r in records if r.value == value)
            exceed.append(0 if thr is None else sum(v > thr for v in vals) + n_failed)
        svg = box_plot(groups, [f"{v:g}" for v in grid.values],
                       title=f"{label} vs {grid.vary} (p={grid.base.p}, n={grid.base.n})",
                       xlabel=grid.vary, ylabel=label, exceed=exceed)
        path = os.path.join(out_dir, f"{error}_{grid.vary}.svg")
        with open(path, "w") as fh:
            fh.write(svg)
        paths.append(path)
    return paths


def run_benchmark(grid: ExperimentGrid, out_dir, workers: int | None = 1) -> dict:
    """Run a grid and write trials.csv, timings.csv, summary.csv and SVG plots."""
    os.makedirs(out_dir, exist_ok=True)
    records = run_grid(grid, workers)
    paths = {
        "trials": os.path.join(out_dir, "trials.csv"),
        "timings": os.path.join(out_dir, "timings.csv"),
        "summary": os.path.join(out_dir, "summary.csv"),
    }
    write_trials(paths["trials"], grid, records)
    write_timings(paths["timings"], records)
    write_summary(paths["summary"], summarize(grid, records))
    paths["plots"] = write_plots(out_dir, grid, records)
    return paths


# Desk-scale versions of the published experiment grids.
PRESETS = {
    "tau3": {"vary": "tau", "values": [0, 1, 3, 5], "w": [0.5, 0.65, 1.2, 2.0],
             "p": 3, "n": 18, "noise": 0.01, "ratio": 2, "trials": 100, "seed": 0},
    "noise3": {"vary": "noise", "values": [0.01, 0.03, 0.05], "w": 0.5,
               "p": 3, "n": 18, "tau": 0, "ratio": 2, "trials": 100, "seed": 0},
    "ratio3": {"vary": "ratio", "values": [1.5, 2, 3, 4], "w": 0.5,
               "p": 3, "n": 18, "tau": 0, "noise": 0.01, "trials": 100, "seed": 0},
    "tau10": {"vary": "tau", "values": [0, 1, 3, 5], "w": [0.5, 0.65, 1.2, 2.0],
              "p": 10, "n": 80, "noise": 0.01, "ratio": 2, "trials": 100, "seed": 0},
    "noise10": {"vary": "noise", "values": [0.01, 0.03, 0.05], "w": 0.5,
                "p": 10, "n": 150, "tau": 0, "ratio": 2, "trials": 100, "seed": 0},
}
