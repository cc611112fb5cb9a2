"""A desk-scale simulation grid: how errors grow with noise.

Writes trials.csv, timings.csv, summary.csv and two SVG box plots into
demo_out/noise/. The same run is available as
``ctef benchmark --preset noise3 --trials 30``.

Run: python demos/03_experiment_grid.py
"""
import csv

from ctef.bench import PRESETS, ExperimentGrid, run_benchmark

cfg = dict(PRESETS["noise3"], trials=30, thresholds={"offset": 0.5, "shape": 1.0})
grid = ExperimentGrid.from_dict(cfg)
paths = run_benchmark(grid, "demo_out/noise", workers=2)

with open(paths["summary"]) as fh:
    for row in csv.DictReader(fh):
        print(f"noise={float(row['value']):.2f} {row['error']:>6}: median {float(row['median']):.3f} "
              f"IQR [{float(row['q1']):.3f}, {float(row['q3']):.3f}], over threshold {row['n_exceed']}")
print("plots:", *paths["plots"])
