"""Two-dimensional ellipse fits through different principal-component planes
of a banana-shaped (hybrid Rosenbrock) sample.

Run: python demos/04_rosenbrock_subspace.py
"""
import warnings

import numpy as np

from ctef import fit_reduced, sample_rosenbrock, select_subspace

X = sample_rosenbrock(2000, np.random.default_rng(0))
print("sample means", X.mean(axis=0).round(3))

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for w in (0.5, 1.5, 2.5, 3.5, 4.5):
        losses = {cols: fit_reduced(X, 2, cols, w).loss for cols in ((0, 1), (0, 2), (1, 2))}
        text = ", ".join(f"({a + 1},{b + 1}): {v:7.2f}" for (a, b), v in losses.items())
        print(f"w={w}: {text}")
    best, _ = select_subspace(X, 2)
print("lowest-loss plane at the default weight: components", [c + 1 for c in best])
