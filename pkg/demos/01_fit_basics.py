"""Fit an ellipsoid to noisy samples and compare with the generating one.

Run: python demos/01_fit_basics.py
"""
import numpy as np

from ctef import SimSpec, fit, offset_error, shape_error, simulate

rng = np.random.default_rng(0)

# 40 points on a random 3-d ellipsoid (axis ratio 3), 1% noise
X, truth = simulate(SimSpec(p=3, n=40, noise=0.01, ratio=3.0), rng)
result = fit(X)

print("true axis lengths   ", np.sort(truth.axis_lengths))
print("fitted axis lengths ", np.sort(result.axis_lengths))
print("true center         ", truth.center)
print("fitted center       ", result.center)
print(f"offset error {offset_error(result.center, truth.center):.4f}")
print(f"shape error  {shape_error(result.ellipsoid.shape_matrix, truth.shape_matrix):.4f}")
print(f"solver: {result.report.status} after {result.report.n_iterations} iterations, loss {result.loss:.3e}")

# The quadratic form (x - c)^T M (x - c) = 1 is available directly.
M, c = result.quadratic_form()
print("eigenvalues of M    ", np.linalg.eigvalsh(M))

# Without noise the fit is exact up to solver tolerance.
X0, truth0 = simulate(SimSpec(p=3, n=50, noise=0.0, ratio=3.0), rng)
exact = fit(X0)
print(f"noiseless shape error {shape_error(exact.ellipsoid.shape_matrix, truth0.shape_matrix):.1e}")
