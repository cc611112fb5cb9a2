"""Fit-quality measures: offset error, shape error and the l_{p,q} family."""
from __future__ import annotations

import numpy as np

from .exceptions import DimensionError


def offset_error(c, c_true) -> float:
    """Euclidean distance between estimated and true centers."""
    c = np.asarray(c, dtype=float).reshape(-1)
    c_true = np.asarray(c_true, dtype=float).reshape(-1)
    if c.shape != c_true.shape:
        raise DimensionError("centers differ in length")
    return float(np.linalg.norm(c - c_true))


def shape_error(L, L_true) -> float:
    """Condition number of ``L^{-1} L_true`` minus one.

    Zero exactly when the two shape matrices agree up to scale and an
    orthogonal factor.
    """
    L = np.asarray(L, dtype=float)
    L_true = np.asarray(L_true, dtype=float)
    if L.shape != L_true.shape or L.shape[0] != L.shape[1]:
        raise DimensionError("shape matrices must be square and of equal size")
    sv = np.linalg.svd(np.linalg.solve(L, L_true), compute_uv=False)
    return float(sv[0] / sv[-1] - 1.0)


def lpq_error(L, c, X, p: int = 2, q: int = 2) -> float:
    """``sum_i | ||L^{-1}(x_i - c)||^p - 1 |^q``."""
    L = np.asarray(L, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if p < 1 or q < 1:
        raise ValueError("exponents must be at least 1")
    Z = np.linalg.solve(L, (X - c).T)
    norms = np.linalg.norm(Z, axis=0)
    return float(np.sum(np.abs(norms**p - 1.0) ** q))
