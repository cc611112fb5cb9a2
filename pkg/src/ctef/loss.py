"""Algebraic ellipsoid loss, its residuals and closed-form derivatives.

For data rows ``y_i`` the residuals are

    r_i = ||diag(a) R(s) (y_i - c)||^2 - 1

and the loss is ``sum(r_i ** 2)``. Derivatives come from the closed-form
gradient of ``l(a, c, s) = 0.5 ||A R (x - c)||^2``; since ``r_i = 2 l - 1``
every Jacobian row is twice that gradient.
"""
from __future__ import annotations

import numpy as np

from .exceptions import DimensionError
from .geometry import EllipsoidParams, n_skew, skew_embed


def _as_params(theta, p=None) -> EllipsoidParams:
    if isinstance(theta, EllipsoidParams):
        return theta
    theta = np.asarray(theta, dtype=float)
    if p is None:
        # 2p + p(p-1)/2 = d  =>  p^2 + 3p - 2d = 0
        p = int(round((-3 + np.sqrt(9 + 8 * theta.size)) / 2))
    return EllipsoidParams.from_vector(theta, p)


def _check(params: EllipsoidParams, Y: np.ndarray) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[1] != params.dim:
        raise DimensionError(f"data have {Y.shape[1]} columns, parameters have dimension {params.dim}")
    return Y


def residuals(theta, Y) -> np.ndarray:
    """Residual vector ``r_i = ||A R (y_i - c)||^2 - 1``."""
    params = _as_params(theta)
    Y = _check(params, Y)
    Z = (Y - params.c) @ params.rotation.T * params.a
    return np.einsum("ij,ij->i", Z, Z) - 1.0


def loss(theta, Y) -> float:
    r = residuals(theta, Y)
    return float(r @ r)


def point_gradient(theta, x):
    """Gradient of ``0.5 ||A R (x - c)||^2`` with respect to ``(a, c, s)``.

    Returns a tuple ``(grad_a, grad_c, grad_s)``. The ``a`` component uses
    the squared entries of the rotated offset ``R (x - c)``.
    """
    params = _as_params(theta)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != params.dim:
        raise DimensionError("point dimension does not match parameters")
    p = params.dim
    a, c = params.a, params.c
    S = skew_embed(params.s, p)
    R = params.rotation
    y = x - c
    z = R @ y
    grad_a = a * z**2
    grad_c = -(R.T @ (a**2 * z))
    B = np.linalg.solve(np.eye(p) - S, np.outer(a**2 * z, y) @ (np.eye(p) + R.T))
    G = B.T - B
    grad_s = G[np.triu_indices(p, k=1)]
    return grad_a, grad_c, grad_s


def jacobian(theta, Y) -> np.ndarray:
    """Jacobian of :func:`residuals`, columns ordered ``(a, c, s)``."""
    params = _as_params(theta)
    Y = _check(params, Y)
    p = params.dim
    a = params.a
    S = skew_embed(params.s, p)
    R = params.rotation
    D = Y - params.c                     # rows y_i
    Z = D @ R.T                          # rows R y_i
    AZ = Z * a**2                        # rows A^2 R y_i
    J = np.empty((Y.shape[0], 2 * p + n_skew(p)))
    J[:, :p] = 2.0 * a * Z**2
    J[:, p:2 * p] = -2.0 * AZ @ R
    if p > 1:
        # B_i = u_i v_i^T with u_i = (I - S)^{-1} A^2 R y_i, v_i = (I + R) y_i
        U = np.linalg.solve(np.eye(p) - S, AZ.T).T
        V = D @ (np.eye(p) + R).T
        iu, ju = np.triu_indices(p, k=1)
        # (B^T - B)[j, k] = u_k v_j - u_j v_k
        J[:, 2 * p:] = 2.0 * (U[:, ju] * V[:, iu] - U[:, iu] * V[:, ju])
    return J
