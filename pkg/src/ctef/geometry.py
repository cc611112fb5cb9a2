"""Ellipsoid representations and the Cayley rotation parametrization.

An ellipsoid in R^p is stored either as optimization coordinates
``(a, c, s)`` (inverse axis lengths, center, skew coordinates) or as a
geometric triple (center, rotation, axis lengths). Both describe

    { x : ||diag(a) R (x - c)||^2 = 1 },   R = cayley(skew_embed(s)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError, DimensionError


def n_skew(p: int) -> int:
    """Number of free entries of a p x p skew-symmetric matrix."""
    return p * (p - 1) // 2


def _triu(p: int):
    # row-major strict upper triangle: (0,1), (0,2), ..., (1,2), ...
    return np.triu_indices(p, k=1)


def skew_embed(s, p: int) -> np.ndarray:
    """Place coordinates ``s`` in the strict upper triangle of a skew matrix.

    Entries fill the upper triangle row by row, so for p = 3 the result is
    ``[[0, s1, s2], [-s1, 0, s3], [-s2, -s3, 0]]``.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.size != n_skew(p):
        raise DimensionError(f"expected {n_skew(p)} skew coordinates for p={p}, got {s.size}")
    S = np.zeros((p, p))
    iu = _triu(p)
    S[iu] = s
    S[(iu[1], iu[0])] = -s
    return S


def skew_coords(S: np.ndarray) -> np.ndarray:
    """Inverse of :func:`skew_embed`: read the strict upper triangle."""
    S = np.asarray(S, dtype=float)
    return S[_triu(S.shape[0])].copy()


def cayley(S: np.ndarray) -> np.ndarray:
    """Cayley transform ``(I + S)^{-1} (I - S)`` of a skew-symmetric matrix."""
    S = np.asarray(S, dtype=float)
    p = S.shape[0]
    if p == 0:
        return np.zeros((0, 0))
    eye = np.eye(p)
    return np.linalg.solve(eye + S, eye - S)


def rotation_from_coords(s, p: int) -> np.ndarray:
    return cayley(skew_embed(s, p))


def random_rotation(p: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed rotation in SO(p).

    QR of a Gaussian matrix with the signs of R's diagonal folded into Q,
    then one column flipped if the determinant came out negative.
    """
    if p < 1:
        raise DimensionError("p must be at least 1")
    Z = rng.standard_normal((p, p))
    Q, R = np.linalg.qr(Z)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    Q = Q * d
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


@dataclass(frozen=True)
class EllipsoidParams:
    """Optimization coordinates: inverse axis lengths ``a``, center ``c``,
    Cayley coordinates ``s``."""

    a: np.ndarray
    c: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        s = np.asarray(self.s, dtype=float).reshape(-1)
        if c.size != a.size or s.size != n_skew(a.size):
            raise DimensionError(
                f"inconsistent parameter sizes: a={a.size}, c={c.size}, s={s.size}"
            )
        if np.any(a <= 0):
            raise ContractError("inverse axis lengths must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    @property
    def dim(self) -> int:
        return self.a.size

    @property
    def rotation(self) -> np.ndarray:
        return rotation_from_coords(self.s, self.dim)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.a, self.c, self.s])

    @classmethod
    def from_vector(cls, theta, p: int) -> "EllipsoidParams":
        theta = np.asarray(theta, dtype=float)
        if theta.size != 2 * p + n_skew(p):
            raise DimensionError(f"parameter vector of length {theta.size} does not match p={p}")
        return cls(theta[:p], theta[p:2 * p], theta[2 * p:])

    def to_ellipsoid(self) -> "Ellipsoid":
        return Ellipsoid(self.c, self.rotation, 1.0 / self.a)


@dataclass(frozen=True)
class QuadraticForm:
    """``{x : (x - c)^T M (x - c) = 1}``."""

    M: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class Ellipsoid:
    """Geometric form: the unit sphere scaled by ``axis_lengths``, rotated by
    ``rotation.T`` and translated to ``center``."""

    center: np.ndarray
    rotation: np.ndarray
    axis_lengths: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        rotation = np.asarray(self.rotation, dtype=float)
        lengths = np.asarray(self.axis_lengths, dtype=float).reshape(-1)
        p = center.size
        if rotation.shape != (p, p) or lengths.size != p:
            raise DimensionError("center, rotation and axis lengths disagree in dimension")
        if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
            raise ContractError("axis lengths must be positive and finite")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "axis_lengths", lengths)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def shape_matrix(self) -> np.ndarray:
        """``Lambda = R^T A^{-1}``, mapping the unit sphere onto the centered ellipsoid."""
        return self.rotation.T * self.axis_lengths

    def implicit(self, X) -> np.ndarray:
        """``||A R (x - c)||^2`` for each row of ``X``; equals 1 on the surface."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = (X - self.center) @ self.rotation.T / self.axis_lengths
        return np.einsum("ij,ij->i", Z, Z)

    def quadratic_form(self) -> QuadraticForm:
        return to_quadratic_form(self)


def to_quadratic_form(e) -> QuadraticForm:
    """``M = R^T diag(a)^2 R`` for either parametrization."""
    if isinstance(e, EllipsoidParams):
        R, a, c = e.rotation, e.a, e.c
    else:
        R, a, c = e.rotation, 1.0 / e.axis_lengths, e.center
    M = (R.T * a**2) @ R
    M = 0.5 * (M + M.T)
    return QuadraticForm(M, c.copy())


def sample_surface(e: Ellipsoid, eta, tol: float = 1e-10) -> np.ndarray:
    """Map unit vector(s) ``eta`` onto the ellipsoid: ``R^T A^{-1} eta + c``.

    ``eta`` may be a single vector or an (n, p) array of unit rows.
    """
    eta = np.asarray(eta, dtype=float)
    norms = np.linalg.norm(np.atleast_2d(eta), axis=1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ContractError("eta must have unit norm")
    return (eta * e.axis_lengths) @ e.rotation + e.center
