"""Ellipsoid fitting: PCA transform, feasible box, bounded solve, back-transform.

Typical use::

    result = fit(X)               # X is (n, p)
    result.ellipsoid.center       # center in the original coordinates
    result.ellipsoid.axis_lengths
"""
from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import loss as _loss
from .exceptions import DegenerateDataError, DimensionError
from .geometry import Ellipsoid, EllipsoidParams, n_skew
from .trf import Bounds, SolveReport, SolverOptions, minimize

logger = logging.getLogger(__name__)

A_UPPER = 1e300
S_BOUND = 5.0
DEFAULT_WEIGHT = 0.5


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray      # columns are principal directions
    eigenvalues: np.ndarray     # nonincreasing

    def transform(self, X, columns=None) -> np.ndarray:
        V = self.components if columns is None else self.components[:, list(columns)]
        return (np.asarray(X, dtype=float) - self.mean) @ V


def fit_pca(X) -> PcaModel:
    """Principal components of the centered sample covariance.

    Eigenvectors are sorted by decreasing eigenvalue and each column is
    signed so that its largest-magnitude entry is positive (first such
    entry on ties).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError("data must be a 2-d array")
    if X.shape[0] < 2:
        raise DegenerateDataError("PCA needs at least two points")
    mean = X.mean(axis=0)
    C = np.cov(X - mean, rowvar=False, bias=True).reshape(X.shape[1], X.shape[1])
    evals, evecs = np.linalg.eigh(C)
    order = np.argsort(evals, kind="stable")[::-1]
    evals = np.clip(evals[order], 0.0, None)
    V = evecs[:, order]
    pivot = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivot, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return PcaModel(mean, V * signs, evals)


@dataclass(frozen=True)
class FeasibleBox:
    a_lower: np.ndarray
    a_upper: np.ndarray
    c_lower: np.ndarray
    c_upper: np.ndarray
    s_lower: np.ndarray
    s_upper: np.ndarray
    weight: float

    @property
    def dim(self) -> int:
        return self.a_lower.size

    def bounds(self) -> Bounds:
        return Bounds(
            np.concatenate([self.a_lower, self.c_lower, self.s_lower]),
            np.concatenate([self.a_upper, self.c_upper, self.s_upper]),
        )


def build_feasible_box(Y, w: float = DEFAULT_WEIGHT) -> FeasibleBox:
    """Feasible set for ``(a, c, s)`` built from the extent of ``Y``.

    The center box is the bounding box of ``Y`` scaled by ``w`` about its
    midpoint. Axis lengths are capped at ten times the largest extent, and
    the skew coordinates lie in ``[-5, 5]``.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if not w > 0:
        raise ValueError("weight w must be positive")
    p = Y.shape[1]
    lo = Y.min(axis=0)
    hi = Y.max(axis=0)
    extent = hi - lo
    m_max = extent.max()
    if not m_max > 0:
        raise DegenerateDataError("all data points coincide")
    mid = 0.5 * (lo + hi)
    half = 0.5 * w * extent
    # a flat coordinate still needs an open interval for the solver
    half = np.maximum(half, 1e-12 * m_max)
    k = n_skew(p)
    return FeasibleBox(
        a_lower=np.full(p, 1.0 / (10.0 * m_max)),
        a_upper=np.full(p, A_UPPER),
        c_lower=mid - half,
        c_upper=mid + half,
        s_lower=np.full(k, -S_BOUND),
        s_upper=np.full(k, S_BOUND),
        weight=float(w),
    )


def initial_point(box: FeasibleBox) -> EllipsoidParams:
    """All-ones ``a`` (clamped into the box), box-midpoint ``c``, zero ``s``."""
    a0 = np.clip(np.ones(box.dim), box.a_lower, box.a_upper)
    c0 = 0.5 * (box.c_lower + box.c_upper)
    return EllipsoidParams(a0, c0, np.zeros(box.s_lower.size))


@dataclass(frozen=True)
class FitResult:
    """A fitted ellipsoid in both the PCA frame and the original frame.

    ``params`` are the optimal ``(a, c, s)`` for the transformed data ``Y``;
    ``ellipsoid`` expresses the same fit in the coordinates of ``X`` (for a
    reduced fit, in the k-dimensional subspace spanned by ``basis``, with
    its center given in the ambient space).
    """

    params: EllipsoidParams
    ellipsoid: Ellipsoid
    loss: float
    report: SolveReport
    box: FeasibleBox
    pca: PcaModel
    subspace: tuple | None = None
    basis: np.ndarray | None = field(default=None, repr=False)

    @property
    def center(self) -> np.ndarray:
        """Center in the original coordinates."""
        if self.subspace is None:
            return self.ellipsoid.center
        return self.basis @ self.params.c + self.pca.mean

    @property
    def rotation(self) -> np.ndarray:
        """``R(s*) V^T``: maps original-frame offsets to the ellipsoid's axes."""
        R = self.params.rotation
        return R @ self.basis.T

    @property
    def axis_lengths(self) -> np.ndarray:
        return 1.0 / self.params.a

    def quadratic_form(self):
        """``(M, c)`` with ``M = Rt^T A^2 Rt`` in original coordinates."""
        Rt = self.rotation
        M = (Rt.T * self.params.a**2) @ Rt
        return 0.5 * (M + M.T), self.center

    def residuals(self, X) -> np.ndarray:
        """``||A Rt (x - ct)||^2 - 1`` for rows of ``X`` in original coordinates."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = (X - self.center) @ self.rotation.T * self.params.a
        return np.einsum("ij,ij->i", Z, Z) - 1.0

    @property
    def on_a_boundary(self) -> bool:
        """True if some axis length sits at its upper cap."""
        return bool(np.any(self.params.a <= self.box.a_lower * (1 + 1e-6)))


def _solve(Y, w, options):
    box = build_feasible_box(Y, w)
    x0 = initial_point(box).to_vector()
    report = minimize(
        lambda th: _loss.residuals(th, Y),
        lambda th: _loss.jacobian(th, Y),
        x0,
        box.bounds(),
        options,
    )
    params = EllipsoidParams.from_vector(report.x, Y.shape[1])
    return params, box, report


def _check_data(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError("data must be an (n, p) array")
    if not np.all(np.isfinite(X)):
        raise ValueError("data contain non-finite values")
    return X


def fit(X, w: float = DEFAULT_WEIGHT, options: SolverOptions | None = None) -> FitResult:
    """Fit an ellipsoid to the rows of ``X``.

    Parameters
    ----------
    X : (n, p) array
    w : float
        Scale of the center box relative to the data's bounding box in the
        PCA frame.
    options : SolverOptions, optional
        Solver tolerances and iteration cap.
    """
    X = _check_data(X)
    n, p = X.shape
    if n < p + 1:
        warnings.warn(f"only {n} points for a {p}-dimensional fit; the fit is underdetermined",
                      stacklevel=2)
    pca = fit_pca(X)
    Y = pca.transform(X)
    params, box, report = _solve(Y, w, options)
    V = pca.components
    ellipsoid = Ellipsoid(V @ params.c + pca.mean, params.rotation @ V.T, 1.0 / params.a)
    logger.debug("fit p=%d n=%d: %s after %d iterations", p, n, report.status, report.n_iterations)
    return FitResult(params, ellipsoid, _loss.loss(params, Y), report, box, pca,
                     subspace=None, basis=V)


def fit_reduced(X, k: int, columns=None, w: float = DEFAULT_WEIGHT,
                options: SolverOptions | None = None, pca: PcaModel | None = None) -> FitResult:
    """Fit a k-dimensional ellipsoid in the span of selected principal components.

    ``columns`` are zero-based indices into the principal components
    (default: the first ``k``). The returned ``ellipsoid`` lives in the
    k-dimensional subspace coordinates; ``basis`` holds the p x k matrix.
    """
    X = _check_data(X)
    p = X.shape[1]
    columns = tuple(range(k)) if columns is None else tuple(int(c) for c in columns)
    if len(columns) != k or len(set(columns)) != k:
        raise ValueError("need k distinct column indices")
    if not 1 <= k <= p or any(c < 0 or c >= p for c in columns):
        raise DimensionError(f"invalid columns {columns} for p={p}")
    pca = pca or fit_pca(X)
    Vk = pca.components[:, list(columns)]
    Y = pca.transform(X, columns)
    params, box, report = _solve(Y, w, options)
    ellipsoid = params.to_ellipsoid()
    return FitResult(params, ellipsoid, _loss.loss(params, Y), report, box, pca,
                     subspace=columns, basis=Vk)


def default_candidates(p: int, k: int):
    """All k-subsets of the first ``min(p, k + 2)`` principal components."""
    return [tuple(c) for c in itertools.combinations(range(min(p, k + 2)), k)]


def select_subspace(X, k: int, w: float = DEFAULT_WEIGHT, candidates=None,
                    options: SolverOptions | None = None):
    """Choose principal-component columns whose reduced fit has the lowest loss.

    Returns ``(best_columns, losses)`` where ``losses`` maps each candidate
    to its final loss (``nan`` if its fit raised). Ties go to the
    lexicographically smallest column tuple.
    """
    X = _check_data(X)
    if candidates is None:
        candidates = default_candidates(X.shape[1], k)
    candidates = [tuple(int(c) for c in cand) for cand in candidates]
    if not candidates:
        raise ValueError("no candidate column sets")
    pca = fit_pca(X)
    losses = {}
    for cand in candidates:
        if cand in losses:
            continue
        try:
            losses[cand] = fit_reduced(X, k, cand, w, options, pca=pca).loss
        except (ValueError, RuntimeError) as exc:
            logger.warning("candidate %s failed: %s", cand, exc)
            losses[cand] = float("nan")
    ok = [c for c in losses if np.isfinite(losses[c])]
    if not ok:
        raise DegenerateDataError("every candidate subspace fit failed")
    best = min(ok, key=lambda c: (losses[c], c))
    return best, losses
