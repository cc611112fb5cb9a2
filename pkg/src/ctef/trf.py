"""Bound-constrained nonlinear least squares by a trust-region reflective method.

Minimizes ``0.5 * ||r(x)||^2`` subject to ``lower <= x <= upper`` following
the subspace trust-region interior-reflective (STIR) approach of Branch,
Coleman and Li:

* the trust region is measured in variables scaled by ``sqrt(v)``, where
  ``v_i`` is the distance to the bound the negative gradient points at
  (1 for unbounded directions), so long steps toward a near bound are
  penalized;
* the subproblem is restricted to the plane spanned by the scaled gradient
  and a regularized Gauss-Newton direction (computed by SVD least squares,
  so rank deficiency is handled), or optionally solved exactly over the
  whole space;
* a step that leaves the box is cut at the first face, and the best of the
  truncated step, its reflection off that face, and a scaled Cauchy step
  is taken. Iterates stay strictly inside the box.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractError, DimensionError, SolverError

EPS = np.finfo(float).eps
# bounds at or beyond this magnitude are treated as absent
SENTINEL = 1e100

GRADIENT_CONVERGED = "gradient-converged"
STEP_CONVERGED = "step-converged"
COST_CONVERGED = "cost-converged"
MAX_ITER = "max-iter"


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape:
            raise DimensionError("lower and upper bounds differ in length")
        if np.any(lower >= upper):
            raise ContractError("each lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unbounded(cls, d: int) -> "Bounds":
        return cls(np.full(d, -np.inf), np.full(d, np.inf))


@dataclass(frozen=True)
class SolverOptions:
    gtol: float = 1e-8
    ftol: float = 1e-8
    xtol: float = 1e-8
    max_iter: int = 500
    subproblem: str = "subspace"   # or "exact"

    def __post_init__(self):
        if self.subproblem not in ("subspace", "exact"):
            raise ValueError("subproblem must be 'subspace' or 'exact'")


@dataclass(frozen=True)
class SolveReport:
    x: np.ndarray
    cost: float
    n_iterations: int
    n_evaluations: int
    status: str
    active_bounds: tuple
    gradient_norm: float
    fun: np.ndarray = field(repr=False)
    jac: np.ndarray = field(repr=False)

    @property
    def success(self) -> bool:
        return self.status != MAX_ITER


# -- geometry of the box -------------------------------------------------------

def _scaling_vector(x, g, lb, ub):
    """Coleman-Li scaling ``v`` and its derivative sign ``dv``."""
    v = np.ones_like(x)
    dv = np.zeros_like(x)
    mask = (g < 0) & np.isfinite(ub)
    v[mask] = ub[mask] - x[mask]
    dv[mask] = -1
    mask = (g > 0) & np.isfinite(lb)
    v[mask] = x[mask] - lb[mask]
    dv[mask] = 1
    return v, dv


def _step_to_bound(x, s, lb, ub):
    """Largest ``t >= 0`` with ``x + t s`` in the box, and which faces are hit.

    ``hits[i]`` is -1 / +1 when coordinate ``i`` reaches its lower / upper
    bound at that step length, 0 otherwise.
    """
    nz = s != 0
    steps = np.full_like(x, np.inf)
    with np.errstate(over="ignore"):
        steps[nz] = np.maximum((lb - x)[nz] / s[nz], (ub - x)[nz] / s[nz])
    t = np.min(steps)
    hits = np.where(steps == t, np.sign(s), 0).astype(int)
    return t, hits


def _in_bounds(x, lb, ub):
    return np.all((x >= lb) & (x <= ub))


def _make_strictly_feasible(x, lb, ub, rstep=1e-10):
    x = x.copy()
    active = _active(x, lb, ub, rtol=0)
    low = active == -1
    up = active == 1
    if rstep == 0:
        x[low] = np.nextafter(lb[low], ub[low])
        x[up] = np.nextafter(ub[up], lb[up])
    else:
        x[low] = lb[low] + rstep * np.maximum(1, np.abs(lb[low]))
        x[up] = ub[up] - rstep * np.maximum(1, np.abs(ub[up]))
    tight = (x < lb) | (x > ub)
    x[tight] = 0.5 * (lb[tight] + ub[tight])
    return x


def _active(x, lb, ub, rtol=1e-10):
    """-1 / +1 for coordinates on the lower / upper bound, 0 otherwise."""
    out = np.zeros(x.size, dtype=int)
    if rtol == 0:
        out[x <= lb] = -1
        out[x >= ub] = 1
        return out
    dl = x - lb
    du = ub - x
    with np.errstate(invalid="ignore", over="ignore"):
        out[np.isfinite(lb) & (dl <= rtol * np.maximum(1, np.abs(lb)))] = -1
        out[np.isfinite(ub) & (du <= rtol * np.maximum(1, np.abs(ub)))] = 1
    return out


def _trust_region_intersection(x, s, radius):
    """Roots ``t1 <= t2`` of ``||x + t s|| = radius``."""
    a = s @ s
    if a == 0:
        raise SolverError("zero direction in trust-region intersection")
    b = x @ s
    c = x @ x - radius**2
    if c > 0:
        raise SolverError("point lies outside the trust region")
    d = np.sqrt(b * b - a * c)
    q = -(b + np.copysign(d, b))
    t1 = q / a
    t2 = c / q
    return (t1, t2) if t1 < t2 else (t2, t1)


# -- 1-d quadratic models along a direction ------------------------------------

def _quadratic_1d(J, g, s, diag=None, s0=None):
    """Coefficients of ``f(t) = a t^2 + b t + c`` for the model along ``s``."""
    v = J @ s
    a = v @ v
    if diag is not None:
        a += s @ (diag * s)
    a *= 0.5
    b = g @ s
    if s0 is None:
        return a, b, 0.0
    u = J @ s0
    b += u @ v
    c = 0.5 * (u @ u) + g @ s0
    if diag is not None:
        b += s0 @ (diag * s)
        c += 0.5 * (s0 @ (diag * s0))
    return a, b, c


def _minimize_quadratic_1d(a, b, lo, hi, c=0.0):
    ts = [lo, hi]
    if a != 0:
        extremum = -0.5 * b / a
        if lo < extremum < hi:
            ts.append(extremum)
    ts = np.asarray(ts)
    vals = ts * (a * ts + b) + c
    k = int(np.argmin(vals))
    return ts[k], vals[k]


def _model_value(J, g, s, diag):
    Js = J @ s
    return 0.5 * (Js @ Js + s @ (diag * s)) + g @ s


# -- trust-region subproblem ---------------------------------------------------

def _solve_subproblem(n, m, uf, sv, V, radius, alpha0=None, rtol=0.01, max_iter=10):
    """Minimize ``||J p + f||`` over ``||p|| <= radius`` given the SVD of J.

    Uses the More (1978) secular-equation iteration on the
    Levenberg-Marquardt parameter ``alpha``; returns ``(p, alpha)``.
    """
    suf = sv * uf

    full_rank = m >= n and sv[-1] > EPS * m * sv[0]
    if full_rank:
        p = -V @ (uf / sv)
        if np.linalg.norm(p) <= radius:
            return p, 0.0

    def phi(alpha):
        denom = sv**2 + alpha
        p_norm = np.linalg.norm(suf / denom)
        return p_norm - radius, -np.sum(suf**2 / denom**3) / p_norm

    alpha_hi = np.linalg.norm(suf) / radius
    if full_rank:
        f0, df0 = phi(0.0)
        alpha_lo = -f0 / df0
    else:
        alpha_lo = 0.0

    if alpha0 is None or (not full_rank and alpha0 == 0):
        alpha = max(1e-3 * alpha_hi, np.sqrt(alpha_lo * alpha_hi))
    else:
        alpha = alpha0

    for _ in range(max_iter):
        if alpha < alpha_lo or alpha > alpha_hi:
            alpha = max(1e-3 * alpha_hi, np.sqrt(alpha_lo * alpha_hi))
        f, df = phi(alpha)
        if f < 0:
            alpha_hi = alpha
        ratio = f / df
        alpha_lo = max(alpha_lo, alpha - ratio)
        alpha -= (f + radius) * ratio / radius
        if abs(f) < rtol * radius:
            break

    p = -V @ (suf / (sv**2 + alpha))
    p *= radius / np.linalg.norm(p)
    return p, alpha


def _solve_2d(B, g, radius):
    """Minimize ``0.5 p^T B p + g^T p`` over the disc ``||p|| <= radius``."""
    if g.size == 1:
        # one-parameter problem: the subspace is a line
        ends = np.array([-radius, radius])
        if B[0, 0] > 0:
            ends = np.append(ends, np.clip(-g[0] / B[0, 0], -radius, radius))
        values = 0.5 * B[0, 0] * ends**2 + g[0] * ends
        return ends[[int(np.argmin(values))]]
    try:
        L = np.linalg.cholesky(B)
        p = -np.linalg.solve(L.T, np.linalg.solve(L, g))
        if p @ p <= radius**2:
            return p
    except np.linalg.LinAlgError:
        pass
    # boundary minimum: parametrize the circle by t = tan(phi / 2)
    a = B[0, 0] * radius**2
    b = B[0, 1] * radius**2
    c = B[1, 1] * radius**2
    d = g[0] * radius
    f = g[1] * radius
    t = np.roots([-b + d, 2 * (a - c + f), 6 * b, 2 * (-a + c + f), -b - d])
    t = np.real(t[np.isreal(t)])
    # t -> infinity is the point (0, -radius)
    cand = np.hstack([
        radius * np.vstack((2 * t / (1 + t**2), (1 - t**2) / (1 + t**2))),
        [[0.0], [-radius]],
    ])
    values = 0.5 * np.sum(cand * (B @ cand), axis=0) + g @ cand
    return cand[:, int(np.argmin(values))]


def _subspace_basis(J_h, f, g_h, diag_h, radius):
    """Orthonormal basis of span{scaled gradient, Gauss-Newton direction}.

    The Gauss-Newton direction solves the least-squares system augmented
    with ``diag_h`` plus a small Tikhonov term tied to the Cauchy step.
    """
    m, n = J_h.shape
    a, b, _ = _quadratic_1d(J_h, g_h, -g_h, diag=diag_h)
    _, ag_value = _minimize_quadratic_1d(a, b, 0.0, radius / np.linalg.norm(g_h))
    reg = -ag_value / radius**2
    A = np.vstack([J_h, np.diag(np.sqrt(diag_h + reg))])
    rhs = np.concatenate([f, np.zeros(n)])
    gn_h = np.linalg.lstsq(A, rhs, rcond=None)[0]
    Q, _ = np.linalg.qr(np.column_stack([g_h, gn_h]))
    return Q


def _select_step(x, J_h, diag_h, g_h, p, p_h, d, radius, lb, ub, theta):
    """Pick among the truncated, reflected and Cauchy steps.

    Returns ``(step, step_h, predicted_reduction)``.
    """
    if _in_bounds(x + p, lb, ub):
        return p, p_h, -_model_value(J_h, g_h, p_h, diag_h)

    p_stride, hits = _step_to_bound(x, p, lb, ub)

    r_h = p_h.copy()
    r_h[hits.astype(bool)] *= -1
    r = d * r_h

    p = p * p_stride
    p_h = p_h * p_stride
    x_on_face = x + p

    _, to_tr = _trust_region_intersection(p_h, r_h, radius)
    to_bound, _ = _step_to_bound(x_on_face, r, lb, ub)

    r_stride = min(to_bound, to_tr)
    if r_stride > 0:
        r_lo = (1 - theta) * p_stride / r_stride
        r_hi = theta * to_bound if r_stride == to_bound else to_tr
    else:
        r_lo, r_hi = 0.0, -1.0

    if r_lo <= r_hi:
        a, b, c = _quadratic_1d(J_h, g_h, r_h, diag=diag_h, s0=p_h)
        t, r_value = _minimize_quadratic_1d(a, b, r_lo, r_hi, c=c)
        r_h = p_h + t * r_h
        r = d * r_h
    else:
        r_value = np.inf

    # pull the truncated step strictly inside
    p = theta * p
    p_h = theta * p_h
    p_value = _model_value(J_h, g_h, p_h, diag_h)

    ag_h = -g_h
    ag = d * ag_h
    to_tr = radius / np.linalg.norm(ag_h)
    to_bound, _ = _step_to_bound(x, ag, lb, ub)
    ag_stride = theta * to_bound if to_bound < to_tr else to_tr
    a, b, _ = _quadratic_1d(J_h, g_h, ag_h, diag=diag_h)
    t, ag_value = _minimize_quadratic_1d(a, b, 0.0, ag_stride)
    ag_h = t * ag_h
    ag = t * ag

    if p_value < r_value and p_value < ag_value:
        return p, p_h, -p_value
    if r_value < p_value and r_value < ag_value:
        return r, r_h, -r_value
    return ag, ag_h, -ag_value


def _update_radius(radius, actual, predicted, step_norm, hit_boundary):
    if predicted > 0:
        ratio = actual / predicted
    elif predicted == actual == 0:
        ratio = 1.0
    else:
        ratio = 0.0
    if ratio < 0.25:
        radius = 0.25 * step_norm
    elif ratio > 0.75 and hit_boundary:
        radius *= 2.0
    return radius, ratio


def _termination(dF, F, dx_norm, x_norm, ratio, ftol, xtol):
    f_ok = dF < ftol * F and ratio > 0.25
    x_ok = dx_norm < xtol * (xtol + x_norm)
    if f_ok:
        return COST_CONVERGED
    if x_ok:
        return STEP_CONVERGED
    return None


# -- driver --------------------------------------------------------------------

def minimize(residual_fn, jacobian_fn, x0, bounds: Bounds | None = None,
             options: SolverOptions | None = None) -> SolveReport:
    """Minimize ``0.5 ||residual_fn(x)||^2`` inside ``bounds``.

    Parameters
    ----------
    residual_fn : callable
        ``x -> r`` with ``r`` of length m.
    jacobian_fn : callable
        ``x -> J`` with shape (m, d).
    x0 : array_like
        Starting point inside the box. Points on a face are nudged inward.
    bounds : Bounds, optional
        Box constraints; unbounded if omitted. Bounds of magnitude
        ``SENTINEL`` or more count as infinite.
    options : SolverOptions, optional

    Returns
    -------
    SolveReport
        ``status`` records which of the gradient, cost or step tests fired,
        or ``"max-iter"`` if none did.
    """
    opts = options or SolverOptions()
    x = np.array(x0, dtype=float).reshape(-1)
    n = x.size
    if bounds is None:
        bounds = Bounds.unbounded(n)
    lb = np.where(bounds.lower <= -SENTINEL, -np.inf, bounds.lower)
    ub = np.where(bounds.upper >= SENTINEL, np.inf, bounds.upper)
    if lb.size != n:
        raise DimensionError("bounds and starting point differ in length")
    if np.any(x < bounds.lower) or np.any(x > bounds.upper):
        raise ContractError("starting point lies outside the bounds")
    x_start = x.copy()
    x = _make_strictly_feasible(x, lb, ub)

    f = np.asarray(residual_fn(x), dtype=float)
    if not np.all(np.isfinite(f)):
        raise ContractError("residuals are not finite at the starting point")
    J = np.asarray(jacobian_fn(x), dtype=float)
    m = f.size
    if J.shape != (m, n):
        raise DimensionError(f"Jacobian has shape {J.shape}, expected {(m, n)}")
    nfev = 1
    cost = 0.5 * (f @ f)
    g = J.T @ f

    v, _ = _scaling_vector(x, g, lb, ub)
    # measured at the caller's point, so a start nudged off a face at 0 gets radius 1
    radius = np.linalg.norm(x_start / np.sqrt(v))
    if radius == 0:
        radius = 1.0

    f_aug = np.zeros(m + n)
    J_aug = np.empty((m + n, n))
    alpha = 0.0
    status = None
    iteration = 0
    g_norm = np.inf

    while True:
        v, dv = _scaling_vector(x, g, lb, ub)
        g_norm = np.linalg.norm(g * v, ord=np.inf)
        if g_norm < opts.gtol:
            status = GRADIENT_CONVERGED
        if status is not None or iteration >= opts.max_iter:
            break

        d = np.sqrt(v)
        diag_h = g * dv
        g_h = d * g

        J_h = J * d
        if opts.subproblem == "exact":
            f_aug[:m] = f
            J_aug[:m] = J_h
            J_aug[m:] = np.diag(np.sqrt(diag_h))
            U, sv, Vt = np.linalg.svd(J_aug, full_matrices=False)
            V = Vt.T
            uf = U.T @ f_aug
        else:
            Q = _subspace_basis(J_h, f, g_h, diag_h, radius)
            JQ = J_h @ Q
            B_Q = JQ.T @ JQ + (Q.T * diag_h) @ Q
            g_Q = Q.T @ g_h

        theta = max(0.995, 1 - g_norm)

        actual = -1.0
        while actual <= 0:
            if opts.subproblem == "exact":
                p_h, alpha = _solve_subproblem(n, m, uf, sv, V, radius, alpha0=alpha)
            else:
                p_h = Q @ _solve_2d(B_Q, g_Q, radius)
            p = d * p_h
            step, step_h, predicted = _select_step(
                x, J_h, diag_h, g_h, p, p_h, d, radius, lb, ub, theta)

            x_new = _make_strictly_feasible(x + step, lb, ub, rstep=0)
            f_new = np.asarray(residual_fn(x_new), dtype=float)
            nfev += 1
            step_h_norm = np.linalg.norm(step_h)

            if not np.all(np.isfinite(f_new)):
                radius = 0.25 * step_h_norm
                if not radius > 0 or not np.isfinite(radius):
                    raise SolverError("trust radius underflow after non-finite residuals")
                continue

            cost_new = 0.5 * (f_new @ f_new)
            actual = cost - cost_new
            new_radius, ratio = _update_radius(
                radius, actual, predicted, step_h_norm, step_h_norm > 0.95 * radius)

            status = _termination(actual, cost, np.linalg.norm(step),
                                  np.linalg.norm(x), ratio, opts.ftol, opts.xtol)
            if status is not None:
                break
            if new_radius == 0:
                status = STEP_CONVERGED
                break
            alpha *= radius / new_radius
            radius = new_radius

        if actual > 0:
            x = x_new
            f = f_new
            cost = cost_new
            J = np.asarray(jacobian_fn(x), dtype=float)
            g = J.T @ f
        iteration += 1

    if status is None:
        status = MAX_ITER
    active = _active(x, lb, ub, rtol=opts.xtol)
    return SolveReport(
        x=x,
        cost=float(cost),
        n_iterations=iteration,
        n_evaluations=nfev,
        status=status,
        active_bounds=tuple(int(i) for i in np.flatnonzero(active)),
        gradient_norm=float(g_norm),
        fun=f,
        jac=J,
    )
