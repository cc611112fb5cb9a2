"""Synthetic data: the Ellipsoid-Gaussian model and a 3-d hybrid Rosenbrock sampler.

Ellipsoid-Gaussian draws are ``x = Lambda eta + c + eps`` with ``eta`` from a
von Mises-Fisher distribution on the unit sphere and isotropic Gaussian
noise ``eps``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError
from .geometry import Ellipsoid, random_rotation


def sample_vmf(mu, tau: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` samples from vMF(mu, tau) on the sphere S^{p-1}.

    Wood's (1994) rejection sampler for the component ``w = <x, mu>``,
    combined with a uniform direction in the tangent space of ``mu``.
    ``tau = 0`` gives the uniform distribution.
    """
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if abs(np.linalg.norm(mu) - 1.0) > 1e-10:
        raise ContractError("mean direction must be a unit vector")
    if tau < 0:
        raise ContractError("concentration must be nonnegative")
    p = mu.size
    if p == 1:
        raise ContractError("vMF sampling needs dimension at least 2")
    m = p - 1
    # stable form of b = (-2 tau + sqrt(4 tau^2 + m^2)) / m
    b = m / (2.0 * tau + np.sqrt(4.0 * tau**2 + m**2))
    x0 = (1.0 - b) / (1.0 + b)
    c = tau * x0 + m * np.log(1.0 - x0**2)

    w = np.empty(n)
    filled = 0
    while filled < n:
        k = max(n - filled, 16)
        z = rng.beta(m / 2.0, m / 2.0, size=k)
        cand = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=k)
        with np.errstate(divide="ignore"):
            ok = tau * cand + m * np.log(1.0 - x0 * cand) - c >= np.log(u)
        take = cand[ok][: n - filled]
        w[filled:filled + take.size] = take
        filled += take.size

    g = rng.standard_normal((n, p))
    g -= np.outer(g @ mu, mu)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    out = w[:, None] * mu + np.sqrt(np.clip(1.0 - w**2, 0.0, None))[:, None] * g
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def uniform_sphere(p: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(p)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class SimSpec:
    """Configuration of one Ellipsoid-Gaussian experiment condition.

    ``noise`` is the noise standard deviation as a fraction of the longest
    axis diameter (0.01 means 1%). ``center_scale`` says whether the 10 in
    N(0, 10) is a variance or a standard deviation; ``diameter_factor`` is
    the multiple of the longest axis length taken as its diameter.
    """

    p: int = 3
    n: int = 18
    tau: float = 0.0
    noise: float = 0.01
    ratio: float = 2.0
    seed: int | None = None
    center_scale: str = "variance"
    diameter_factor: float = 2.0

    def __post_init__(self):
        if self.p < 2:
            raise ContractError("dimension must be at least 2")
        if self.n < 1:
            raise ContractError("need at least one sample")
        if self.tau < 0 or self.noise < 0 or self.ratio < 1:
            raise ContractError("need tau >= 0, noise >= 0 and axis ratio >= 1")
        if self.center_scale not in ("variance", "std"):
            raise ContractError("center_scale must be 'variance' or 'std'")


@dataclass(frozen=True)
class GroundTruth:
    center: np.ndarray
    rotation: np.ndarray
    axis_lengths: np.ndarray
    mu: np.ndarray
    sigma: float

    @property
    def a(self) -> np.ndarray:
        return 1.0 / self.axis_lengths

    @property
    def shape_matrix(self) -> np.ndarray:
        return self.rotation.T * self.axis_lengths

    @property
    def ellipsoid(self) -> Ellipsoid:
        return Ellipsoid(self.center, self.rotation, self.axis_lengths)

    def to_dict(self) -> dict:
        return {
            "center": self.center.tolist(),
            "rotation": self.rotation.tolist(),
            "axis_lengths": self.axis_lengths.tolist(),
            "shape_matrix": self.shape_matrix.tolist(),
            "mu": self.mu.tolist(),
            "sigma": self.sigma,
        }


def random_ground_truth(spec: SimSpec, rng: np.random.Generator) -> GroundTruth:
    """Random ellipsoid with unit-determinant shape matrix and the given axis ratio."""
    p = spec.p
    scale = np.sqrt(10.0) if spec.center_scale == "variance" else 10.0
    center = rng.normal(0.0, scale, size=p)
    lengths = np.empty(p)
    lengths[0] = spec.ratio
    lengths[1] = 1.0
    lengths[2:] = rng.uniform(1.0, spec.ratio, size=p - 2)
    lengths *= np.exp(-np.mean(np.log(lengths)))
    rotation = random_rotation(p, rng)
    mu = uniform_sphere(p, rng)
    sigma = spec.noise * spec.diameter_factor * lengths.max()
    return GroundTruth(center, rotation, lengths, mu, float(sigma))


def sample_model(truth: GroundTruth, n: int, tau: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` points from the Ellipsoid-Gaussian model with fixed parameters."""
    eta = sample_vmf(truth.mu, tau, n, rng)
    X = eta @ truth.shape_matrix.T + truth.center
    if truth.sigma > 0:
        X = X + rng.normal(0.0, truth.sigma, size=X.shape)
    return X


def simulate(spec: SimSpec, rng: np.random.Generator | None = None):
    """Random ground truth plus ``spec.n`` samples from it.

    Returns ``(X, truth)``. Without ``rng`` a generator is seeded from
    ``spec.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    truth = random_ground_truth(spec, rng)
    return sample_model(truth, spec.n, spec.tau, rng), truth


def rosenbrock_log_density(x) -> np.ndarray:
    """Unnormalized log density of the 3-d hybrid Rosenbrock model."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    return -x1**2 - 30.0 * (x2 - x1**2) ** 2 - (x3 - x2**2) ** 2


def sample_rosenbrock(n: int, rng: np.random.Generator, burn_in: int = 5000,
                      thinning: int = 5, step: float = 0.3, x0=None) -> np.ndarray:
    """Random-walk Metropolis samples from the hybrid Rosenbrock density."""
    x = np.zeros(3) if x0 is None else np.asarray(x0, dtype=float).copy()
    logp = rosenbrock_log_density(x)
    total = burn_in + n * thinning
    proposals = rng.normal(0.0, step, size=(total, 3))
    log_u = np.log(rng.uniform(size=total))
    out = np.empty((n, 3))
    k = 0
    for t in range(total):
        y = x + proposals[t]
        logp_y = rosenbrock_log_density(y)
        if log_u[t] < logp_y - logp:
            x, logp = y, logp_y
        if t >= burn_in and (t - burn_in) % thinning == thinning - 1:
            out[k] = x
            k += 1
    return out


def concentric_circles(n: int, radii=(1.0, 3.0), noise: float = 0.01,
                       rng: np.random.Generator | None = None):
    """Points split evenly over concentric circles, with labels.

    ``noise`` is the Gaussian standard deviation as a fraction of the
    largest circle's diameter.
    """
    rng = np.random.default_rng() if rng is None else rng
    radii = np.asarray(radii, dtype=float)
    labels = np.arange(n) % radii.size
    angles = rng.uniform(0.0, 2 * np.pi, size=n)
    X = radii[labels, None] * np.column_stack([np.cos(angles), np.sin(angles)])
    X += rng.normal(0.0, noise * 2 * radii.max(), size=X.shape)
    return X, labels


def noisy_ellipses(n: int, ellipses, noise: float = 0.01,
                   rng: np.random.Generator | None = None):
    """Uniform-angle samples from several 2-d ellipses, with labels.

    ``ellipses`` is a sequence of ``(center, axis_lengths, angle)``;
    ``noise`` is relative to the largest axis diameter over all ellipses.
    """
    rng = np.random.default_rng() if rng is None else rng
    k = len(ellipses)
    labels = np.arange(n) % k
    X = np.empty((n, 2))
    biggest = max(max(e[1]) for e in ellipses)
    for j, (center, lengths, angle) in enumerate(ellipses):
        idx = labels == j
        t = rng.uniform(0.0, 2 * np.pi, size=idx.sum())
        local = np.column_stack([lengths[0] * np.cos(t), lengths[1] * np.sin(t)])
        ca, sa = np.cos(angle), np.sin(angle)
        X[idx] = local @ np.array([[ca, sa], [-sa, ca]]) + np.asarray(center, dtype=float)
    X += rng.normal(0.0, noise * 2 * biggest, size=X.shape)
    return X, labels


THREE_ELLIPSES = (
    ((0.0, 0.0), (3.0, 1.0), 0.3),
    ((4.0, 4.0), (2.0, 1.2), -0.8),
    ((-3.0, 5.0), (1.5, 0.8), 1.2),
)
