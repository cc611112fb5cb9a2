from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, stats

from ctef.datasim import (
    THREE_ELLIPSES,
    SimSpec,
    concentric_circles,
    noisy_ellipses,
    random_ground_truth,
    rosenbrock_log_density,
    sample_model,
    sample_rosenbrock,
    sample_vmf,
    simulate,
)
from ctef.exceptions import ContractError


def vmf_marginal_cdf(tau, p):
    """CDF of t = <x, mu> with density proportional to exp(tau t) (1 - t^2)^((p-3)/2)."""
    dens = lambda t: np.exp(tau * (t - 1)) * (1 - t * t) ** ((p - 3) / 2)
    pts = [1 - 1e-3, 1 - 1e-6] if tau > 50 else None
    total = integrate.quad(dens, -1, 1, points=pts, limit=200)[0]
    grid = np.linspace(-1, 1, 4001)
    cum = np.concatenate([[0.0], np.cumsum([integrate.quad(dens, a, b)[0] for a, b in zip(grid[:-1], grid[1:])])])
    cum /= total
    return lambda t: np.interp(t, grid, cum)


@pytest.mark.parametrize("p,tau", [(3, 2.0), (4, 0.5), (5, 10.0), (10, 3.0)])
def test_vmf_marginal_ks(p, tau):
    rng = np.random.default_rng(2024 + p)
    mu = rng.normal(size=p)
    mu /= np.linalg.norm(mu)
    X = sample_vmf(mu, tau, 10_000, rng)
    assert stats.kstest(X @ mu, vmf_marginal_cdf(tau, p)).pvalue > 0.01


def test_vmf_unit_norm_and_uniform(rng):
    mu = np.array([0.0, 0.0, 1.0])
    X = sample_vmf(mu, 0.0, 10_000, rng)
    assert np.max(np.abs(np.linalg.norm(X, axis=1) - 1)) < 1e-12
    assert np.linalg.norm(X.mean(axis=0)) < 0.05


def test_vmf_concentrated(rng):
    mu = np.array([1.0, 2.0, 2.0]) / 3
    X = sample_vmf(mu, 200.0, 2000, rng)
    m = X.mean(axis=0)
    angle = np.degrees(np.arccos(m @ mu / np.linalg.norm(m)))
    assert angle < 5


def test_vmf_orthogonal_part_is_isotropic(rng):
    # the tangent component should have no preferred direction
    mu = np.array([0.0, 1.0, 0.0, 0.0])
    X = sample_vmf(mu, 4.0, 20_000, rng)
    tang = X[:, [0, 2, 3]]
    assert np.max(np.abs(tang.mean(axis=0))) < 0.02


def test_vmf_errors(rng):
    with pytest.raises(ContractError):
        sample_vmf([1.0, 1.0], 1.0, 5, rng)
    with pytest.raises(ContractError):
        sample_vmf([1.0, 0.0], -1.0, 5, rng)


def test_simspec_validation():
    with pytest.raises(ContractError):
        SimSpec(tau=-1)
    with pytest.raises(ContractError):
        SimSpec(ratio=0.5)
    with pytest.raises(ContractError):
        SimSpec(noise=-0.1)
    with pytest.raises(ContractError):
        SimSpec(center_scale="bogus")
    spec = SimSpec()
    assert (spec.p, spec.n, spec.tau, spec.noise, spec.ratio) == (3, 18, 0.0, 0.01, 2.0)


@pytest.mark.parametrize("p,ratio", [(2, 3.0), (3, 2.0), (5, 4.0), (10, 1.5)])
def test_ground_truth_invariants(p, ratio, rng):
    for _ in range(10):
        truth = random_ground_truth(SimSpec(p=p, ratio=ratio), rng)
        assert abs(np.linalg.det(truth.shape_matrix) - 1) < 1e-8
        L = truth.axis_lengths
        assert L.max() / L.min() == pytest.approx(ratio, rel=1e-8)
        np.testing.assert_allclose(truth.rotation.T @ truth.rotation, np.eye(p), atol=1e-12)
        assert abs(np.linalg.norm(truth.mu) - 1) < 1e-12
        assert truth.sigma == pytest.approx(0.01 * 2 * L.max())


def test_ground_truth_2d_and_sphere(rng):
    truth = random_ground_truth(SimSpec(p=2, ratio=3.0), rng)
    np.testing.assert_allclose(np.sort(truth.axis_lengths), [1 / np.sqrt(3), np.sqrt(3)])
    truth = random_ground_truth(SimSpec(p=4, ratio=1.0), rng)
    np.testing.assert_allclose(truth.axis_lengths, 1.0)


def test_center_variance(rng):
    centers = np.array([random_ground_truth(SimSpec(), rng).center for _ in range(4000)])
    # variance 10 per coordinate; sample variance sd ~ 10 * sqrt(2 / 12000)
    assert centers.var() == pytest.approx(10.0, abs=0.5)
    std_mode = np.array([random_ground_truth(SimSpec(center_scale="std"), rng).center for _ in range(4000)])
    assert std_mode.var() == pytest.approx(100.0, abs=5)


@pytest.mark.parametrize("tau", [0.0, 5.0])
def test_noiseless_points_on_surface(tau, rng):
    X, truth = simulate(SimSpec(p=4, n=100, tau=tau, noise=0.0), rng)
    assert np.max(np.abs(truth.ellipsoid.implicit(X) - 1)) < 1e-10


def test_simulate_is_seeded():
    a, ta = simulate(SimSpec(seed=7))
    b, tb = simulate(SimSpec(seed=7))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(ta.center, tb.center)
    c, _ = simulate(SimSpec(seed=8))
    assert not np.array_equal(a, c)


def test_noise_level(rng):
    truth = random_ground_truth(SimSpec(p=3, noise=0.05), rng)
    X0 = sample_model(truth, 5000, 0.0, np.random.default_rng(1))
    quiet = replace(truth, sigma=0.0)
    X1 = sample_model(quiet, 5000, 0.0, np.random.default_rng(1))
    # same eta draws, noise is the difference
    eps = X0 - X1
    assert eps.std() == pytest.approx(truth.sigma, rel=0.03)


def test_rosenbrock_density_and_chain(rng):
    assert rosenbrock_log_density(np.zeros(3)) == 0.0
    assert rosenbrock_log_density([1.0, 1.0, 1.0]) == -1.0
    X = sample_rosenbrock(2000, rng)
    assert X.shape == (2000, 3)
    assert np.all(np.isfinite(rosenbrock_log_density(X)))
    np.testing.assert_array_equal(X, sample_rosenbrock(2000, np.random.default_rng(12345)))


def test_rosenbrock_conditional_moments():
    # exactly, x2 - x1^2 ~ N(0, 1/60) and x3 - x2^2 ~ N(0, 1/2) given the past
    X = sample_rosenbrock(20_000, np.random.default_rng(3))
    r2 = X[:, 1] - X[:, 0] ** 2
    r3 = X[:, 2] - X[:, 1] ** 2
    assert abs(r2.mean()) < 0.01
    assert abs(r3.mean()) < 0.05
    assert r2.var() == pytest.approx(1 / 60, rel=0.15)
    assert r3.var() == pytest.approx(0.5, rel=0.15)


def test_concentric_circles(rng):
    X, labels = concentric_circles(100, rng=rng, noise=0.0)
    r = np.linalg.norm(X, axis=1)
    np.testing.assert_allclose(r, np.where(labels == 0, 1.0, 3.0))
    assert np.bincount(labels).tolist() == [50, 50]


def test_noisy_ellipses(rng):
    X, labels = noisy_ellipses(300, THREE_ELLIPSES, noise=0.0, rng=rng)
    assert np.bincount(labels).tolist() == [100, 100, 100]
    for j, (center, lengths, angle) in enumerate(THREE_ELLIPSES):
        ca, sa = np.cos(angle), np.sin(angle)
        local = (X[labels == j] - center) @ np.array([[ca, sa], [-sa, ca]]).T
        np.testing.assert_allclose((local[:, 0] / lengths[0]) ** 2 + (local[:, 1] / lengths[1]) ** 2, 1.0)
