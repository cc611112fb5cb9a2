import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ctef.exceptions import ContractError, DimensionError
from ctef.geometry import (
    Ellipsoid,
    EllipsoidParams,
    cayley,
    n_skew,
    random_rotation,
    rotation_from_coords,
    sample_surface,
    skew_coords,
    skew_embed,
    to_quadratic_form,
)


def coords(p):
    return arrays(np.float64, n_skew(p), elements=st.floats(-5, 5))


def test_skew_embed_row_major_p3():
    S = skew_embed([1.0, 2.0, 3.0], 3)
    np.testing.assert_array_equal(S, [[0, 1, 2], [-1, 0, 3], [-2, -3, 0]])


def test_skew_embed_small_cases():
    assert skew_embed([], 1).shape == (1, 1)
    assert skew_embed([], 1)[0, 0] == 0
    np.testing.assert_array_equal(skew_embed([0.5], 2), [[0, 0.5], [-0.5, 0]])


def test_skew_embed_wrong_length():
    with pytest.raises(DimensionError):
        skew_embed([1.0, 2.0], 3)


@pytest.mark.parametrize("p", [2, 4, 7])
def test_skew_coords_round_trip(p, rng):
    s = rng.normal(size=n_skew(p))
    np.testing.assert_array_equal(skew_coords(skew_embed(s, p)), s)


def test_cayley_zero_is_identity():
    np.testing.assert_array_equal(cayley(np.zeros((3, 3))), np.eye(3))


@pytest.mark.parametrize("s", [1.0, 0.5, -2.0, 3.7])
def test_cayley_2d_closed_form(s):
    # (I+S)^{-1}(I-S) for S = [[0,s],[-s,0]], inverted by hand
    expected = np.array([[1 - s**2, -2 * s], [2 * s, 1 - s**2]]) / (1 + s**2)
    np.testing.assert_allclose(rotation_from_coords([s], 2), expected, atol=1e-15)


def test_cayley_quarter_turn():
    np.testing.assert_allclose(rotation_from_coords([1.0], 2), [[0, -1], [1, 0]], atol=1e-15)
    np.testing.assert_allclose(rotation_from_coords([0.5], 2), [[0.6, -0.8], [0.8, 0.6]], atol=1e-15)


@pytest.mark.parametrize("p", [2, 3, 5, 8])
def test_cayley_properties(p):
    @settings(max_examples=50, deadline=None)
    @given(coords(p))
    def check(s):
        S = skew_embed(s, p)
        R = cayley(S)
        assert np.max(np.abs(R.T @ R - np.eye(p))) < 1e-10
        assert abs(np.linalg.det(R) - 1) < 1e-10
        np.testing.assert_allclose(cayley(-S), R.T, atol=1e-12)
        # -1 is never an eigenvalue
        assert np.min(np.abs(np.linalg.eigvals(R) + 1)) > 1e-12

    check()


@pytest.mark.parametrize("p", [1, 2, 3, 6])
def test_random_rotation_in_so_p(p, rng):
    for _ in range(20):
        R = random_rotation(p, rng)
        np.testing.assert_allclose(R.T @ R, np.eye(p), atol=1e-12)
        assert abs(np.linalg.det(R) - 1) < 1e-12


def test_random_rotation_p1():
    np.testing.assert_array_equal(random_rotation(1, np.random.default_rng(0)), [[1.0]])


def test_random_rotation_first_column_mean(rng):
    # Haar: each entry of the first column has mean 0 and variance 1/p
    p, n = 3, 10_000
    cols = np.array([random_rotation(p, rng)[:, 0] for _ in range(n)])
    sigma = np.sqrt(1 / p / n)
    assert np.all(np.abs(cols.mean(axis=0)) < 3 * sigma)


def test_params_validation():
    with pytest.raises(ContractError):
        EllipsoidParams([1.0, -1.0], [0, 0], [0])
    with pytest.raises(DimensionError):
        EllipsoidParams([1.0, 1.0], [0, 0], [0, 0])
    with pytest.raises(DimensionError):
        EllipsoidParams.from_vector(np.ones(6), 2)


def test_params_vector_round_trip(rng):
    theta = np.concatenate([rng.uniform(0.5, 2, 3), rng.normal(size=3), rng.normal(size=3)])
    params = EllipsoidParams.from_vector(theta, 3)
    np.testing.assert_array_equal(params.to_vector(), theta)


def test_quadratic_form_simple_cases():
    q = to_quadratic_form(EllipsoidParams(np.ones(3), np.zeros(3), np.zeros(3)))
    np.testing.assert_array_equal(q.M, np.eye(3))
    q = to_quadratic_form(EllipsoidParams([2.0, 1.0], [1.0, 0.0], [0.0]))
    np.testing.assert_allclose(q.M, np.diag([4.0, 1.0]))
    np.testing.assert_array_equal(q.c, [1.0, 0.0])


@pytest.mark.parametrize("p", [2, 3, 6])
def test_quadratic_form_eigenvalues(p, rng):
    for _ in range(20):
        params = EllipsoidParams(rng.uniform(0.2, 3, p), rng.normal(size=p), rng.uniform(-5, 5, n_skew(p)))
        q = to_quadratic_form(params)
        np.testing.assert_allclose(q.M, q.M.T, atol=1e-12)
        np.testing.assert_allclose(np.linalg.eigvalsh(q.M), np.sort(params.a**2), rtol=1e-8)
        q2 = to_quadratic_form(params.to_ellipsoid())
        np.testing.assert_allclose(q2.M, q.M, rtol=1e-12, atol=1e-14)


def test_ellipsoid_validation():
    with pytest.raises(ContractError):
        Ellipsoid([0, 0], np.eye(2), [1.0, 0.0])
    with pytest.raises(ContractError):
        Ellipsoid([0, 0], np.eye(2), [1.0, np.inf])
    with pytest.raises(DimensionError):
        Ellipsoid([0, 0], np.eye(3), [1.0, 1.0])


def test_sample_surface_examples():
    e = Ellipsoid(np.zeros(3), np.eye(3), np.ones(3))
    np.testing.assert_allclose(sample_surface(e, [1.0, 0, 0]), [1, 0, 0])
    e = Ellipsoid([3.0, 0.0], np.eye(2), [2.0, 1.0])
    np.testing.assert_allclose(sample_surface(e, [1.0, 0.0]), [5, 0])


def test_sample_surface_rejects_non_unit():
    e = Ellipsoid(np.zeros(2), np.eye(2), np.ones(2))
    with pytest.raises(ContractError):
        sample_surface(e, [1.0, 1.0])


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sample_surface_on_ellipsoid(p, rng):
    e = Ellipsoid(rng.normal(size=p), random_rotation(p, rng), rng.uniform(0.3, 4, p))
    eta = rng.normal(size=(100, p))
    eta /= np.linalg.norm(eta, axis=1, keepdims=True)
    X = sample_surface(e, eta)
    assert np.max(np.abs(e.implicit(X) - 1)) < 1e-10
    # shape matrix form agrees with the surface map
    np.testing.assert_allclose(X, eta @ e.shape_matrix.T + e.center, atol=1e-12)
