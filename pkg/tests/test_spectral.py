import numpy as np
import pytest
from hypothesis import given, strategies as st

from fourier_penalty.spectral import (
    Grid,
    divergence,
    interpolate,
    interpolation_matrix,
    project_divergence_free,
    spectral_derivative,
    wavenumbers,
)


def test_wavenumbers_small_cases():
    np.testing.assert_allclose(wavenumbers(4, 2 * np.pi), [0, 1, 2, -1])
    np.testing.assert_allclose(wavenumbers(2, 2 * np.pi), [0, 1])
    q = np.pi / 8
    np.testing.assert_allclose(wavenumbers(8, 16.0), [0, q, 2 * q, 3 * q, 4 * q, -3 * q, -2 * q, -q])


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(2, 7, 1.0)
    with pytest.raises(ValueError):
        Grid(4, 8, 1.0)
    with pytest.raises(ValueError):
        Grid(1, 8, -1.0)


def test_derivative_of_sine_is_exact():
    g = Grid(1, 16, 2 * np.pi)
    x = g.axis()
    np.testing.assert_allclose(spectral_derivative(np.sin(x), g), np.cos(x), atol=1e-12)
    np.testing.assert_allclose(spectral_derivative(np.sin(x), g, order=2), -np.sin(x), atol=1e-12)


def test_derivative_of_constant_is_zero():
    g = Grid(2, 8, 3.0)
    f = np.full(g.shape, 2.5)
    for order in (1, 2):
        assert np.max(np.abs(spectral_derivative(f, g, axis=1, order=order))) < 1e-13


def test_filter_factor_single_mode():
    g = Grid(1, 16, 2 * np.pi)
    x = g.axis()
    d = spectral_derivative(np.sin(x), g, c_f=16.0)
    np.testing.assert_allclose(d, np.exp(-16.0 / 256.0) * np.cos(x), atol=1e-12)


def test_filter_strength_independent_of_box_size():
    # the same mode index is damped by the same factor in any box
    for D in (2 * np.pi, 16.0):
        g = Grid(1, 32, D)
        x = g.axis()
        k = 2 * np.pi * 3 / D
        d = spectral_derivative(np.sin(k * x), g, c_f=16.0)
        np.testing.assert_allclose(d, np.exp(-16.0 * 9 / 32**2) * k * np.cos(k * x), atol=1e-12)


def test_second_derivative_equals_repeated_first():
    g = Grid(1, 32, 5.0)
    f = np.random.default_rng(0).standard_normal(32)
    d1 = spectral_derivative(spectral_derivative(f, g), g)
    np.testing.assert_allclose(spectral_derivative(f, g, order=2), d1, atol=1e-10)


@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6), st.integers(1, 7))
def test_derivative_exact_for_trig_polynomials(coef, kmax):
    g = Grid(1, 16, 2 * np.pi)
    x = g.axis()
    a = np.asarray(coef[:3])
    b = np.asarray(coef[3:])
    ks = np.array([1, 2, kmax])
    f = sum(a[i] * np.sin(ks[i] * x) + b[i] * np.cos(ks[i] * x) for i in range(3))
    df = sum(ks[i] * (a[i] * np.cos(ks[i] * x) - b[i] * np.sin(ks[i] * x)) for i in range(3))
    np.testing.assert_allclose(spectral_derivative(f, g), df, atol=1e-11)


def test_batched_derivative_matches_single():
    g = Grid(2, 8, 2 * np.pi)
    X, Y = g.mesh()
    F = np.stack([np.sin(X) * np.cos(Y), np.cos(2 * Y)])
    d = spectral_derivative(F, g, axis=1)
    np.testing.assert_allclose(d[0], spectral_derivative(F[0], g, axis=1), atol=1e-14)


def test_projection_keeps_divergence_free_field():
    g = Grid(2, 16, 2 * np.pi)
    X, Y = g.mesh()
    E = np.stack([np.cos(Y), np.sin(X)])
    np.testing.assert_allclose(project_divergence_free(E, np.zeros(g.shape), g), E, atol=1e-13)


def test_projection_removes_gradient():
    g = Grid(2, 16, 2 * np.pi)
    X, Y = g.mesh()
    E = np.stack([np.cos(X) * np.sin(Y), np.sin(X) * np.cos(Y)])
    assert np.max(np.abs(project_divergence_free(E, np.zeros(g.shape), g))) < 1e-13


@given(st.integers(0, 10_000))
def test_projection_is_idempotent(seed):
    g = Grid(2, 8, 2 * np.pi)
    rng = np.random.default_rng(seed)
    E = rng.standard_normal((2,) + g.shape)
    P1 = project_divergence_free(E, np.zeros(g.shape), g)
    P2 = project_divergence_free(P1, np.zeros(g.shape), g)
    np.testing.assert_allclose(P2, P1, atol=1e-12)
    assert np.max(np.abs(divergence(P1, g))) < 1e-10


def test_projection_3d_divergence_free():
    g = Grid(3, 8, 2 * np.pi)
    E = np.random.default_rng(3).standard_normal((3,) + g.shape)
    P = project_divergence_free(E, np.zeros(g.shape), g)
    assert np.max(np.abs(divergence(P, g))) < 1e-10


def test_interpolation_reproduces_cubics():
    g = Grid(2, 16, 4.0)
    X, Y = g.mesh()
    f = 1 + X - 2 * Y + X * Y + 0.3 * X**3 - Y**2 * X
    pts = np.array([[1.13, 1.71], [2.02, 1.5], [1.5, 2.9]])
    exact = 1 + pts[:, 0] - 2 * pts[:, 1] + pts[:, 0] * pts[:, 1] + 0.3 * pts[:, 0] ** 3 - pts[:, 1] ** 2 * pts[:, 0]
    np.testing.assert_allclose(interpolate(f, g, pts), exact, atol=1e-12)


def test_interpolation_at_node_returns_value():
    g = Grid(3, 8, 1.0, origin=(-0.5, 0.0, 0.25))
    f = np.random.default_rng(1).standard_normal(g.shape)
    pt = np.array([[g.axis(0)[3], g.axis(1)[5], g.axis(2)[0]]])
    np.testing.assert_allclose(interpolate(f, g, pt), [f[3, 5, 0]], atol=1e-14)


def test_interpolation_matrix_rows_sum_to_one():
    g = Grid(2, 8, 1.0)
    pts = np.random.default_rng(2).uniform(0, 1, (20, 2))
    M = interpolation_matrix(g, pts)
    np.testing.assert_allclose(np.asarray(M.sum(axis=1)).ravel(), 1.0, atol=1e-13)
    assert M.shape == (20, 64)


def test_wavenumbers_antisymmetric_across_nyquist():
    k = wavenumbers(16, 3.0)
    for l in range(1, 8):
        assert k[l] == -k[16 - l]


@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 1000))
def test_derivative_is_linear(a, b, seed):
    g = Grid(1, 32, 2.0)
    f, h = np.random.default_rng(seed).standard_normal((2, 32))
    np.testing.assert_allclose(
        spectral_derivative(a * f + b * h, g), a * spectral_derivative(f, g) + b * spectral_derivative(h, g), atol=1e-10
    )


def test_interpolation_is_fourth_order():
    errs = []
    for N in (32, 64, 128):
        g = Grid(1, N, 2 * np.pi)
        errs.append(abs(interpolate(np.sin(g.axis()), g, np.array([[0.123]]))[0] - np.sin(0.123)))
    assert np.log2(errs[0] / errs[1]) == pytest.approx(4, abs=0.5)
    assert np.log2(errs[1] / errs[2]) == pytest.approx(4, abs=0.5)


def test_masked_projection_matches_dense_matrix():
    g = Grid(2, 8, 2 * np.pi)
    X, Y = g.mesh()
    chi = ((X - np.pi) ** 2 + (Y - np.pi) ** 2 < 2.0).astype(float)
    n = 2 * g.size
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        cols.append(project_divergence_free(e.reshape((2,) + g.shape), chi, g).ravel())
    P = np.array(cols).T
    E = np.random.default_rng(5).standard_normal((2,) + g.shape)
    np.testing.assert_allclose(P @ E.ravel(), project_divergence_free(E, chi, g).ravel(), atol=1e-12)
    before = np.max(np.abs(divergence(E, g) * (1 - chi)))
    after = np.max(np.abs(divergence(project_divergence_free(E, chi, g), g) * (1 - chi)))
    assert after < before
