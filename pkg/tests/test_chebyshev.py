import numpy as np
import pytest

from circsynth.chebyshev import cheb_diff_matrix, clenshaw_curtis_weights


def lagrange_diff_oracle(nodes):
    """Differentiation matrix from explicit Lagrange cardinal polynomials."""
    n = len(nodes)
    D = np.zeros((n, n))
    for k in range(n):
        others = np.delete(nodes, k)
        coeffs = np.poly(others) / np.prod(nodes[k] - others)
        dcoeffs = np.polyder(coeffs)
        D[:, k] = np.polyval(dcoeffs, nodes)
    return D


def test_three_point_nodes_and_middle_row():
    dm = cheb_diff_matrix(2, -1.0, 1.0)
    assert np.allclose(dm.nodes, [-1.0, 0.0, 1.0], atol=1e-15)
    assert np.allclose(dm.D1[1], [-0.5, 0.0, 0.5], atol=1e-14)


@pytest.mark.parametrize("n", [2, 4, 7, 10])
def test_matches_lagrange_oracle(n):
    dm = cheb_diff_matrix(n, -1.0, 1.0)
    D_ref = lagrange_diff_oracle(dm.nodes)
    assert np.allclose(dm.D1, D_ref, atol=1e-10)


def test_constant_derivative_vanishes():
    dm = cheb_diff_matrix(6, 0.0, 2.0)
    assert np.allclose(dm.D1 @ np.ones(7), 0.0, atol=1e-11)
    assert np.allclose(dm.D2 @ np.ones(7), 0.0, atol=1e-8)


def test_second_derivative_of_square():
    dm = cheb_diff_matrix(8, 0.0, 1.0)
    vals = dm.nodes**2
    assert np.allclose(dm.D2 @ vals, 2.0 * np.ones(9), atol=1e-10)


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_polynomial_exactness(n):
    """D1 and D2 are exact on x^k for k <= order."""
    a, b = 0.3, 1.9
    dm = cheb_diff_matrix(n, a, b)
    x = dm.nodes
    scale = max(1.0, n**2 / (b - a))
    for k in range(n + 1):
        d1 = dm.D1 @ x**k
        want1 = k * x ** (k - 1) if k >= 1 else np.zeros_like(x)
        assert np.max(np.abs(d1 - want1)) < 1e-10 * scale
        d2 = dm.D2 @ x**k
        want2 = k * (k - 1) * x ** (k - 2) if k >= 2 else np.zeros_like(x)
        assert np.max(np.abs(d2 - want2)) < 1e-10 * scale**2


def test_row_sums_vanish():
    dm = cheb_diff_matrix(9, -2.0, 3.0)
    assert np.max(np.abs(dm.D1.sum(axis=1))) < 1e-10
    assert np.max(np.abs(dm.D2.sum(axis=1))) < 1e-7


def test_invalid_order_and_interval():
    with pytest.raises(ValueError):
        cheb_diff_matrix(1)
    with pytest.raises(ValueError):
        cheb_diff_matrix(4, 2.0, 1.0)


@pytest.mark.parametrize("n", [2, 4, 9])
def test_clenshaw_curtis_integrates_polynomials(n):
    a, b = -0.5, 2.0
    w = clenshaw_curtis_weights(n, a, b)
    dm = cheb_diff_matrix(max(n, 2), a, b)
    for k in range(n + 1):
        exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
        assert w @ dm.nodes**k == pytest.approx(exact, rel=1e-12, abs=1e-13)
