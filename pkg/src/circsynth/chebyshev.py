"""Chebyshev-Gauss-Lobatto collocation operators on an interval.

Differentiation matrices follow the standard barycentric construction with
the negative-sum trick on the diagonal, then get mapped from [-1, 1] to the
physical interval.  Nodes are returned in ascending order.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiffMatrix:
    """Collocation nodes with first/second differentiation matrices.

    ``order`` is the polynomial order n; there are n + 1 nodes.  D1 and D2
    are exact (to roundoff) on polynomials up to degree n.
    """

    order: int
    nodes: np.ndarray
    D1: np.ndarray
    D2: np.ndarray

    @property
    def npts(self) -> int:
        return self.order + 1


def cheb_diff_matrix(n: int, a: float = -1.0, b: float = 1.0) -> DiffMatrix:
    """Chebyshev-Gauss-Lobatto differentiation matrices on [a, b].

    Parameters
    ----------
    n : polynomial order, n >= 2 (n + 1 collocation points).
    a, b : interval endpoints, b > a.
    """
    if n < 2:
        raise ValueError(f"collocation order must be >= 2, got {n}")
    return _diff_any_order(n, a, b)


def _diff_any_order(n: int, a: float, b: float) -> DiffMatrix:
    """Same construction without the order restriction (n >= 1).

    A two-point separator grid is legitimate internally: both of its nodes
    carry interface rows, so only the (order-1) first derivative is used.
    """
    if n < 1:
        raise ValueError(f"need order >= 1, got {n}")
    if not b > a:
        raise ValueError(f"interval must satisfy b > a, got [{a}, {b}]")

    k = np.arange(n + 1)
    x = np.cos(np.pi * k / n)  # descending on [-1, 1]
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1.0) ** k
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))

    # ascending node order: conjugate by the reversal permutation
    rev = slice(None, None, -1)
    x = x[rev]
    D = D[rev, :][:, rev]

    scale = 2.0 / (b - a)
    nodes = a + (b - a) * (x + 1.0) / 2.0
    D1 = D * scale
    D2 = (D @ D) * scale**2
    return DiffMatrix(order=n, nodes=nodes, D1=D1, D2=D2)


def clenshaw_curtis_weights(n: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Quadrature weights matching the CGL nodes of :func:`cheb_diff_matrix`.

    Exact for polynomials up to degree n; used for conserved-quantity
    integrals along the cell.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n**2 - 1)
        for kk in range(1, n // 2):
            v -= 2.0 * np.cos(2.0 * kk * theta[1:n]) / (4.0 * kk**2 - 1)
        v -= np.cos(n * theta[1:n]) / (n**2 - 1)
    else:
        w[0] = w[n] = 1.0 / n**2
        for kk in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2.0 * kk * theta[1:n]) / (4.0 * kk**2 - 1)
    w[1:n] = 2.0 * v / n
    # weights are symmetric, so node ordering does not matter
    return w[::-1] * (b - a) / 2.0
