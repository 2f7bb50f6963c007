"""Chebyshev-Gauss-Lobatto collocation on the annulus gap.

Provides the mapped collocation points, first/second differentiation
matrices and Clenshaw-Curtis quadrature weights (exact for polynomials up
to the grid's design order).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class RadialGrid:
    """Collocation grid on [r_i, r_o], points ascending.

    ``w`` are weights for integral f dr; ``quad_weights`` fold in the radial
    measure, i.e. sum(quad_weights * f) approximates integral f(r) r dr.
    """

    n_r: int
    points: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    w: np.ndarray
    quad_weights: np.ndarray


def _cheb(n):
    """Chebyshev differentiation matrix and points on [-1, 1] (Trefethen)."""
    if n == 0:
        return np.zeros((1, 1)), np.array([1.0])
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.hstack([2.0, np.ones(n - 1), 2.0]) * (-1.0) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D, x


def _clencurt(n):
    """Clenshaw-Curtis weights on [-1, 1] at the n+1 CGL points."""
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    ii = np.arange(1, n)
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n**2 - 1)
        for j in range(1, n // 2):
            v -= 2.0 * np.cos(2 * j * theta[ii]) / (4 * j * j - 1)
        v -= np.cos(n * theta[ii]) / (n**2 - 1)
    else:
        w[0] = w[n] = 1.0 / n**2
        for j in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * j * theta[ii]) / (4 * j * j - 1)
    w[ii] = 2.0 * v / n
    return w


def radial_grid(n_r, geom):
    """Build the mapped CGL grid with ``n_r`` points on [geom.r_i, geom.r_o]."""
    if n_r < 16:
        raise ConfigurationError(f"n_r >= 16 required for a usable grid, got {n_r}")
    n = n_r - 1
    D, x = _cheb(n)
    half = 0.5 * (geom.r_o - geom.r_i)
    mid = 0.5 * (geom.r_o + geom.r_i)
    # x descends 1 -> -1; choose r = mid - half*x so points ascend from r_i
    r = mid - half * x
    d1 = -D / half
    d2 = d1 @ d1
    w = _clencurt(n) * half
    return RadialGrid(n_r=n_r, points=r, d1=d1, d2=d2, w=w, quad_weights=w * r)
