"""Quadrature rules on the parameter domains used by charts.

Every rule returns ``(u, w)`` with ``u`` of shape (N, m) and weights of
shape (N,) in parameter measure.
"""

import math

import numpy as np


def gauss_legendre(n, a=0.0, b=1.0):
    x, w = np.polynomial.legendre.leggauss(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def periodic(n, period=2 * math.pi):
    """Trapezoid rule on a full period (spectrally accurate for periodic data)."""
    n = int(n)
    u = np.arange(n) * (period / n)
    return u, np.full(n, period / n)


def rectangle(nu, nv, bounds):
    (a0, b0), (a1, b1) = bounds
    x, wx = gauss_legendre(nu, a0, b0)
    y, wy = gauss_legendre(nv, a1, b1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], axis=1), np.outer(wx, wy).ravel()


def polar(n):
    """Gauss-Legendre in theta on [0, pi] times trapezoid in phi."""
    t, wt = gauss_legendre(n, 0.0, math.pi)
    p, wp = periodic(2 * n)
    T, P = np.meshgrid(t, p, indexing="ij")
    return np.stack([T.ravel(), P.ravel()], axis=1), np.outer(wt, wp).ravel()


# Symmetric low-order triangle rules on the reference simplex
# {u1, u2 >= 0, u1 + u2 <= 1} (area 1/2).
_TRIANGLE_CENTROID = (np.array([[1 / 3, 1 / 3]]), np.array([0.5]))
_TRIANGLE_3PT = (
    np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]]),
    np.full(3, 1 / 6),
)


def triangle(order):
    """Triangle rule: centroid (order 1), 3-point (order 2), else a collapsed
    tensor Gauss-Legendre rule with ``order`` points per direction."""
    order = int(order)
    if order <= 1:
        return _TRIANGLE_CENTROID
    if order == 2:
        return _TRIANGLE_3PT
    x, wx = gauss_legendre(order)
    y, wy = gauss_legendre(order)
    X, Y = np.meshgrid(x, y, indexing="ij")
    u1 = X
    u2 = Y * (1.0 - X)
    w = np.outer(wx, wy) * (1.0 - X)
    return np.stack([u1.ravel(), u2.ravel()], axis=1), w.ravel()


def segment(order):
    order = max(int(order), 1)
    x, w = gauss_legendre(order)
    return x[:, None], w


def interval(order, a, b):
    x, w = gauss_legendre(max(int(order), 1), a, b)
    return x[:, None], w
