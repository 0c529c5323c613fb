import math

import numpy as np
import pytest

from totcurv import quadrature as quad


def test_gauss_legendre_exact_for_polynomials():
    x, w = quad.gauss_legendre(5, 0.0, 2.0)
    assert np.sum(w * x ** 9) == pytest.approx(2.0 ** 10 / 10)


def test_triangle_rules_integrate_monomials():
    for order in (1, 2, 6):
        u, w = quad.triangle(order)
        assert np.sum(w) == pytest.approx(0.5)
    u, w = quad.triangle(8)
    # int_T x^2 y = 2! 1! / 5! = 1/60
    assert np.sum(w * u[:, 0] ** 2 * u[:, 1]) == pytest.approx(1 / 60)


def test_polar_rule_sphere_area():
    u, w = quad.polar(12)
    assert np.sum(w * np.sin(u[:, 0])) == pytest.approx(4 * math.pi)


def test_periodic_rule_trigonometric_exactness():
    u, w = quad.periodic(16)
    assert np.sum(w * np.cos(3 * u) ** 2) == pytest.approx(math.pi)
