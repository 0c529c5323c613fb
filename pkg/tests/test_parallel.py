import math

import numpy as np
import pytest

from totcurv import (catalog_surface, comparison_bound_check, curvature_profile,
                     limit_total_curvature, parallel_curvatures, parallel_surface, parallel_sweep,
                     perturb, region_volume, tube_integral)
from totcurv.errors import FlowSingularityError
from totcurv.parallel import ParallelSweep
from totcurv.surfaces import shape_at

from oracles import FROZEN


def test_parallel_curvature_closed_forms(E3, H3):
    assert parallel_curvatures(1.0, 1.0, E3) == pytest.approx(0.5)
    assert parallel_curvatures(0.3, 0.0, H3) == pytest.approx(0.3)
    assert parallel_curvatures(1 / math.tanh(1), 0.5, H3) == pytest.approx(
        FROZEN["riccati_coth1_t0p5"], rel=1e-10)


def test_parallel_curvature_singular(E3):
    with pytest.raises(FlowSingularityError):
        parallel_curvatures(-2.0, 0.6, E3)


def test_parallel_sphere_is_sphere(E3, H3):
    p = curvature_profile(parallel_surface(catalog_surface("sphere", E3), 0.5))
    assert np.allclose(p.values, [4 * np.pi * 2.25, 8 * np.pi * 1.5, 4 * np.pi], rtol=1e-12)
    a = curvature_profile(parallel_surface(catalog_surface("sphere", H3), 0.5)).values[0]
    assert a == pytest.approx(4 * np.pi * np.sinh(1.5) ** 2, rel=1e-12)


def test_zero_flow_is_identity(E3):
    s = catalog_surface("sphere", E3)
    assert parallel_surface(s, 0.0) is s


def test_flow_singularity_on_nonconvex(E3):
    s = perturb(catalog_surface("sphere", E3), -0.4, mode={"count": 1, "width": 0.3}, seed=2)
    with pytest.raises(FlowSingularityError):
        parallel_surface(s, 5.0)
    with pytest.raises(FlowSingularityError):
        parallel_surface(s, -0.1)


@pytest.mark.parametrize("space_name", ["E3", "H3"])
def test_transport_matches_flowed_shape(space_name, request):
    space = request.getfixturevalue(space_name)
    s = catalog_surface("ellipsoid", space, axes=(1.2, 0.9, 0.6))
    t = 0.25
    for u in ([0.4, 1.0], [2.0, 4.0], [1.3, 0.1]):
        _, k0 = shape_at(s, 0, u)
        _, kt = shape_at(parallel_surface(s, t), 0, u)
        assert np.allclose(np.sort(kt), np.sort(parallel_curvatures(k0, t, space)), atol=1e-6)


def test_steiner_polynomial(E3):
    s = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    m0, m1, m2 = curvature_profile(s).values
    for t in (0.05, 0.1, 0.2):
        area = curvature_profile(parallel_surface(s, t)).values[0]
        assert area == pytest.approx(m0 + t * m1 + t * t * m2, rel=1e-12)


def test_tube_integral_sphere_shell(E3):
    s = catalog_surface("sphere", E3)
    assert float(tube_integral(s, 0.5, 0)) == pytest.approx(4 * math.pi / 3 * (1.5 ** 3 - 1),
                                                            rel=1e-12)
    assert float(tube_integral(s, 0.0, 0)) == 0.0


def test_tube_integral_steiner_volume(E3):
    s = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    m0, m1, m2 = curvature_profile(s).values
    e = 0.2
    assert float(tube_integral(s, e, 0)) == pytest.approx(e * m0 + e * e * m1 / 2 + e ** 3 * m2 / 3,
                                                          rel=1e-12)


@pytest.mark.parametrize("space_name", ["E3", "H3", "H2"])
def test_coarea_consistency(space_name, request):
    space = request.getfixturevalue(space_name)
    name = "ellipse" if space.dim == 2 else "ellipsoid"
    s = catalog_surface(name, space, axes=(1.0, 0.7, 0.5)[:space.dim])
    e = 0.15
    assert float(tube_integral(s, e, 0)) == pytest.approx(
        float(region_volume(s, parallel_surface(s, e))), rel=5e-3)


def test_limit_on_smooth_sphere(E3):
    lim = limit_total_curvature(catalog_surface("sphere", E3), 1)
    assert lim.value == pytest.approx(8 * math.pi, rel=1e-12)
    assert lim.monotone
    assert np.all(np.diff(lim.table) <= 0)


def test_limit_requires_decreasing_grid(E3):
    with pytest.raises(ValueError):
        limit_total_curvature(catalog_surface("sphere", E3), 0, epsilons=[0.1, 0.2])


def test_comparison_equality_case(E3):
    b = comparison_bound_check(catalog_surface("sphere", E3), 0.1, 1)
    assert b.lhs == pytest.approx(0.8 * math.pi, rel=1e-12)
    assert b.rhs == pytest.approx(0.8 * math.pi, rel=1e-12)
    assert b.passed


def test_comparison_zero_eps(E3):
    b = comparison_bound_check(catalog_surface("sphere", E3), 0.0, 1)
    assert b.lhs == 0.0 and b.rhs == 0.0 and b.passed


def test_comparison_hyperbolic_circle(H2):
    b = comparison_bound_check(catalog_surface("circle", H2), 0.1, 1)
    assert b.lhs == pytest.approx(2 * math.pi * (math.cosh(1.1) - math.cosh(1.0)), rel=1e-12)
    assert b.rhs == pytest.approx(2 * math.pi * math.sinh(1.1) * 0.1, rel=1e-12)
    assert b.passed


def test_first_variation_bound_on_hyperbolic_sphere(H3):
    # the bound built from d/dt M_1 = 2 M_2 + 2c M_0 holds; see README for r = 1
    b = comparison_bound_check(catalog_surface("sphere", H3), 0.1, 1)
    assert b.passed_derivative


def test_sweep_monotone_and_csv(H2):
    s = catalog_surface("ellipse", H2, axes=(1.0, 0.6))
    sw = parallel_sweep(s, [0.0, 0.1, 0.2], reach=True, tubes=True)
    assert all(sw.monotone(r) for r in range(2))
    lines = sw.to_csv().splitlines()
    assert lines[0] == ",".join(ParallelSweep.CSV_COLUMNS)
    assert len(lines) == 1 + 3 * 2
    assert all(c >= 0.95 * e for c, e in zip(sw.reach[1:], sw.epsilons[1:]))


def test_sweep_rejects_unsorted_grid(E3):
    with pytest.raises(ValueError):
        ParallelSweep("x", np.array([0.2, 0.1]), [[1.0], [2.0]], [0, 0])
