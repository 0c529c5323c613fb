import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from totcurv import (AmbientSpace, catalog_surface, curvature_profile, gauss_form_pullback,
                     mesh_from_parametric, sigma_r, total_mean_curvature)
from totcurv.curvature import CurvatureProfile

from conftest import rel
from oracles import FROZEN


def test_sigma_r_small_cases():
    assert sigma_r([2.0, 3.0], 0) == 1.0
    assert sigma_r([2.0, 3.0], 1) == 5.0
    assert sigma_r([2.0, 3.0], 2) == 6.0
    assert sigma_r([2.0, 3.0], 3) == 0.0
    assert sigma_r([2.0, 3.0], -1) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=5), st.integers(0, 5))
def test_sigma_r_matches_subset_sums(k, r):
    expected = sum(math.prod(c) for c in itertools.combinations(k, r)) if r <= len(k) else 0.0
    assert sigma_r(k, r) == pytest.approx(expected, abs=1e-9)


def test_euclidean_sphere_profile(E3):
    p = curvature_profile(catalog_surface("sphere", E3))
    assert np.allclose(p.values, [4 * np.pi, 8 * np.pi, 4 * np.pi], rtol=1e-12)


def test_hyperbolic_sphere_profile(H3):
    p = curvature_profile(catalog_surface("sphere", H3))
    assert np.allclose(p.values, FROZEN["h3_sphere_R1"], rtol=1e-10)


def test_hyperbolic_circle_profile(H2):
    p = curvature_profile(catalog_surface("circle", H2))
    assert np.allclose(p.values, FROZEN["h2_circle_R1"], rtol=1e-10)


def test_ellipsoid_profile_matches_implicit_formulas(E3):
    p = curvature_profile(catalog_surface("ellipsoid", E3, axes=(2, 1, 1)))
    assert np.allclose(p.values, FROZEN["ellipsoid_211"], rtol=1e-10)
    assert all(p.converged)


def test_planar_ellipse_turning_number(E2):
    tc = total_mean_curvature(catalog_surface("ellipse", E2, axes=(3.0, 0.5)), 1)
    assert float(tc) == pytest.approx(2 * np.pi, rel=1e-10)


def test_out_of_range_r_is_zero(E3):
    s = catalog_surface("sphere", E3)
    assert float(total_mean_curvature(s, 3)) == 0.0
    assert float(total_mean_curvature(s, -1)) == 0.0


@pytest.mark.parametrize("name,space", [
    ("sphere", AmbientSpace.euclidean(3)), ("ellipsoid", AmbientSpace.euclidean(3)),
    ("sphere", AmbientSpace.hyperbolic(3, 1.0)), ("ellipsoid", AmbientSpace.hyperbolic(3, 0.5)),
    ("circle", AmbientSpace.hyperbolic(2, 1.0)), ("ellipse", AmbientSpace.euclidean(2)),
])
def test_gauss_form_equals_top_curvature(name, space):
    s = catalog_surface(name, space)
    form = gauss_form_pullback(s)
    top = float(total_mean_curvature(s, space.dim - 1))
    assert rel(form.value, top) < 1e-8
    assert form.coverage > 0.99


def test_orientation_parity(H3):
    s = catalog_surface("ellipsoid", H3, axes=(1.0, 0.7, 0.5))
    a = curvature_profile(s).values
    b = curvature_profile(s.flipped()).values
    for r in range(3):
        assert b[r] == pytest.approx((-1) ** r * a[r], rel=1e-12)


def test_mesh_gauss_form_is_degree(E3):
    m = mesh_from_parametric(catalog_surface("ellipsoid", E3, axes=(2, 1, 1)), 12)
    assert gauss_form_pullback(m).value == pytest.approx(4 * np.pi, rel=1e-10)


def test_mesh_profile_converges(E3):
    s = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    exact = FROZEN["ellipsoid_211"]
    errs = [[rel(v, e) for v, e in zip(curvature_profile(mesh_from_parametric(s, k)).values, exact)]
            for k in (8, 16, 32)]
    for r in range(3):
        assert errs[0][r] > errs[1][r] > errs[2][r]
    assert max(errs[2]) < 2e-2


def test_profile_csv_columns(E3):
    p = curvature_profile(catalog_surface("sphere", E3), order=12)
    lines = p.to_csv().splitlines()
    assert lines[0] == ",".join(CurvatureProfile.CSV_COLUMNS)
    assert len(lines) == 4
    assert lines[1].split(",")[-1] == "12"
