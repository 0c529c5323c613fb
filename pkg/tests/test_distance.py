import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from totcurv import (AmbientSpace, catalog_surface, estimate_reach, hausdorff_distance,
                     mesh_from_parametric, parallel_surface, perturb, region_volume,
                     signed_distance)
from totcurv.distance import ReachCertificate, ball_volume, enclosed_volume, sample_surface
from totcurv.errors import AmbiguityWarning, ConfigError, GeometryError

from oracles import FROZEN


def test_signed_distance_sphere(E3):
    s = catalog_surface("sphere", E3)
    assert signed_distance(s, [1.5, 0, 0]) == pytest.approx(0.5, abs=1e-12)
    assert signed_distance(s, [0.0, 0.0, 0.3]) == pytest.approx(-0.7, abs=1e-12)
    assert signed_distance(s, [0.6, 0.8, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_signed_distance_hyperbolic_center(H3):
    s = catalog_surface("sphere", H3)
    assert signed_distance(s, H3.origin()) == pytest.approx(-1.0, abs=1e-12)


def test_signed_distance_flipped_changes_sign(E3):
    s = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    p = np.array([0.5, 1.4, 0.2])
    assert signed_distance(s.flipped(), p) == pytest.approx(-signed_distance(s, p))


def test_signed_distance_gradient_is_unit(H3):
    s = catalog_surface("ellipsoid", H3, axes=(1.0, 0.8, 0.6))
    rng = np.random.default_rng(0)
    base = s.nodes(6).points[::7]
    nu = s.nodes(6).normals[::7]
    h = 1e-5
    for p, n in zip(base[:10], nu[:10]):
        q = H3.exp_map(p, 0.1 * rng.uniform(-1, 1) * n)
        B = H3.orthonormal_tangent_basis(q)
        grad = [(signed_distance(s, H3.exp_map(q, h * e)) - signed_distance(s, H3.exp_map(q, -h * e)))
                / (2 * h) for e in B]
        assert np.linalg.norm(grad) == pytest.approx(1.0, abs=1e-5)


def test_ambiguity_warning_beyond_certificate(E3):
    s = catalog_surface("sphere", E3)
    cert = estimate_reach(s, 0.5)
    with pytest.warns(AmbiguityWarning):
        signed_distance(s, [0.0, 0.0, 0.1], certificate=cert)
    with warnings.catch_warnings():
        warnings.simplefilter("error", AmbiguityWarning)
        signed_distance(s, [0.0, 0.0, 0.8], certificate=cert)


def test_hausdorff_concentric_spheres(E3):
    d = hausdorff_distance(catalog_surface("sphere", E3), catalog_surface("sphere", E3, radius=1.3))
    assert float(d) == pytest.approx(0.3, abs=1e-10)


def test_hausdorff_self_is_zero(H2):
    s = catalog_surface("ellipse", H2, axes=(1.0, 0.6))
    assert float(hausdorff_distance(s, s)) == pytest.approx(0.0, abs=1e-12)


def test_hausdorff_mesh_matches_max_deviation(E3):
    s = catalog_surface("sphere", E3)
    m = mesh_from_parametric(s, 8)
    hd = hausdorff_distance(s, m)
    dev = np.max(np.abs(signed_distance(s, sample_surface(m).points)))
    assert hd.a_to_b <= hd.value and hd.b_to_a == pytest.approx(dev, rel=1e-12)
    # centroid sag of the coarsest face bounds the deviation from below
    assert hd.value > 0.01


def test_hausdorff_mismatched_ambients(E3, H3):
    with pytest.raises(ConfigError):
        hausdorff_distance(catalog_surface("sphere", E3), catalog_surface("sphere", H3))


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 1000))
def test_hausdorff_triangle_inequality(seed):
    E = AmbientSpace.euclidean(2)
    base = catalog_surface("ellipse", E, axes=(1.5, 1.0))
    a, b, c = (perturb(base, amp, seed=seed + i) for i, amp in enumerate((0.1, -0.15, 0.2)))
    dab = float(hausdorff_distance(a, b))
    dbc = float(hausdorff_distance(b, c))
    dac = float(hausdorff_distance(a, c))
    assert dac <= dab + dbc + 1e-9


@pytest.mark.parametrize("eps,ok", [(0.9, True), (1.1, False)])
def test_reach_sphere(E3, eps, ok):
    cert = estimate_reach(catalog_surface("sphere", E3), eps)
    assert cert.all_passed is ok
    assert cert.certified == (eps if ok else pytest.approx(eps / 2))


@pytest.mark.parametrize("eps,ok", [(0.4, True), (0.6, False)])
def test_reach_ellipsoid(E3, eps, ok):
    assert estimate_reach(catalog_surface("ellipsoid", E3, axes=(2, 1, 1)), eps).all_passed is ok


def test_reach_of_parallel_surface(H3):
    s = parallel_surface(catalog_surface("ellipsoid", H3, axes=(1.0, 0.8, 0.6)), 0.3)
    assert estimate_reach(s, 0.3).all_passed


def test_reach_csv(E3):
    cert = estimate_reach(catalog_surface("sphere", E3), 0.5, density=8)
    lines = cert.to_csv().splitlines()
    assert lines[0] == ",".join(ReachCertificate.CSV_COLUMNS)
    assert len(lines) == 1 + len(cert.passed)


def test_reach_rejects_nonpositive(E3):
    with pytest.raises(ValueError):
        estimate_reach(catalog_surface("sphere", E3), 0.0)


def test_region_volume_euclidean_shell(E3):
    a, b = catalog_surface("sphere", E3), catalog_surface("sphere", E3, radius=1.1)
    exact = 4 * math.pi / 3 * (1.1 ** 3 - 1)
    assert float(region_volume(a, b)) == pytest.approx(exact, rel=1e-12)
    assert float(region_volume(a, b, method="flux")) == pytest.approx(exact, rel=1e-12)
    mc = region_volume(a, b, method="monte-carlo", samples=20000, seed=3)
    assert abs(mc.value - exact) < 4 * mc.stderr


def test_region_volume_hyperbolic_shell(H3):
    a, b = catalog_surface("sphere", H3), catalog_surface("sphere", H3, radius=1.2)
    assert float(region_volume(a, b)) == pytest.approx(FROZEN["h3_shell_1_1p2"], rel=1e-12)
    assert float(region_volume(a, b, method="flux")) == pytest.approx(FROZEN["h3_shell_1_1p2"],
                                                                      rel=1e-12)


def test_region_volume_identity(E3):
    s = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    assert float(region_volume(s, s)) == 0.0


def test_region_volume_non_nested(E3):
    a = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    b = parallel_surface(catalog_surface("ellipsoid", E3, axes=(1, 2, 1)), 0.01)
    with pytest.raises(GeometryError):
        region_volume(a, b)


def test_enclosed_volume_matches_ball(H2, H3):
    assert enclosed_volume(catalog_surface("circle", H2, radius=0.8)) == pytest.approx(
        float(ball_volume(H2, 0.8)), rel=1e-12)
    assert enclosed_volume(catalog_surface("sphere", H3, radius=0.8)) == pytest.approx(
        float(ball_volume(H3, 0.8)), rel=1e-12)
