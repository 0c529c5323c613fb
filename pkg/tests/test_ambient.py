import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from totcurv import AmbientSpace, unit_sphere_volume
from totcurv.errors import ConfigError, InvalidPointError

from conftest import ALL_SPACES


def random_points(space, k, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(k, space.dim)) * scale
    return space.point_at_polar(np.linalg.norm(v, axis=1, keepdims=True),
                                 v / np.linalg.norm(v, axis=1, keepdims=True))


def test_unit_sphere_volume():
    assert unit_sphere_volume(2) == pytest.approx(2 * math.pi)
    assert unit_sphere_volume(3) == pytest.approx(4 * math.pi)
    assert unit_sphere_volume(4) == pytest.approx(2 * math.pi ** 2)
    with pytest.raises(ValueError):
        unit_sphere_volume(1)


def test_construction_and_serialization():
    H = AmbientSpace.hyperbolic(3, 2.0)
    assert AmbientSpace.from_dict(H.to_dict()) == H
    assert H.coord_dim == 4 and H.is_hyperbolic
    with pytest.raises((ConfigError, ValueError)):
        AmbientSpace.hyperbolic(3, -1.0)


def test_origin_lies_on_model(H3):
    o = H3.origin()
    assert H3.inner(o, o) == pytest.approx(-1.0)


def test_check_points_rejects_off_model(H3):
    with pytest.raises(InvalidPointError):
        H3.check_points(np.array([1.0, 1.0, 0.0, 0.0]))


@pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: s.describe())
def test_exp_log_roundtrip(space):
    p = random_points(space, 20, 1)
    q = random_points(space, 20, 2)
    v = space.log_map(p, q)
    assert np.allclose(space.exp_map(p, v), q, atol=1e-10)
    assert np.allclose(space.norm(v), space.distance(p, q), atol=1e-10)


def test_hyperbolic_distance_closed_form():
    H = AmbientSpace.hyperbolic(2, 1.0)
    o = H.origin()
    p = H.point_at_polar(np.array([1.3]), np.array([1.0, 0.0]))
    assert H.distance(o, p) == pytest.approx(1.3, abs=1e-12)
    # curvature -4: distances scale by 1/s
    H4 = AmbientSpace.hyperbolic(2, 4.0)
    p4 = H4.point_at_polar(np.array([0.7]), np.array([0.0, 1.0]))
    assert H4.distance(H4.origin(), p4) == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("space", ALL_SPACES, ids=lambda s: s.describe())
def test_parallel_transport_is_isometric(space):
    p = random_points(space, 10, 3)
    q = random_points(space, 10, 4)
    rng = np.random.default_rng(5)
    B = space.orthonormal_tangent_basis(p)
    a = np.einsum("nk,nkd->nd", rng.normal(size=(10, space.dim)), B)
    b = np.einsum("nk,nkd->nd", rng.normal(size=(10, space.dim)), B)
    ta, tb = space.parallel_transport(p, q, a), space.parallel_transport(p, q, b)
    assert np.allclose(space.inner(ta, tb), space.inner(a, b), atol=1e-10)
    assert np.allclose(space.inner(ta, q), 0.0, atol=1e-10) if space.is_hyperbolic else True


def test_klein_roundtrip(H3):
    k = np.array([[0.1, -0.4, 0.3], [0.0, 0.0, 0.0]])
    assert np.allclose(H3.to_klein(H3.from_klein(k)), k)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_triangle_inequality(seed):
    H = AmbientSpace.hyperbolic(3, 1.0)
    p, q, r = random_points(H, 3, seed, scale=1.5)
    d = H.distance
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-12
