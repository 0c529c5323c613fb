import numpy as np
import pytest

from totcurv import catalog_surface, mesh_from_parametric, perturb, read_mesh, write_mesh
from totcurv.errors import ConfigError, PerturbationTooLargeError
from totcurv.surfaces import parse_surface_spec, shape_at

from conftest import rel


def test_parse_surface_spec():
    assert parse_surface_spec("ellipsoid:axes=2/1/1") == ("ellipsoid", {"axes": [2.0, 1.0, 1.0]})
    assert parse_surface_spec("sphere:radius=1.5") == ("sphere", {"radius": 1.5})
    assert parse_surface_spec("circle") == ("circle", {})


def test_catalog_rejects_wrong_dimension(E2):
    with pytest.raises(ConfigError):
        catalog_surface("sphere", E2)
    with pytest.raises(ConfigError):
        catalog_surface("torus")


def test_sphere_shape_operator(E3, H3):
    _, k = shape_at(catalog_surface("sphere", E3, radius=2.0), 0, [0.7, 1.1])
    assert np.allclose(k, 0.5)
    _, k = shape_at(catalog_surface("sphere", H3, radius=1.0), 0, [0.7, 1.1])
    assert np.allclose(k, 1 / np.tanh(1.0))


def test_flipped_reverses_curvature_sign(E3):
    s = catalog_surface("ellipsoid", E3, axes=(2, 1, 1))
    _, k = shape_at(s, 0, [1.0, 0.3])
    _, kf = shape_at(s.flipped(), 0, [1.0, 0.3])
    assert np.allclose(np.sort(k), np.sort(-kf))


def test_hyperbolic_points_on_model(H3):
    s = catalog_surface("ellipsoid", H3, axes=(1.2, 0.8, 0.5))
    X = s.nodes(8).points
    assert np.allclose(H3.inner(X, X), -1.0)


def test_mesh_counts_and_closedness(E3, E2):
    m = mesh_from_parametric(catalog_surface("sphere", E3), 6)
    assert len(m.vertices) == 2 + 2 * 6 * 5
    assert len(m.faces) == 4 * 6 * 5
    assert m.edge_count_check()
    c = mesh_from_parametric(catalog_surface("circle", E2), 10)
    assert len(c.faces) == 10 and c.edge_count_check()


def test_mesh_roundtrip(tmp_path, H3):
    m = mesh_from_parametric(catalog_surface("sphere", H3), 4)
    path = tmp_path / "s.mesh"
    write_mesh(m, path)
    back = read_mesh(path)
    assert back.space == H3
    assert np.array_equal(back.faces, m.faces)
    assert np.allclose(back.vertices, m.vertices, rtol=0, atol=1e-15)


def test_inscribed_mesh_area_converges(E3):
    s = catalog_surface("sphere", E3)
    areas = [mesh_from_parametric(s, k).area for k in (8, 16, 32)]
    errs = [rel(a, 4 * np.pi) for a in areas]
    assert errs[0] > errs[1] > errs[2]


def test_perturb_too_large(E3):
    s = catalog_surface("sphere", E3)
    with pytest.raises(PerturbationTooLargeError):
        perturb(s, -2.0, seed=1)


def test_perturb_zero_is_identity(H2):
    s = catalog_surface("circle", H2)
    assert perturb(s, 0.0) is s
