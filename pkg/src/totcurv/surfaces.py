"""Oriented closed hypersurfaces and their quadrature nodes.

Two representations share one interface:

* :class:`ParametricSurface` -- an atlas of charts with exact derivatives
  (catalog spheres, ellipsoids, circles, ellipses and their hyperbolic
  lifts, plus perturbations and parallel surfaces of these);
* :class:`MeshSurface` -- a triangle mesh (or closed polyline when n = 2)
  whose faces are flat / totally geodesic simplices; curvature comes from
  quadric fits at the vertices.

Quadrature returns a :class:`NodeSet`, a struct of arrays. Indexing it gives
single :class:`QuadratureNode` views.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .ambient import AmbientSpace
from .charts import (
    EmbeddedChart,
    FlowedChart,
    GaussianBumps,
    SimplexChart,
    cofactor_normal,
    ellipse_param,
    ellipsoid_param,
    metric_tensor,
    radial_bump_param,
)
from .errors import ConfigError, PerturbationTooLargeError, SingularChartError

DEFAULT_ORDER = 48
SINGULAR_DET = 1e-30


@dataclass(frozen=True)
class QuadratureNode:
    point: np.ndarray
    normal: np.ndarray
    weight: float
    shape: np.ndarray
    principal_curvatures: np.ndarray
    principal_directions: np.ndarray  # rows are ambient coordinate vectors
    chart: int = -1
    param: np.ndarray | None = None


@dataclass
class NodeSet:
    """Quadrature nodes of a surface, stored column-wise."""

    space: AmbientSpace
    points: np.ndarray        # (N, D)
    normals: np.ndarray       # (N, D)
    weights: np.ndarray       # (N,)
    shape: np.ndarray         # (N, m, m) symmetric, orthonormal tangent basis
    frames: np.ndarray        # (N, m, D) that orthonormal basis
    chart_ids: np.ndarray     # (N,)
    params: np.ndarray        # (N, m)
    orientation_sign: np.ndarray  # (N,) sign of det[normal, chart tangents]
    order: int = 0
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.weights)

    @cached_property
    def _eig(self):
        return np.linalg.eigh(self.shape)

    @property
    def kappas(self):
        return self._eig[0]

    @property
    def directions(self):
        vecs = self._eig[1]  # (N, m, m) columns are eigenvectors
        return np.einsum("nak,nad->nkd", vecs, self.frames)

    @property
    def area(self):
        return float(np.sum(self.weights))

    def __getitem__(self, i):
        return QuadratureNode(
            point=self.points[i], normal=self.normals[i], weight=float(self.weights[i]),
            shape=self.shape[i], principal_curvatures=self.kappas[i],
            principal_directions=self.directions[i], chart=int(self.chart_ids[i]),
            param=self.params[i])

    @classmethod
    def concatenate(cls, space, parts, order=0):
        parts = [p for p in parts if len(p)]
        cat = lambda name: np.concatenate([getattr(p, name) for p in parts], axis=0)
        return cls(space, cat("points"), cat("normals"), cat("weights"), cat("shape"),
                   cat("frames"), cat("chart_ids"), cat("params"), cat("orientation_sign"),
                   order=order)


def frame_geometry(space, frame, orientation=1):
    """Metric quantities at chart samples.

    Returns (sqrt det g, orthonormal tangent frame E, shape matrix S in E,
    orientation sign). Raises SingularChartError on a degenerate metric.
    """
    X, dX, nu, dnu = frame
    sig = space.metric_signature
    g = metric_tensor(space, dX)
    detg = np.linalg.det(g)
    if np.any(~(detg > SINGULAR_DET)):
        raise SingularChartError(
            f"degenerate first fundamental form (min det g = {np.nanmin(detg):.3e})")
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    E = np.einsum("naj,njd->nad", Linv, dX)
    h = np.einsum("nid,njd,d->nij", dnu, dX, sig)
    h = 0.5 * (h + np.swapaxes(h, 1, 2))
    S = orientation * np.einsum("nai,nij,nbj->nab", Linv, h, Linv)
    S = 0.5 * (S + np.swapaxes(S, 1, 2))
    vols = space.oriented_volume(X, np.concatenate([nu[:, None, :], dX], axis=1))
    return np.sqrt(detg), E, S, orientation * np.sign(vols)


class Hypersurface:
    """Common interface of all hypersurface representations."""

    space: AmbientSpace
    orientation: int = 1
    label: str = "surface"
    convex: bool = False
    singular: bool = False
    radial = None  # optional callable: unit direction at the origin -> radius
    default_order = DEFAULT_ORDER

    @property
    def n(self):
        return self.space.dim

    @property
    def m(self):
        return self.space.dim - 1

    def charts(self):
        raise NotImplementedError

    def nodes(self, order=None) -> NodeSet:
        order = int(order or self.default_order)
        parts = []
        for cid, chart in enumerate(self.charts()):
            u, w = chart.rule(order)
            fr = chart.frame(u)
            sqrtg, E, S, osign = frame_geometry(self.space, fr, self.orientation)
            parts.append(NodeSet(self.space, fr.X, self.orientation * fr.nu, w * sqrtg, S, E,
                                 np.full(len(w), cid), u, osign, order=order))
        return NodeSet.concatenate(self.space, parts, order)

    def quadrature(self, order=None):
        return self.nodes(order)

    def frames_at(self, chart_ids, params, with_dnu=False):
        """Exact (point, normal, chart tangents[, normal derivatives]) at
        chart parameters."""
        charts = self.charts()
        chart_ids = np.asarray(chart_ids)
        params = np.atleast_2d(params)
        D = self.space.coord_dim
        X = np.empty((len(params), D))
        nu = np.empty((len(params), D))
        dX = np.empty((len(params), self.m, D))
        dnu = np.empty((len(params), self.m, D))
        for cid in np.unique(chart_ids):
            sel = chart_ids == cid
            fr = charts[cid].frame(params[sel])
            X[sel], nu[sel], dX[sel] = fr.X, self.orientation * fr.nu, fr.dX
            dnu[sel] = self.orientation * fr.dnu
        if with_dnu:
            return X, nu, dX, dnu
        return X, nu, dX

    def flipped(self):
        raise NotImplementedError

    def parallel(self, t):
        raise NotImplementedError

    @property
    def area(self):
        return self.nodes().area


class ParametricSurface(Hypersurface):
    """A closed hypersurface given by an atlas of exact charts."""

    def __init__(self, space, charts, label="parametric", orientation=1, convex=False,
                 radial=None, spec=None, offset=0.0):
        self.space = space
        self._charts = list(charts)
        self.label = label
        self.orientation = orientation
        self.convex = convex
        self.radial = radial
        self.spec = spec or {}
        self.offset = offset

    def charts(self):
        return self._charts

    def flipped(self):
        return ParametricSurface(self.space, self._charts, self.label + "~", -self.orientation,
                                 self.convex, self.radial, self.spec, self.offset)

    def parallel(self, t):
        charts = [FlowedChart(c, self.orientation * t) for c in self._charts]
        out = ParametricSurface(self.space, charts, f"{self.label}^{t:g}", self.orientation,
                                self.convex, None, self.spec, self.offset + t)
        out.default_order = self.default_order
        return out

    def points_at(self, chart_ids, params):
        return self.frames_at(chart_ids, params)[0]


# ---------------------------------------------------------------------------
# catalog

CATALOG = ("sphere", "ellipsoid", "circle", "ellipse")


def _radial_ellipsoid(axes):
    axes = np.asarray(axes, dtype=float)

    def rho(d):
        return 1.0 / np.sqrt(np.sum((np.asarray(d) / axes) ** 2, axis=-1))

    return rho


def catalog_surface(name, space=None, **params):
    """Build a catalog surface.

    ``sphere(radius)`` and ``ellipsoid(axes)`` need a 3-dimensional ambient,
    ``circle(radius)`` and ``ellipse(axes)`` a 2-dimensional one. In
    hyperbolic space the shape is taken in geodesic normal coordinates at the
    origin, so a sphere of radius R is the geodesic sphere of radius R.
    """
    if name in ("sphere", "ellipsoid"):
        n = 3
    elif name in ("circle", "ellipse"):
        n = 2
    else:
        raise ConfigError(f"unknown catalog surface {name!r}; choose from {CATALOG}")
    if space is None:
        space = AmbientSpace.euclidean(n)
    if space.dim != n:
        raise ConfigError(f"{name} lives in dimension {n}, ambient is {space.describe()}")
    if name in ("sphere", "circle"):
        r = float(params.get("radius", params.get("R", 1.0)))
        axes = (r,) * n
    else:
        axes = tuple(float(a) for a in params.get("axes", (2.0, 1.0, 1.0)[:n]))
        if len(axes) != n:
            raise ConfigError(f"{name} needs {n} axes")
    if min(axes) <= 0:
        raise ConfigError("axes must be positive")
    if n == 3:
        chart = EmbeddedChart(space, ellipsoid_param(axes), "polar", 2)
    else:
        chart = EmbeddedChart(space, ellipse_param(axes), "periodic", 1)
    spec = {"catalog": name, "params": {"axes": list(axes)}, "ambient": space.to_dict()}
    label = f"{name}{tuple(round(a, 6) for a in axes)}@{space.describe()}"
    surf = ParametricSurface(space, [chart], label=label, convex=True,
                             radial=_radial_ellipsoid(axes), spec=spec)
    surf.axes = axes
    surf.base_param = chart.param
    return surf


def surface_from_spec(spec, space=None):
    """Build a surface from a json-compatible dict ``{"catalog": name, "params": {...}}``."""
    if space is None:
        space = AmbientSpace.from_dict(spec.get("ambient", {"kind": "euclidean",
                                                            "dim": 3 if spec["catalog"] in ("sphere", "ellipsoid") else 2}))
    return catalog_surface(spec["catalog"], space, **spec.get("params", {}))


def parse_surface_spec(text):
    """Parse ``name[:key=value[,key=value]]``; list values use ``/``, e.g.
    ``ellipsoid:axes=2/1/1``."""
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        k, _, v = item.partition("=")
        if "/" in v:
            params[k.strip()] = [float(x) for x in v.split("/")]
        else:
            params[k.strip()] = float(v)
    return name.strip(), params


# ---------------------------------------------------------------------------
# perturbation

def bump_from_seed(seed, n, count=1, width=0.5):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(count, n))
    weights = np.full(count, 1.0 / count)
    return GaussianBumps(centers, weights, width)


def perturb(surface, amplitude, mode=None, seed=0):
    """Radial normal-graph perturbation y -> y + amplitude * B(y/|y|) y/|y|.

    ``mode`` is a :class:`GaussianBumps` (values in [-1, 1]) or a dict
    ``{"count": k, "width": w}``; the bump centers are drawn from ``seed``.
    Works for catalog surfaces (star-shaped about the origin in normal
    coordinates); the displacement is along radial geodesics, so the
    Hausdorff distance to the original is at most |amplitude|.
    """
    if not isinstance(surface, ParametricSurface) or not hasattr(surface, "base_param"):
        raise ConfigError("perturb needs a catalog (radial) parametric surface")
    if amplitude == 0:
        return surface
    if mode is None or isinstance(mode, dict):
        mode = bump_from_seed(seed, surface.n, **(mode or {}))
    chart0 = surface.charts()[0]
    param = radial_bump_param(surface.base_param, mode, float(amplitude))

    # embedding: radius must stay positive along every ray
    u = chart0.dense_params(96)
    Y = surface.base_param(u)[0]
    r = np.linalg.norm(Y, axis=1)
    bump = mode(Y / r[:, None])
    if np.min(r + amplitude * bump) <= 0.05 * np.min(r):
        raise PerturbationTooLargeError("perturbed radial graph collapses through the center")
    chart = EmbeddedChart(surface.space, param, chart0.domain, chart0.m)
    # convexity/curvature change is checked, not assumed
    base_rho = surface.radial
    radial = (lambda d: base_rho(d) + amplitude * mode(np.asarray(d) / np.linalg.norm(d, axis=-1, keepdims=True)))
    spec = dict(surface.spec)
    spec["perturbation"] = {"amplitude": float(amplitude), "seed": seed, "bump": mode.to_dict()}
    out = ParametricSurface(surface.space, [chart], label=f"{surface.label}+{amplitude:g}bump",
                            orientation=surface.orientation, convex=False, radial=radial, spec=spec)
    out.base_param = param
    out.axes = getattr(surface, "axes", None)
    try:
        out.nodes(16)
    except SingularChartError as exc:
        raise PerturbationTooLargeError(str(exc)) from exc
    return out


# ---------------------------------------------------------------------------
# meshes

def simplex_normal(space, verts):
    """Constant unit normal of a flat simplex, positively oriented w.r.t. the
    vertex order."""
    verts = np.asarray(verts, dtype=float)
    chart = SimplexChart(space, verts, np.zeros(space.coord_dim))
    m = len(verts) - 1
    fr = chart.frame(np.full((1, m), 1.0 / (m + 1)))
    return cofactor_normal(space, fr.X, fr.dX)[0]


class MeshSurface(Hypersurface):
    """Triangle mesh (n = 3) or closed polyline (n = 2) in a model space.

    Faces are consistently ordered so that the induced normals point
    outward. Vertex curvature comes from quadric fits in geodesic normal
    coordinates over 2-ring neighborhoods; face quadrature uses the
    centroid rule by default.
    """

    default_order = 1

    def __init__(self, space, vertices, faces, label="mesh", orientation=1, convex=False):
        self.space = space
        self.vertices = space.project(np.asarray(vertices, dtype=float))
        self.faces = np.asarray(faces, dtype=int)
        if self.faces.shape[1] != space.dim:
            raise ConfigError("faces must have n vertex indices")
        self.label = label
        self.orientation = orientation
        self.convex = convex

    @cached_property
    def face_normals(self):
        from .meshcurv import face_normals
        return face_normals(self.space, self.vertices, self.faces)

    def frames_at(self, chart_ids, params, with_dnu=False):
        chart_ids = np.asarray(chart_ids)
        params = np.atleast_2d(params)
        Vf = self.vertices[self.faces[chart_ids]]
        lam = np.concatenate([1.0 - params.sum(axis=1, keepdims=True), params], axis=1)
        y = np.einsum("nk,nkd->nd", lam, Vf)
        dy = Vf[:, 1:] - Vf[:, :1]
        from .charts import _normalize_point
        X, dX = _normalize_point(self.space, y, dy)
        nu = self.orientation * self.face_normals[chart_ids]
        dX = np.asarray(dX)
        if with_dnu:
            # faces are totally geodesic
            return X, nu, dX, np.zeros_like(dX)
        return X, nu, dX

    def charts(self):
        return self._charts

    @cached_property
    def _charts(self):
        return [SimplexChart(self.space, self.vertices[f], nrm)
                for f, nrm in zip(self.faces, self.face_normals)]

    @cached_property
    def fit(self):
        from .meshcurv import fit_vertex_curvature
        return fit_vertex_curvature(self)

    def nodes(self, order=None):
        from .meshcurv import mesh_nodes
        return mesh_nodes(self, int(order or self.default_order))

    def edge_count_check(self):
        """Closedness: every edge (n = 3) or vertex (n = 2) shared by exactly
        two faces with opposite orientation."""
        from collections import Counter
        if self.n == 2:
            cnt = Counter(self.faces[:, 0]) + Counter(self.faces[:, 1])
            return all(v == 2 for v in cnt.values())
        und = Counter()
        directed = set()
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                und[frozenset((a, b))] += 1
                if (a, b) in directed:
                    return False
                directed.add((a, b))
        return all(v == 2 for v in und.values())

    def flipped(self):
        return MeshSurface(self.space, self.vertices, self.faces, self.label + "~",
                           -self.orientation, self.convex)

    def parallel(self, t):
        """Flow vertices along fitted vertex normals."""
        normals = self.orientation * self.fit.normals
        v = self.space.exp_map(self.vertices, t * normals)
        return MeshSurface(self.space, v, self.faces, f"{self.label}^{t:g}", self.orientation,
                           self.convex)

    @property
    def max_edge_length(self):
        f = self.faces
        k = f.shape[1]
        lens = [self.space.distance(self.vertices[f[:, i]], self.vertices[f[:, (i + 1) % k]])
                for i in range(k)]
        return float(np.max(lens))


def mesh_from_parametric(surface, resolution):
    """Inscribed mesh with vertices on the surface.

    Polar charts (spheres, ellipsoids): ``resolution`` k gives k latitude
    bands and 2k longitude sectors, ``2 + 2k(k-1)`` vertices and
    ``4k(k-1)`` triangles. Periodic charts (curves): k vertices and k edges.
    """
    if not isinstance(surface, ParametricSurface) or len(surface.charts()) != 1:
        raise ConfigError("mesh_from_parametric needs a single-chart parametric surface")
    chart = surface.charts()[0]
    k = int(resolution)
    if chart.domain == "periodic":
        if k < 3:
            raise ConfigError("curve resolution must be >= 3")
        u = (np.arange(k) * 2 * math.pi / k)[:, None]
        faces = np.stack([np.arange(k), (np.arange(k) + 1) % k], axis=1)
    elif chart.domain == "polar":
        if k < 2:
            raise ConfigError("surface resolution must be >= 2")
        t = np.arange(1, k) * math.pi / k
        p = np.arange(2 * k) * math.pi / k
        T, P = np.meshgrid(t, p, indexing="ij")
        u = np.concatenate([[[0.0, 0.0]], np.stack([T.ravel(), P.ravel()], axis=1), [[math.pi, 0.0]]])
        nb = 2 * k
        idx = lambda i, j: 1 + (i - 1) * nb + (j % nb)
        north, south = 0, 1 + (k - 1) * nb
        faces = []
        for j in range(nb):
            faces.append((north, idx(1, j), idx(1, j + 1)))
            faces.append((idx(k - 1, j), south, idx(k - 1, j + 1)))
        for i in range(1, k - 1):
            for j in range(nb):
                faces.append((idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)))
                faces.append((idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)))
        faces = np.array(faces)
    else:
        raise ConfigError(f"cannot mesh a chart with domain {chart.domain!r}")
    Y = chart.param(u)[0]
    if surface.space.is_hyperbolic:
        from .charts import _lift_derivatives
        X = _lift_derivatives(surface.space, Y)[0]
    else:
        X = Y
    if surface.orientation < 0:
        faces = faces[:, ::-1]
    mesh = MeshSurface(surface.space, X, faces, label=f"{surface.label}#mesh{k}",
                       orientation=surface.orientation, convex=surface.convex)
    mesh.resolution = k
    return mesh


def write_mesh(mesh, path):
    """Indexed face-set text format.

    Lines: ``totcurv-mesh 1``; ``ambient <kind> <dim> <c>``;
    ``vertices <V>`` followed by V coordinate rows (model coordinates, the
    hyperboloid x_0 first); ``faces <F>`` followed by F rows of vertex
    indices (0-based, outward orientation).
    """
    sp = mesh.space
    lines = ["totcurv-mesh 1", f"ambient {sp.kind} {sp.dim} {sp.curvature_scale!r}",
             f"vertices {len(mesh.vertices)}"]
    lines += [" ".join(repr(float(x)) for x in v) for v in mesh.vertices]
    lines.append(f"faces {len(mesh.faces)}")
    lines += [" ".join(str(int(i)) for i in f) for f in mesh.faces]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path):
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    if rows[0][0] != "totcurv-mesh":
        raise ConfigError("not a totcurv mesh file")
    kind, dim, c = rows[1][1], int(rows[1][2]), float(rows[1][3])
    space = AmbientSpace.hyperbolic(dim, c) if kind == "hyperbolic" else AmbientSpace.euclidean(dim)
    nv = int(rows[2][1])
    verts = np.array(rows[3:3 + nv], dtype=float)
    nf = int(rows[3 + nv][1])
    faces = np.array(rows[4 + nv:4 + nv + nf], dtype=int)
    return MeshSurface(space, verts, faces, label=str(path))


def quadrature(surface, order=None):
    return surface.nodes(order)


def shape_at(surface, chart_id, param):
    """Shape operator (orthonormal tangent basis) and principal curvatures at
    a chart parameter, from exact derivatives."""
    chart = surface.charts()[chart_id]
    fr = chart.frame(np.atleast_2d(param))
    _, _, S, _ = frame_geometry(surface.space, fr, surface.orientation)
    return S[0], np.linalg.eigvalsh(S[0])
