"""Convex polytopes, their smoothed parallel bodies, and the inequality gap.

Hulls in H^n are computed in the Klein model, where geodesics are straight
chords, so hyperbolic convexity is euclidean convexity there. The raw hull
boundary is singular; its parallel surface at distance t > 0 is covered by
pieces: flowed faces, a cylinder-like piece per edge (normals rotating
between the adjacent face normals) and a cap per vertex (the normal cone).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .ambient import AmbientSpace, unit_sphere_volume
from .charts import ArcChart, ConeTriangleChart, EdgePieceChart, SimplexChart
from .curvature import total_mean_curvature
from .distance import enclosed_volume, nearest_index, sample_surface
from .errors import ConfigError, GeometryError
from .surfaces import ParametricSurface

DEFAULT_EPS0 = 0.1
PIECE_ORDER = 32  # pieces are analytic; ~1e-12 relative on typical hulls
_SAME = 1e-12


class PolytopeSurface(ParametricSurface):
    """Boundary of a convex polytope (singular along edges and vertices).

    ``charts()`` are the flat faces only; ``parallel(t)`` adds the edge and
    vertex pieces so that the flowed surface is closed.
    """

    singular = True
    default_order = PIECE_ORDER

    def __init__(self, space, vertices, faces, normals, label="polytope"):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces, dtype=int)
        self.face_normals = np.asarray(normals, dtype=float)
        face_charts = [SimplexChart(space, self.vertices[f], nrm)
                       for f, nrm in zip(self.faces, self.face_normals)]
        super().__init__(space, face_charts, label=label, convex=True)
        self.pieces = self._build_pieces()

    def _build_pieces(self):
        sp = self.space
        pieces = []
        if self.n == 2:
            inc = {}
            for fi, f in enumerate(self.faces):
                inc.setdefault(int(f[1]), [None, None])[0] = fi   # face ending here
                inc.setdefault(int(f[0]), [None, None])[1] = fi   # face starting here
            for v, (fin, fout) in sorted(inc.items()):
                n1, n2 = self.face_normals[fin], self.face_normals[fout]
                if sp.inner(n1, n2) < 1 - _SAME:
                    pieces.append(ArcChart(sp, self.vertices[v], n1, n2))
            return pieces
        edges = {}
        vfaces = {}
        for fi, f in enumerate(self.faces):
            for k in range(3):
                a, b = int(f[k]), int(f[(k + 1) % 3])
                edges.setdefault((min(a, b), max(a, b)), []).append(fi)
                vfaces.setdefault(a, []).append(fi)
        for (a, b), fs in sorted(edges.items()):
            if len(fs) != 2:
                raise GeometryError("hull edge not shared by exactly two faces")
            n1, n2 = self.face_normals[fs[0]], self.face_normals[fs[1]]
            if sp.inner(n1, n2) < 1 - _SAME:
                pieces.append(EdgePieceChart(sp, self.vertices[a], self.vertices[b], n1, n2))
        for v, fs in sorted(vfaces.items()):
            pieces.extend(self._vertex_cone(v, fs))
        return pieces

    def _vertex_cone(self, v, fs):
        sp = self.space
        p = self.vertices[v]
        uniq = []
        for fi in fs:
            nrm = self.face_normals[fi]
            if all(sp.inner(nrm, u) < 1 - _SAME for u in uniq):
                uniq.append(nrm)
        if len(uniq) < 3:
            return []
        U = np.array(uniq)
        mean = U.sum(axis=0)
        mean /= sp.norm(mean)
        B = sp.orthonormal_tangent_basis(p)
        # basis of the plane orthogonal to the mean normal inside T_p
        coords = np.einsum("kd,ad,d->ka", U, B, sp.metric_signature)
        mc = np.einsum("d,ad,d->a", mean, B, sp.metric_signature)
        e1 = np.cross(mc, [1.0, 0, 0] if abs(mc[0]) < 0.9 else [0, 1.0, 0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(mc, e1)
        ang = np.arctan2(coords @ e2, coords @ e1)
        U = U[np.argsort(ang)]
        return [ConeTriangleChart(sp, p, np.stack([U[0], U[i], U[i + 1]]))
                for i in range(1, len(U) - 1)]

    def flipped(self):
        raise GeometryError("polytope boundaries are kept outward oriented")

    def parallel(self, t):
        flowed = ParametricSurface(self.space, list(self._charts) + self.pieces, self.label,
                                   convex=True)
        flowed.default_order = self.default_order
        out = flowed.parallel(t)
        out.label = f"{self.label}^{t:g}"
        return out

    @classmethod
    def from_points(cls, space, points, label="hull"):
        return polytope_from_points(space, points, label)


def _minkowski_face_normal(space, V, interior):
    sig = space.metric_signature
    _, _, vt = np.linalg.svd(V * sig)
    nrm = vt[-1]
    nrm = nrm / math.sqrt(abs(space.inner(nrm, nrm)))
    if space.inner(nrm, interior) > 0:
        nrm = -nrm
    return nrm


def polytope_from_points(space, points, label="hull"):
    """Convex hull of points (hyperboloid coordinates in H^n)."""
    P = np.asarray(points, dtype=float)
    n = space.dim
    if len(P) < n + 1:
        raise GeometryError(f"need at least {n + 1} points, got {len(P)}")
    flat = space.to_klein(P) if space.is_hyperbolic else P
    try:
        hull = ConvexHull(flat)
    except QhullError as exc:
        raise GeometryError(f"degenerate point set: {exc.args[0].splitlines()[0]}") from None
    if hull.volume <= 1e-14:
        raise GeometryError("degenerate point set (zero hull volume)")
    used = np.unique(hull.simplices)
    remap = -np.ones(len(P), dtype=int)
    remap[used] = np.arange(len(used))
    verts = space.project(P[used]) if space.is_hyperbolic else P[used]
    center = flat[used].mean(axis=0)
    interior = space.from_klein(center) if space.is_hyperbolic else center
    faces, normals = [], []
    for simplex, eq in zip(hull.simplices, hull.equations):
        f = remap[simplex]
        out = eq[:n]
        # orient each facet so its simplex orientation agrees with the outward normal
        E = flat[simplex[1:]] - flat[simplex[0]]
        M = np.vstack([out[None, :], E]) if n == 3 else np.vstack([out, E[0]])
        if np.linalg.det(M) < 0:
            f = f[[1, 0] + list(range(2, len(f)))] if n == 3 else f[::-1]
        if space.is_hyperbolic:
            nrm = _minkowski_face_normal(space, verts[f], interior)
        else:
            nrm = out / np.linalg.norm(out)
        faces.append(f)
        normals.append(nrm)
    return PolytopeSurface(space, verts, np.array(faces), np.array(normals), label)


# ---------------------------------------------------------------------------
# bodies

@dataclass
class ConvexBody:
    space: AmbientSpace
    boundary: object
    provenance: dict = field(default_factory=dict)
    polytope: PolytopeSurface | None = None

    def to_json(self):
        return json.dumps({"ambient": self.space.to_dict(), "provenance": self.provenance},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        space = AmbientSpace.from_dict(d["ambient"])
        prov = d["provenance"]
        if prov.get("kind") == "random":
            return random_convex_body(space, prov["seed"], prov["n_points"], prov["radius"],
                                      prov["eps0"])
        if prov.get("kind") == "hull":
            return hull_body(np.array(prov["points"]), space, prov["eps0"])
        raise ConfigError(f"cannot rebuild body of kind {prov.get('kind')!r}")


def hull_body(points, space, eps0=DEFAULT_EPS0, label="hull"):
    """Convex body: the hull of ``points`` smoothed by the outer parallel flow
    at distance ``eps0`` (reach >= eps0, C^{1,1} boundary)."""
    if eps0 <= 0:
        raise ConfigError("smoothing distance must be positive")
    P = np.asarray(points, dtype=float)
    poly = polytope_from_points(space, P, label)
    boundary = poly.parallel(eps0)
    boundary.label = f"{label}+{eps0:g}"
    prov = {"kind": "hull", "eps0": float(eps0), "points": P.tolist()}
    return ConvexBody(space, boundary, prov, poly)


def random_points(space, seed, n_points, radius):
    """Uniform points in a euclidean ball (the Klein ball for H^n)."""
    rng = np.random.default_rng(seed)
    n = space.dim
    d = rng.normal(size=(n_points, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    k = radius * rng.uniform(size=n_points) ** (1.0 / n)
    pts = d * k[:, None]
    return space.from_klein(pts) if space.is_hyperbolic else pts


def random_convex_body(space, seed, n_points=12, radius=0.8, eps0=DEFAULT_EPS0):
    """Seeded random hull body.

    ``n_points`` >= n + 1; ``radius`` > 0 (and < 1 in H^n, where it is the
    Klein-ball radius of the sampling region).
    """
    if n_points < space.dim + 1:
        raise ConfigError(f"n_points must be >= {space.dim + 1}")
    if radius <= 0 or (space.is_hyperbolic and radius >= 1):
        raise ConfigError("radius out of range")
    pts = random_points(space, seed, n_points, radius)
    body = hull_body(pts, space, eps0, label=f"random{seed}")
    body.provenance = {"kind": "random", "seed": int(seed), "n_points": int(n_points),
                       "radius": float(radius), "eps0": float(eps0), "points": pts.tolist()}
    return body


def catalog_body(surface):
    return ConvexBody(surface.space, surface, {"kind": "catalog", "label": surface.label})


# ---------------------------------------------------------------------------
# checks

@dataclass
class ConvexityCheck:
    pairs: int
    worst: float   # largest signed distance of a chord point (<= tol means inside)
    passed: bool


def convexity_check(surface, pairs=1000, seed=0, tol=1e-6, fractions=(0.25, 0.5, 0.75),
                    density=32):
    """Sample boundary point pairs and test that their connecting geodesic
    stays inside (signed distance <= tol)."""
    sp = surface.space
    S = sample_surface(surface, density).points
    rng = np.random.default_rng(seed)
    i = rng.integers(len(S), size=pairs)
    j = rng.integers(len(S), size=pairs)
    a, b = S[i], S[j]
    v = sp.log_map(a, b)
    Q = np.concatenate([sp.exp_map(a, f * v) for f in fractions])
    d, _, _ = nearest_index(surface, density).query(Q)
    worst = float(np.max(surface.orientation * d))
    return ConvexityCheck(pairs, worst, worst <= tol)


@dataclass
class GapResult:
    value: float         # M_{n-1}
    sphere: float        # |S^{n-1}|
    gap: float
    enclosed: float      # enclosed volume (area in H^2)
    error: float

    def gauss_bonnet_mismatch(self, c=1.0):
        """Relative difference between gap and c * enclosed area (H^2)."""
        return abs(self.gap - c * self.enclosed) / max(abs(c * self.enclosed), 1e-300)


def conjecture_gap(body, order=None, raw=False):
    """M_{n-1} - |S^{n-1}| for a convex body.

    The smoothed boundary is C^{1,1} and piecewise smooth, so its M_{n-1}
    equals the limit of M_{n-1}(Gamma^eps) and is integrated directly. With
    ``raw`` the unsmoothed polytope is measured through the limit instead.
    """
    surface = body.polytope if raw and body.polytope is not None else getattr(body, "boundary", body)
    n = surface.n
    tc = total_mean_curvature(surface, n - 1, order)
    vol = unit_sphere_volume(n)
    enclosed = enclosed_volume(surface, order) if not getattr(surface, "singular", False) \
        else enclosed_volume(body.boundary, order)
    return GapResult(float(tc), vol, float(tc) - vol, enclosed, tc.error)
