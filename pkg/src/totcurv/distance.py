"""Signed distance, Hausdorff distance, reach certificates and volumes.

Nearest points are found in two stages: a KD-tree over dense surface
samples proposes candidates, then a Riemannian Gauss-Newton iteration on
each candidate's chart (using the log map, so the same code serves both
ambients) converges to the foot point.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from . import quadrature as quad
from .errors import AmbiguityWarning, ConfigError, GeometryError
from .surfaces import MeshSurface

DEFAULT_DENSITY = 48
N_CANDIDATES = 6
GN_ITERATIONS = 12


# ---------------------------------------------------------------------------
# sampling and nearest points

@dataclass
class SurfaceSamples:
    points: np.ndarray
    normals: np.ndarray
    chart_ids: np.ndarray
    params: np.ndarray


def sample_surface(surface, density=DEFAULT_DENSITY):
    """Roughly uniform samples of a surface with exact normals."""
    if isinstance(surface, MeshSurface):
        # interior points only, so that KD candidates spread over distinct
        # faces even around high-valence vertices
        if surface.m == 2:
            u = np.array([[1 / 3, 1 / 3], [2 / 3, 1 / 6], [1 / 6, 2 / 3], [1 / 6, 1 / 6],
                          [0.45, 0.45], [0.1, 0.45], [0.45, 0.1]])
        else:
            u = np.array([[0.1], [0.3], [0.5], [0.7], [0.9]])
        F = len(surface.faces)
        ids = np.repeat(np.arange(F), len(u))
        params = np.tile(u, (F, 1))
    else:
        ids, params = [], []
        for cid, chart in enumerate(surface.charts()):
            dens = density if chart.domain in ("polar", "periodic") else max(4, density // 8)
            u = chart.dense_params(dens)
            ids.append(np.full(len(u), cid))
            params.append(u)
        ids = np.concatenate(ids)
        params = np.concatenate(params)
    X, nu, _ = surface.frames_at(ids, params)
    return SurfaceSamples(X, nu, ids, params)


class NearestPointIndex:
    """Query structure for foot points on a surface (immutable after build)."""

    def __init__(self, surface, density=DEFAULT_DENSITY):
        self.surface = surface
        self.space = surface.space
        self.samples = sample_surface(surface, density)
        self.tree = cKDTree(self.samples.points)
        self.density = density
        charts = surface.charts()
        self.domains = np.array([c.domain for c in charts])
        self._charts = charts

    def spacing(self):
        """Largest distance from a sample to its nearest distinct sample; bounds
        the covering radius of the sample set on regular grids."""
        P = self.samples.points
        d, _ = self.tree.query(P, k=min(8, len(P)))
        tiny = 1e-12 * max(1.0, float(np.max(np.abs(P))))
        d = np.where(d > tiny, d, np.inf)
        return float(np.max(np.min(d, axis=1)))

    def _wrap(self, ids, u, target, g):
        out = u.copy()
        for dom in np.unique(self.domains[ids]):
            sel = self.domains[ids] == dom
            if dom == "triangle":
                out[sel] = _project_simplex(target[sel], g[sel])
            else:
                # domain handling is chart-specific only through bounds
                for cid in np.unique(ids[sel]):
                    s2 = sel & (ids == cid)
                    out[s2] = self._charts[cid].wrap(target[s2])
        return out

    def query(self, points, k=None, iterations=None):
        """Return (signed distance, foot point, normal at foot) per query."""
        q = np.atleast_2d(np.asarray(points, dtype=float))
        sp = self.space
        if isinstance(self.surface, MeshSurface):
            # flat faces: Newton is exact after a step or two, but the
            # right face must be among the candidates
            k = k or 3 * N_CANDIDATES
            iterations = iterations or 3
        k = k or N_CANDIDATES
        iterations = iterations or GN_ITERATIONS
        k = min(k, len(self.samples.points))
        _, idx = self.tree.query(q, k=k)
        idx = np.atleast_2d(idx).reshape(len(q), k)
        Q = np.repeat(q, k, axis=0)
        ids = self.samples.chart_ids[idx.ravel()]
        u = self.samples.params[idx.ravel()].copy()
        best_d = np.full(len(Q), np.inf)
        best_u = u.copy()
        sig = sp.metric_signature
        act = np.arange(len(Q))  # candidates still moving
        for it in range(iterations + 1):
            ia, ua = ids[act], u[act]
            X, nu, dX, dnu = self.surface.frames_at(ia, ua, with_dnu=True)
            w = sp.log_map(X, Q[act])
            d = sp.norm(w)
            better = d < best_d[act]
            best_d[act[better]] = d[better]
            best_u[act[better]] = ua[better]
            if it == iterations:
                break
            g = np.einsum("nid,njd,d->nij", dX, dX, sig)
            b = np.einsum("nid,nd,d->ni", dX, w, sig)
            # Newton: Hess(d^2/2) = g + <w, nu> h, falling back to g when
            # that is not positive definite (query beyond a focal point)
            h = np.einsum("nid,njd,d->nij", dnu, dX, sig)
            hess = g + sp.inner(w, nu)[:, None, None] * 0.5 * (h + np.swapaxes(h, 1, 2))
            tr = np.trace(g, axis1=1, axis2=2)
            reg = 1e-12 * tr[:, None, None] + 1e-300
            eye = np.eye(g.shape[1])
            Li = np.linalg.inv(np.linalg.cholesky(g + reg * eye))
            ev = np.linalg.eigvalsh(Li @ hess @ np.swapaxes(Li, 1, 2))
            bad = ev[:, 0] <= 0.05
            hess[bad] = g[bad]
            step = np.linalg.solve(hess + reg * eye, b[..., None])[..., 0]
            norm = np.linalg.norm(step, axis=1, keepdims=True)
            step *= np.minimum(1.0, 0.5 / np.maximum(norm, 1e-300))
            un = self._wrap(ia, ua, ua + step, g)
            moved = np.max(np.abs(un - ua), axis=1) > 1e-13
            u[act] = un
            act = act[moved]
            if len(act) == 0:
                break
        X, nu, _ = self.surface.frames_at(ids, best_u)
        w = sp.log_map(X, Q)
        sgn = np.sign(sp.inner(w, nu))
        dist = best_d.reshape(len(q), k)
        j = np.argmin(dist, axis=1)
        rows = np.arange(len(q)) * k + j
        return sgn[rows] * dist[np.arange(len(q)), j], X[rows], nu[rows]


def _project_simplex(t, g):
    """Project targets onto the reference triangle in the metric g."""
    inside = (t[:, 0] >= 0) & (t[:, 1] >= 0) & (t.sum(axis=1) <= 1)
    out = t.copy()
    if np.all(inside):
        return out
    ts, gs = t[~inside], g[~inside]
    best = None
    best_cost = None
    for P, Qv in (((0, 0), (1, 0)), ((0, 0), (0, 1)), ((1, 0), (0, 1))):
        P = np.array(P, float)
        e = np.array(Qv, float) - P
        num = np.einsum("ni,nij,j->n", ts - P, gs, e)
        den = np.einsum("i,nij,j->n", e, gs, e)
        s = np.clip(num / den, 0.0, 1.0)
        cand = P + s[:, None] * e
        diff = cand - ts
        cost = np.einsum("ni,nij,nj->n", diff, gs, diff)
        if best is None:
            best, best_cost = cand, cost
        else:
            sel = cost < best_cost
            best[sel], best_cost[sel] = cand[sel], cost[sel]
    out[~inside] = best
    return out


_INDEX_CACHE: dict = {}


def nearest_index(surface, density=DEFAULT_DENSITY):
    key = (id(surface), density)
    hit = _INDEX_CACHE.get(key)
    if hit is None or hit[0] is not surface:
        if len(_INDEX_CACHE) > 64:
            _INDEX_CACHE.clear()
        hit = (surface, NearestPointIndex(surface, density))
        _INDEX_CACHE[key] = hit
    return hit[1]


def signed_distance(surface, points, density=DEFAULT_DENSITY, certificate=None):
    """Signed distance to the surface, positive on the side the normal
    points to. Scalar in, scalar out.

    If a reach certificate is given, queries farther than its certified
    bound trigger an :class:`AmbiguityWarning` (the foot point may not be
    unique there).
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    d, _, _ = nearest_index(surface, density).query(np.atleast_2d(pts))
    if certificate is not None and np.any(np.abs(d) >= certificate.certified):
        warnings.warn("query beyond the certified tubular neighborhood", AmbiguityWarning,
                      stacklevel=2)
    return float(d[0]) if single else d


# ---------------------------------------------------------------------------
# Hausdorff

@dataclass
class HausdorffResult:
    value: float
    error_bound: float
    a_to_b: float
    b_to_a: float

    def __float__(self):
        return float(self.value)


def directed_hausdorff(A, B, density=DEFAULT_DENSITY):
    idx_a = nearest_index(A, density)
    d, _, _ = nearest_index(B, density).query(idx_a.samples.points)
    return float(np.max(np.abs(d))), idx_a.spacing()


def hausdorff_distance(A, B, density=DEFAULT_DENSITY):
    """Symmetric Hausdorff distance from dense point samples with exact
    foot points; ``error_bound`` is the largest gap between neighboring
    samples, which bounds how far the sampled sup can be from the true one."""
    if A.space != B.space:
        raise ConfigError("surfaces live in different ambient spaces")
    ab, ea = directed_hausdorff(A, B, density)
    ba, eb = directed_hausdorff(B, A, density)
    return HausdorffResult(max(ab, ba), max(ea, eb), ab, ba)


# ---------------------------------------------------------------------------
# reach

@dataclass
class ReachCertificate:
    epsilon: float
    passed: np.ndarray      # (2N,) inner then outer ball test per sample
    margins: np.ndarray
    certified: float
    density: int
    density_error: float
    tolerance: float

    CSV_COLUMNS = ("sample_id", "side", "passed", "margin")

    @property
    def all_passed(self):
        return bool(np.all(self.passed))

    def to_csv(self, fh=None):
        own = fh is None
        fh = fh or io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        n = len(self.passed) // 2
        for i, (p, mg) in enumerate(zip(self.passed, self.margins)):
            w.writerow([i % n, "inner" if i < n else "outer", int(bool(p)), repr(float(mg))])
        return fh.getvalue() if own else None


def _reach_samples(surface, density):
    if isinstance(surface, MeshSurface):
        return surface.vertices, surface.orientation * surface.fit.normals
    s = sample_surface(surface, max(8, density // 2))
    return s.points, s.normals


def _mesh_sag(mesh):
    kmax = float(np.max(np.abs(mesh.fit.kappas)))
    return mesh.max_edge_length ** 2 * kmax / 8.0


def _ball_test(surface, eps, density, tol):
    P, N = _reach_samples(surface, density)
    sp = surface.space
    centers = np.concatenate([sp.exp_map(P, -eps * N), sp.exp_map(P, eps * N)])
    d, _, _ = nearest_index(surface, density).query(centers)
    margins = np.abs(d) - eps
    return margins >= -tol, margins


def estimate_reach(surface, epsilon, density=DEFAULT_DENSITY, tol=None, halvings=6):
    """Double-ball test at trial radius ``epsilon``.

    For each sample p the centers exp(p, -eps nu) and exp(p, +eps nu) must be
    at distance >= eps - tol from the surface. If every test passes the
    certified bound is eps; otherwise eps is halved until a pass (or 0).
    On meshes the tolerance includes the chord sag h^2 kappa_max / 8.
    """
    if epsilon <= 0:
        raise ValueError("trial radius must be positive")
    density_error = _mesh_sag(surface) if isinstance(surface, MeshSurface) else 0.0
    if not isinstance(surface, MeshSurface):
        idx = nearest_index(surface, density)
        kmax = float(np.max(np.abs(surface.nodes(16).kappas))) if surface.charts() else 0.0
        density_error = idx.spacing() ** 2 * kmax / 8.0
    if tol is None:
        tol = 1e-9 * max(1.0, epsilon)
        if isinstance(surface, MeshSurface):
            tol += density_error
    passed, margins = _ball_test(surface, epsilon, density, tol)
    certified = epsilon
    if not np.all(passed):
        certified = 0.0
        trial = epsilon
        for _ in range(halvings):
            trial *= 0.5
            ok, _ = _ball_test(surface, trial, density, tol)
            if np.all(ok):
                certified = trial
                break
    return ReachCertificate(float(epsilon), passed, margins, certified, density,
                            density_error, tol)


def certify_reach(surface, trials, density=DEFAULT_DENSITY, tol=None):
    """Largest trial radius passing the double-ball test (0 if none)."""
    best = 0.0
    for eps in sorted(trials):
        cert = estimate_reach(surface, eps, density, tol, halvings=0)
        if cert.all_passed:
            best = eps
        else:
            break
    return best


# ---------------------------------------------------------------------------
# volumes

@dataclass
class VolumeResult:
    value: float
    stderr: float
    method: str

    CSV_COLUMNS = ("method", "value", "stderr")

    def __float__(self):
        return float(self.value)

    def to_csv(self, fh=None):
        own = fh is None
        fh = fh or io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        w.writerow([self.method, repr(float(self.value)), repr(float(self.stderr))])
        return fh.getvalue() if own else None


def ball_volume(space, r):
    """Volume of a geodesic ball of radius r."""
    r = np.asarray(r, dtype=float)
    n = space.dim
    if not space.is_hyperbolic:
        return (math.pi * r * r) if n == 2 else (4.0 / 3.0) * math.pi * r ** 3
    s = space.s
    if n == 2:
        return 2 * math.pi * (np.cosh(s * r) - 1) / s ** 2
    return math.pi * (np.sinh(2 * s * r) / s - 2 * r) / s ** 2


def _radial_flux_factor(space, r):
    """f(r) with div(f(r) d/dr) = 1."""
    n = space.dim
    if not space.is_hyperbolic:
        return r / n
    s = space.s
    sr = s * r
    if n == 2:
        return np.tanh(sr / 2) / s
    return (np.sinh(2 * sr) / (2 * s) - r) / (2 * np.sinh(sr) ** 2)


def enclosed_volume(surface, order=None):
    """Volume enclosed by a closed, outward oriented surface (divergence
    theorem with a radial field of unit divergence about the origin)."""
    sp = surface.space
    nodes = surface.nodes(order)
    nrm = surface.orientation * nodes.normals
    if not sp.is_hyperbolic:
        flux = np.einsum("nd,nd->n", nodes.points, nrm) / sp.dim
    else:
        o = sp.origin()
        r = sp.distance(np.broadcast_to(o, nodes.points.shape), nodes.points)
        dr = -sp.inner(o, nrm) * sp.s / np.sinh(sp.s * r)
        flux = _radial_flux_factor(sp, r) * dr
    return math.fsum((nodes.weights * flux).tolist())


def _sphere_directions(n, order):
    if n == 3:
        u, w = quad.polar(order)
        t, p = u[:, 0], u[:, 1]
        d = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=1)
        return d, w * np.sin(t)
    u, w = quad.periodic(4 * order)
    return np.stack([np.cos(u), np.sin(u)], axis=1), w


def _radial_volume(inner, outer, order):
    sp = inner.space
    n = sp.dim

    def cone(rho):
        # volume of the cone over a unit solid angle up to radius rho
        return ball_volume(sp, rho) / (2 * math.pi if n == 2 else 4 * math.pi)

    vals = []
    for o in (order, max(order // 2, 8)):
        d, w = _sphere_directions(n, o)
        vals.append(math.fsum((w * np.abs(cone(outer.radial(d)) - cone(inner.radial(d)))).tolist()))
    return VolumeResult(vals[0], abs(vals[0] - vals[1]), "radial")


NESTING_SAMPLES = 4000


def _is_nested(inner, outer, density, tol):
    P = sample_surface(inner, max(8, density // 3)).points
    if len(P) > NESTING_SAMPLES:
        P = P[np.random.default_rng(0).choice(len(P), NESTING_SAMPLES, replace=False)]
    d, _, _ = nearest_index(outer, density).query(P)
    return bool(np.all(outer.orientation * d <= tol))


def region_volume(inner, outer, method="auto", order=None, density=DEFAULT_DENSITY,
                  samples=20000, seed=0, tol=1e-6):
    """Volume of the region between two closed hypersurfaces.

    Methods: ``radial`` (both surfaces radial graphs over the origin; gives
    the symmetric-difference volume even when they cross), ``flux``
    (nested surfaces; difference of enclosed volumes), ``monte-carlo``
    (symmetric difference by rejection sampling with a standard error).
    ``auto`` picks radial when possible, otherwise flux after checking
    nesting.
    """
    if inner.space != outer.space:
        raise ConfigError("surfaces live in different ambient spaces")
    if method == "auto":
        method = "radial" if inner.radial is not None and outer.radial is not None else "flux"
    if method == "radial":
        return _radial_volume(inner, outer, int(order or 64))
    if method == "flux":
        if not _is_nested(inner, outer, density, tol):
            raise GeometryError("inner surface is not nested inside outer surface")
        v = enclosed_volume(outer, order) - enclosed_volume(inner, order)
        return VolumeResult(v, 0.0, "flux")
    if method == "monte-carlo":
        return _monte_carlo_volume(inner, outer, samples, seed, density)
    raise ConfigError(f"unknown volume method {method!r}")


def _monte_carlo_volume(A, B, samples, seed, density):
    sp = A.space
    pts = np.concatenate([sample_surface(A, 16).points, sample_surface(B, 16).points])
    o = np.broadcast_to(sp.origin(), pts.shape)
    R = float(np.max(sp.distance(o, pts))) * 1.05
    rng = np.random.default_rng(seed)
    n = sp.dim
    dirs = rng.normal(size=(samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    # invert the radial volume CDF numerically
    grid = np.linspace(0, R, 2049)
    cdf = ball_volume(sp, grid) / ball_volume(sp, R)
    r = np.interp(rng.uniform(size=samples), cdf, grid)
    P = sp.point_at_polar(r[:, None], dirs)
    inA = A.orientation * nearest_index(A, density).query(P)[0] < 0
    inB = B.orientation * nearest_index(B, density).query(P)[0] < 0
    frac = np.mean(inA ^ inB)
    total = float(ball_volume(sp, R))
    return VolumeResult(frac * total, total * math.sqrt(frac * (1 - frac) / samples), "monte-carlo")
