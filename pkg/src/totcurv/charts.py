"""Charts: maps from a parameter domain into an ambient model space.

A chart evaluates, at parameter samples ``u`` of shape (N, m), a
:class:`Frame` holding the point X, its parameter derivatives dX, the unit
normal nu and the normal derivatives dnu. Shape operators are derived from
(dX, dnu) alone, so charts built by flowing another chart along its normal
geodesics need only first derivatives.

Smooth catalog charts come from explicit euclidean parametrizations y(u)
with exact first and second derivatives; in hyperbolic space they are lifted
through the exponential map at the origin (geodesic normal coordinates).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import quadrature as quad
from .ambient import AmbientSpace


class Frame(NamedTuple):
    X: np.ndarray     # (N, D)
    dX: np.ndarray    # (N, m, D)
    nu: np.ndarray    # (N, D)
    dnu: np.ndarray   # (N, m, D)


def metric_tensor(space, dX):
    sig = space.metric_signature
    return np.einsum("nid,njd,d->nij", dX, dX, sig)


def cofactor_normal(space, X, dX):
    """Unit normal positively oriented against the chart's tangent frame.

    Euclidean: det[nu, X_1..X_m] > 0. Hyperbolic: det[x_hat, nu, X_1..X_m] > 0.
    """
    n_pts, m, D = dX.shape
    if space.is_hyperbolic:
        rows = np.concatenate([space.unit_timelike(X)[:, None, :], dX], axis=1)
    else:
        rows = dX
    # w_j = det[rows with e_j inserted at the normal slot]
    w = np.empty((n_pts, D))
    slot = 1 if space.is_hyperbolic else 0
    for j in range(D):
        e = np.zeros((n_pts, 1, D))
        e[:, 0, j] = 1.0
        mat = np.concatenate([rows[:, :slot], e, rows[:, slot:]], axis=1)
        w[:, j] = np.linalg.det(mat)
    nu = w * space.metric_signature
    return nu / space.norm(nu)[:, None]


def weingarten(space, nu, dX, ddX):
    """Normal derivatives from second derivatives: dnu_i = (h g^-1)_ik X_k."""
    sig = space.metric_signature
    g = metric_tensor(space, dX)
    h = -np.einsum("nd,nijd,d->nij", nu, ddX, sig)
    h = 0.5 * (h + np.swapaxes(h, 1, 2))
    a = np.linalg.solve(g, h)  # g^-1 h; symmetric h and g give h g^-1 = a^T
    return np.einsum("nki,nkd->nid", a, dX)


class Chart:
    """Base class. Subclasses set ``space``, ``m`` and ``domain``."""

    space: AmbientSpace
    m: int
    domain: str
    bounds = None

    def frame(self, u) -> Frame:
        raise NotImplementedError

    def rule(self, order):
        d = self.domain
        if d == "polar":
            return quad.polar(order)
        if d == "periodic":
            u, w = quad.periodic(max(4 * order, 16))
            return u[:, None], w
        if d == "triangle":
            return quad.triangle(order)
        if d == "segment":
            return quad.segment(order)
        if d == "interval":
            return quad.interval(order, *self.bounds[0])
        if d == "rect":
            return quad.rectangle(order, order, self.bounds)
        raise ValueError(d)

    def wrap(self, u):
        """Map parameters back into the domain (periodic wrap or clamp)."""
        u = np.array(u, dtype=float)
        d = self.domain
        if d == "polar":
            t, p = u[:, 0], u[:, 1]
            over = t > math.pi
            under = t < 0
            t = np.where(over, 2 * math.pi - t, np.where(under, -t, t))
            p = np.where(over | under, p + math.pi, p)
            u = np.stack([np.clip(t, 0, math.pi), np.mod(p, 2 * math.pi)], axis=1)
        elif d == "periodic":
            u = np.mod(u, 2 * math.pi)
        elif d in ("interval", "rect"):
            lo = np.array([b[0] for b in self.bounds])
            hi = np.array([b[1] for b in self.bounds])
            u = np.clip(u, lo, hi)
        elif d == "segment":
            u = np.clip(u, 0.0, 1.0)
        return u

    def dense_params(self, density):
        """Parameter samples roughly uniform in the domain (for distance caches)."""
        d = self.domain
        k = max(int(density), 2)
        if d == "polar":
            t = (np.arange(k) + 0.5) * math.pi / k
            p = np.arange(2 * k) * math.pi / k
            T, P = np.meshgrid(t, p, indexing="ij")
            return np.stack([T.ravel(), P.ravel()], axis=1)
        if d == "periodic":
            return (np.arange(4 * k) * (2 * math.pi / (4 * k)))[:, None]
        if d in ("segment", "interval"):
            lo, hi = self.bounds[0] if d == "interval" else (0.0, 1.0)
            return np.linspace(lo, hi, k + 1)[:, None]
        if d == "rect":
            (a0, b0), (a1, b1) = self.bounds
            X, Y = np.meshgrid(np.linspace(a0, b0, k + 1), np.linspace(a1, b1, k + 1), indexing="ij")
            return np.stack([X.ravel(), Y.ravel()], axis=1)
        if d == "triangle":
            i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
            keep = i + j <= k
            return np.stack([i[keep], j[keep]], axis=1) / k
        raise ValueError(d)


# ---------------------------------------------------------------------------
# euclidean parametrizations y(u) with exact derivatives

def ellipsoid_param(axes):
    a, b, c = axes

    def y(u):
        t, p = u[:, 0], u[:, 1]
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        z = np.zeros_like(t)
        Y = np.stack([a * st * cp, b * st * sp, c * ct], axis=1)
        Yt = np.stack([a * ct * cp, b * ct * sp, -c * st], axis=1)
        Yp = np.stack([-a * st * sp, b * st * cp, z], axis=1)
        Ytt = -Y
        Ytp = np.stack([-a * ct * sp, b * ct * cp, z], axis=1)
        Ypp = np.stack([-a * st * cp, -b * st * sp, z], axis=1)
        dY = np.stack([Yt, Yp], axis=1)
        ddY = np.stack([np.stack([Ytt, Ytp], axis=1), np.stack([Ytp, Ypp], axis=1)], axis=1)
        return Y, dY, ddY

    return y


def ellipse_param(axes):
    a, b = axes

    def y(u):
        t = u[:, 0]
        Y = np.stack([a * np.cos(t), b * np.sin(t)], axis=1)
        Yt = np.stack([-a * np.sin(t), b * np.cos(t)], axis=1)
        return Y, Yt[:, None, :], (-Y)[:, None, None, :]

    return y


class GaussianBumps:
    """Smooth function on the unit sphere, sum of w_k exp((d.c_k - 1)/s^2).

    With sum |w_k| <= 1 the values stay in [-1, 1].
    """

    def __init__(self, centers, weights, width):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.centers /= np.linalg.norm(self.centers, axis=1, keepdims=True)
        self.weights = np.asarray(weights, dtype=float)
        self.width = float(width)

    def __call__(self, d):
        return self.evaluate(d)[0]

    def evaluate(self, d):
        s2 = self.width ** 2
        e = np.exp((d @ self.centers.T - 1.0) / s2) * self.weights  # (N, K)
        val = e.sum(axis=1)
        grad = e @ self.centers / s2
        hess = np.einsum("nk,ki,kj->nij", e, self.centers, self.centers) / s2 ** 2
        return val, grad, hess

    def to_dict(self):
        return {"centers": self.centers.tolist(), "weights": self.weights.tolist(),
                "width": self.width}


def radial_bump_param(base, bump, amplitude):
    """y + amplitude * B(y/|y|) * y/|y|: a radial normal-graph perturbation."""

    def y(u):
        Y, dY, ddY = base(u)
        n_dim = Y.shape[1]
        r = np.linalg.norm(Y, axis=1)
        yh = Y / r[:, None]
        eye = np.eye(n_dim)
        DN = (eye - yh[:, :, None] * yh[:, None, :]) / r[:, None, None]        # (N, a, b)
        # D2N[m, k, l] = (-(d_mk yh_l + d_ml yh_k + d_kl yh_m) + 3 yh_m yh_k yh_l) / r^2
        D2N = (-(np.einsum("mk,nl->nmkl", eye, yh) + np.einsum("ml,nk->nmkl", eye, yh)
                 + np.einsum("kl,nm->nmkl", eye, yh))
               + 3 * np.einsum("nm,nk,nl->nmkl", yh, yh, yh)) / (r ** 2)[:, None, None, None]
        yh_i = np.einsum("nab,nib->nia", DN, dY)
        yh_ij = (np.einsum("nmkl,nik,njl->nijm", D2N, dY, dY)
                 + np.einsum("nab,nijb->nija", DN, ddY))
        B, gB, hB = bump.evaluate(yh)
        B_i = np.einsum("na,nia->ni", gB, yh_i)
        B_ij = np.einsum("nia,nab,njb->nij", yh_i, hB, yh_i) + np.einsum("na,nija->nij", gB, yh_ij)
        A = amplitude
        Yp = Y + A * B[:, None] * yh
        dYp = dY + A * (B_i[:, :, None] * yh[:, None, :] + B[:, None, None] * yh_i)
        ddYp = ddY + A * (B_ij[:, :, :, None] * yh[:, None, None, :]
                          + B_i[:, :, None, None] * yh_i[:, None, :, :]
                          + B_i[:, None, :, None] * yh_i[:, :, None, :]
                          + B[:, None, None, None] * yh_ij)
        return Yp, dYp, ddYp

    return y


def _lift_derivatives(space, Y):
    """exp at the origin of H^n applied to y in R^n, with first and second
    derivatives: returns F (N, n+1), DF (N, n+1, n), D2F (N, n+1, n, n)."""
    s = space.s
    n_pts, n = Y.shape
    r = np.linalg.norm(Y, axis=1)
    yh = Y / r[:, None]
    ch, sh = np.cosh(s * r), np.sinh(s * r)
    a1 = sh
    a2 = s * ch
    b0 = sh / (s * r)
    b1 = ch / r - sh / (s * r ** 2)
    b2 = s * sh / r - 2 * ch / r ** 2 + 2 * sh / (s * r ** 3)
    eye = np.eye(n)
    P = yh[:, :, None] * yh[:, None, :]
    F = np.concatenate([(ch / s)[:, None], b0[:, None] * Y], axis=1)
    DF = np.empty((n_pts, n + 1, n))
    DF[:, 0, :] = a1[:, None] * yh
    DF[:, 1:, :] = b0[:, None, None] * eye + b1[:, None, None] * Y[:, :, None] * yh[:, None, :]
    D2F = np.empty((n_pts, n + 1, n, n))
    D2F[:, 0] = a2[:, None, None] * P + (a1 / r)[:, None, None] * (eye - P)
    inner = (b2 - b1 / r)[:, None, None] * P + (b1 / r)[:, None, None] * eye  # (N, k, l)
    D2F[:, 1:] = (b1[:, None, None, None] * (np.einsum("mk,nl->nmkl", eye, yh)
                                             + np.einsum("ml,nk->nmkl", eye, yh))
                  + Y[:, :, None, None] * inner[:, None, :, :])
    return F, DF, D2F


class EmbeddedChart(Chart):
    """Chart given by a euclidean parametrization, lifted to H^n if needed."""

    def __init__(self, space, param, domain, m):
        self.space = space
        self.param = param
        self.domain = domain
        self.m = m

    def frame(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        Y, dY, ddY = self.param(u)
        if self.space.is_hyperbolic:
            F, DF, D2F = _lift_derivatives(self.space, Y)
            X = F
            dX = np.einsum("nak,nik->nia", DF, dY)
            ddX = (np.einsum("nakl,nik,njl->nija", D2F, dY, dY)
                   + np.einsum("nak,nijk->nija", DF, ddY))
        else:
            X, dX, ddX = Y, dY, ddY
        nu = cofactor_normal(self.space, X, dX)
        dnu = weingarten(self.space, nu, dX, ddX)
        return Frame(X, dX, nu, dnu)


def _normalize_point(space, y, dy):
    """Normalize a (Minkowski-timelike) combination onto the model, with
    derivatives. Euclidean: identity."""
    if not space.is_hyperbolic:
        return y, dy
    q = -space.c * space.inner(y, y)
    rho = np.sqrt(q)
    drho = -space.c * np.einsum("nid,nd,d->ni", dy, y, space.metric_signature) / rho[:, None]
    X = y / rho[:, None]
    dX = dy / rho[:, None, None] - y[:, None, :] * (drho / rho[:, None] ** 2)[:, :, None]
    return X, dX


class SimplexChart(Chart):
    """Flat (totally geodesic) simplex with a constant unit normal.

    Vertices V_0..V_m; parameters u in the reference simplex with
    barycentric weights (1 - sum u, u_1, ..., u_m). In the hyperboloid model
    the linear combination is renormalized, which is straight-line
    interpolation in the Klein model.
    """

    def __init__(self, space, vertices, normal):
        self.space = space
        self.vertices = np.asarray(vertices, dtype=float)
        self.m = len(self.vertices) - 1
        self.domain = "triangle" if self.m == 2 else "segment"
        self.normal = np.asarray(normal, dtype=float)

    def frame(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        V = self.vertices
        lam = np.concatenate([1.0 - u.sum(axis=1, keepdims=True), u], axis=1)
        y = lam @ V
        dy = np.broadcast_to((V[1:] - V[0])[None], (len(u), self.m, V.shape[1]))
        X, dX = _normalize_point(self.space, y, dy)
        nu = np.broadcast_to(self.normal, X.shape).copy()
        return Frame(X, np.array(dX), nu, np.zeros_like(dX))


class EdgePieceChart(Chart):
    """Normal wedge over a geodesic edge: base point on the edge, normal
    rotating from n1 towards n2 by angle phi in [0, angle]. Degenerate at
    zero offset; meant to be flowed."""

    def __init__(self, space, a, b, n1, n2):
        self.space = space
        self.m = 2
        self.domain = "rect"
        self.a = np.asarray(a, float)
        self.b = np.asarray(b, float)
        self.n1 = np.asarray(n1, float)
        n2 = np.asarray(n2, float)
        cos = float(np.clip(space.inner(self.n1, n2), -1.0, 1.0))
        self.angle = math.acos(cos)
        w = n2 - cos * self.n1
        nw = float(space.norm(w))
        self.m1 = w / nw if nw > 1e-14 else np.zeros_like(w)
        self.bounds = ((0.0, 1.0), (0.0, self.angle))

    def frame(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        ell, phi = u[:, 0], u[:, 1]
        y = (1 - ell)[:, None] * self.a + ell[:, None] * self.b
        dy = np.broadcast_to((self.b - self.a)[None, None, :], (len(u), 1, len(self.a)))
        X, dXl = _normalize_point(self.space, y, dy)
        dX = np.concatenate([dXl, np.zeros_like(dXl)], axis=1)
        c, s = np.cos(phi)[:, None], np.sin(phi)[:, None]
        nu = c * self.n1 + s * self.m1
        dnu_phi = -s * self.n1 + c * self.m1
        dnu = np.stack([np.zeros_like(nu), dnu_phi], axis=1)
        return Frame(X, dX, nu, dnu)


class ConeTriangleChart(Chart):
    """A spherical triangle of unit normals at a fixed vertex point."""

    def __init__(self, space, point, directions):
        self.space = space
        self.m = 2
        self.domain = "triangle"
        self.point = np.asarray(point, float)
        self.directions = np.asarray(directions, float)

    def frame(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        D = self.directions
        lam = np.concatenate([1.0 - u.sum(axis=1, keepdims=True), u], axis=1)
        w = lam @ D
        dw = np.broadcast_to((D[1:] - D[0])[None], (len(u), 2, D.shape[1]))
        nw = self.space.norm(w)
        dn = np.einsum("nid,nd,d->ni", dw, w, self.space.metric_signature) / nw[:, None]
        nu = w / nw[:, None]
        dnu = dw / nw[:, None, None] - w[:, None, :] * (dn / nw[:, None] ** 2)[:, :, None]
        X = np.broadcast_to(self.point, nu.shape).copy()
        return Frame(X, np.zeros_like(dnu), nu, dnu)


class ArcChart(Chart):
    """Planar analogue of the cone piece: normals rotating at a polygon vertex."""

    def __init__(self, space, point, n1, n2):
        self.space = space
        self.m = 1
        self.domain = "interval"
        self.point = np.asarray(point, float)
        self.n1 = np.asarray(n1, float)
        n2 = np.asarray(n2, float)
        cos = float(np.clip(space.inner(self.n1, n2), -1.0, 1.0))
        self.angle = math.acos(cos)
        w = n2 - cos * self.n1
        nw = float(space.norm(w))
        self.m1 = w / nw if nw > 1e-14 else np.zeros_like(w)
        self.bounds = ((0.0, self.angle),)

    def frame(self, u):
        u = np.atleast_2d(np.asarray(u, dtype=float))
        phi = u[:, 0]
        c, s = np.cos(phi)[:, None], np.sin(phi)[:, None]
        nu = c * self.n1 + s * self.m1
        dnu = (-s * self.n1 + c * self.m1)[:, None, :]
        X = np.broadcast_to(self.point, nu.shape).copy()
        return Frame(X, np.zeros_like(dnu), nu, dnu)


class FlowedChart(Chart):
    """Image of a chart under the normal geodesic flow by distance t."""

    def __init__(self, base, t):
        if isinstance(base, FlowedChart):
            t = base.t + t
            base = base.base
        self.base = base
        self.t = float(t)
        self.space = base.space
        self.m = base.m
        self.domain = base.domain
        self.bounds = base.bounds

    def frame(self, u):
        X, dX, nu, dnu = self.base.frame(u)
        a, b, da, db = self.space.geodesic_coefficients(self.t)
        Xt = self.space.project(a * X + b * nu)
        return Frame(Xt, a * dX + b * dnu, da * X + db * nu, da * dX + db * dnu)

    def wrap(self, u):
        return self.base.wrap(u)

    def dense_params(self, density):
        return self.base.dense_params(density)

    def rule(self, order):
        return self.base.rule(order)
