"""Vertex curvature of meshes by local quadric fitting.

At every vertex the 2-ring neighbors are mapped into the tangent space with
the log map (geodesic normal coordinates, where the ambient metric agrees
with the euclidean one to second order), a height function
z = a x^2 + b xy + c y^2 + d x + e y is fitted by least squares, and the
shape operator of that graph at the origin is taken as the vertex estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import _normalize_point, cofactor_normal
from .surfaces import NodeSet
from . import quadrature as quad


@dataclass
class VertexFit:
    normals: np.ndarray   # (V, D) fitted unit normals (outward w.r.t. face order)
    frames: np.ndarray    # (V, m, D) orthonormal tangent frames of the fitted graph
    shape: np.ndarray     # (V, m, m)
    residual: np.ndarray  # (V,) rms fit residual

    @property
    def kappas(self):
        return np.linalg.eigvalsh(self.shape)


def simplex_frames(space, Vf, u):
    """Points and tangents of flat simplices.

    Vf: (F, m+1, D) vertex coordinates; u: (q, m) reference parameters.
    Returns X (F, q, D) and dX (F, q, m, D).
    """
    F, k, D = Vf.shape
    m = k - 1
    lam = np.concatenate([1.0 - u.sum(axis=1, keepdims=True), u], axis=1)  # (q, k)
    y = np.einsum("qk,fkd->fqd", lam, Vf)
    edges = Vf[:, 1:] - Vf[:, :1]  # (F, m, D)
    dy = np.broadcast_to(edges[:, None], (F, len(u), m, D))
    X, dX = _normalize_point(space, y.reshape(-1, D), dy.reshape(-1, m, D))
    return X.reshape(F, len(u), D), np.asarray(dX).reshape(F, len(u), m, D)


def face_normals(space, vertices, faces):
    Vf = vertices[faces]
    m = faces.shape[1] - 1
    X, dX = simplex_frames(space, Vf, np.full((1, m), 1.0 / (m + 1)))
    return cofactor_normal(space, X[:, 0], dX[:, 0])


def _rings(n_vertices, faces):
    nbr = [set() for _ in range(n_vertices)]
    inc = [[] for _ in range(n_vertices)]
    for fi, f in enumerate(faces):
        for a in f:
            inc[a].append(fi)
            nbr[a].update(int(b) for b in f if b != a)
    ring2 = []
    for i in range(n_vertices):
        r = set(nbr[i])
        for j in nbr[i]:
            r |= nbr[j]
        r.discard(i)
        ring2.append(sorted(r))
    return ring2, inc


def fit_vertex_curvature(mesh):
    space = mesh.space
    V = mesh.vertices
    faces = mesh.faces
    n = space.dim
    m = n - 1
    ring2, inc = _rings(len(V), faces)
    basis = space.orthonormal_tangent_basis(V)  # (V, n, D)
    sig = space.metric_signature
    normals = np.empty((len(V), V.shape[1]))
    frames = np.empty((len(V), m, V.shape[1]))
    shape = np.empty((len(V), m, m))
    resid = np.empty(len(V))
    for i in range(len(V)):
        idx = ring2[i]
        B = basis[i]
        local = np.einsum("kd,jd,d->jk", B, space.log_map(V[i], V[idx]), sig)  # (J, n)
        pos = {v: j for j, v in enumerate(idx)}
        # initial normal from incident faces, area weighted
        n0 = np.zeros(n)
        for fi in inc[i]:
            f = list(faces[fi])
            r = f.index(i)
            f = f[r:] + f[:r]
            if n == 3:
                n0 += np.cross(local[pos[f[1]]], local[pos[f[2]]])
            else:
                d = local[pos[f[1]]] if r == 0 else -local[pos[f[1]]]
                n0 += np.array([d[1], -d[0]]) / max(np.linalg.norm(d), 1e-300)
        n0 /= np.linalg.norm(n0)
        # tangent frame orthogonal to n0
        if n == 3:
            t1 = np.cross(n0, [1.0, 0, 0] if abs(n0[0]) < 0.9 else [0, 1.0, 0])
            t1 /= np.linalg.norm(t1)
            t2 = np.cross(n0, t1)
            T = np.stack([t1, t2])
        else:
            T = np.array([[-n0[1], n0[0]]])
        xy = local @ T.T
        z = local @ n0
        if n == 3:
            x, y = xy[:, 0], xy[:, 1]
            A = np.stack([x * x, x * y, y * y, x, y], axis=1)
        else:
            x = xy[:, 0]
            A = np.stack([x * x, x], axis=1)
        coef, *_ = np.linalg.lstsq(A, z, rcond=None)
        resid[i] = np.sqrt(np.mean((A @ coef - z) ** 2))
        if n == 3:
            a, b, c, d, e = coef
            grad = np.array([d, e])
            H = np.array([[2 * a, b], [b, 2 * c]])
        else:
            a, d = coef
            grad = np.array([d])
            H = np.array([[2 * a]])
        w = np.sqrt(1.0 + grad @ grad)
        Tg = T + grad[:, None] * n0[None, :]  # graph tangents
        I1 = Tg @ Tg.T
        L = np.linalg.cholesky(I1)
        Linv = np.linalg.inv(L)
        E = Linv @ Tg
        S = -Linv @ H @ Linv.T / w
        nf = n0 - grad @ T
        nf /= np.linalg.norm(nf)
        normals[i] = nf @ B
        frames[i] = E @ B
        shape[i] = 0.5 * (S + S.T)
    return VertexFit(normals, frames, shape, resid)


def mesh_nodes(mesh, order=1):
    """Face quadrature with interpolated vertex shape operators."""
    space = mesh.space
    m = mesh.m
    sig = space.metric_signature
    u, w = quad.triangle(order) if m == 2 else quad.segment(order)
    Vf = mesh.vertices[mesh.faces]
    X, dX = simplex_frames(space, Vf, u)               # (F, q, D), (F, q, m, D)
    F, q, D = X.shape
    X = X.reshape(F * q, D)
    dX = dX.reshape(F * q, m, D)
    g = np.einsum("nid,njd,d->nij", dX, dX, sig)
    sqrtg = np.sqrt(np.linalg.det(g))
    Linv = np.linalg.inv(np.linalg.cholesky(g))
    E = np.einsum("naj,njd->nad", Linv, dX)
    nrm = np.repeat(mesh.face_normals, q, axis=0)
    lam = np.concatenate([1.0 - u.sum(axis=1, keepdims=True), u], axis=1)  # (q, m+1)
    fit = mesh.fit
    S = np.zeros((F * q, m, m))
    fidx = np.repeat(np.arange(F), q)
    lam_all = np.tile(lam, (F, 1))
    for k in range(m + 1):
        vid = mesh.faces[fidx, k]
        Ek = E
        if space.is_hyperbolic:
            Ek = np.stack([space.parallel_transport(X, mesh.vertices[vid], E[:, a])
                           for a in range(m)], axis=1)
        C = np.einsum("nad,d,ncd->nac", fit.frames[vid], sig, Ek)
        S += lam_all[:, k, None, None] * np.einsum("nac,nab,nbd->ncd", C, fit.shape[vid], C)
    S = mesh.orientation * 0.5 * (S + np.swapaxes(S, 1, 2))
    weights = np.tile(w, F) * sqrtg
    return NodeSet(space, X, mesh.orientation * nrm, weights, S, E, fidx, np.tile(u, (F, 1)),
                   np.full(F * q, float(mesh.orientation)), order=order)
