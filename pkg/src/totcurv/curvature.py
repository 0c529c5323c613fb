"""Total mean curvatures M_r and the Gauss-form pullback.

M_r(G) is the integral over G of sigma_r(kappa), the r-th elementary
symmetric polynomial of the principal curvatures (sigma_0 = 1, sigma_r = 0
for r < 0 or r > n-1).

:func:`gauss_form_pullback` computes M_{n-1} a second way, without any
shape operator: the normal field is differentiated along the chart, the
derivatives are projected onto the vertical (fiber) directions of the unit
tangent bundle, and the volume form of the unit tangent sphere is applied
to them.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyWarning
from .surfaces import MeshSurface

CONVERGENCE_TOL = 1e-8


def sigma_r(kappas, r):
    """Elementary symmetric polynomial sigma_r of the last axis of ``kappas``.

    Uses the coefficient recurrence of prod_i (1 + t kappa_i), which is
    exact for the small sizes here and needs no subset enumeration.
    """
    k = np.asarray(kappas, dtype=float)
    m = k.shape[-1] if k.ndim else 0
    if r < 0 or r > m:
        return np.zeros(k.shape[:-1]) if k.ndim > 1 else 0.0
    coeffs = all_sigmas(k)
    out = coeffs[..., r]
    return float(out) if np.ndim(out) == 0 else out


def all_sigmas(kappas):
    """(sigma_0, ..., sigma_m) along a new last axis."""
    k = np.asarray(kappas, dtype=float)
    m = k.shape[-1]
    e = np.zeros(k.shape[:-1] + (m + 1,))
    e[..., 0] = 1.0
    for i in range(m):
        ki = k[..., i:i + 1]
        e[..., 1:] = e[..., 1:] + ki * e[..., :-1]
    return e


def _fsum(x):
    return math.fsum(np.asarray(x, dtype=float).ravel().tolist())


@dataclass
class TotalCurvature:
    """Value of M_r with a two-level quadrature error estimate."""

    value: float
    error: float
    r: int
    order: int
    converged: bool = True

    def __float__(self):
        return float(self.value)


@dataclass
class CurvatureProfile:
    surface_id: str
    n: int
    values: list
    errors: list
    order: int
    converged: list = field(default_factory=list)

    CSV_COLUMNS = ("surface_id", "n", "r", "value", "error_estimate", "quadrature_order")

    def __getitem__(self, r):
        return self.values[r]

    def __len__(self):
        return len(self.values)

    def as_array(self):
        return np.array(self.values)

    def rows(self):
        return [(self.surface_id, self.n, r, v, e, self.order)
                for r, (v, e) in enumerate(zip(self.values, self.errors))]

    def to_csv(self, fh=None, header=True):
        own = fh is None
        fh = fh or io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(self.CSV_COLUMNS)
        for row in self.rows():
            w.writerow([row[0], row[1], row[2], repr(float(row[3])), repr(float(row[4])), row[5]])
        return fh.getvalue() if own else None


def _coarse_order(surface, order):
    if isinstance(surface, MeshSurface):
        return 2 if order <= 1 else max(order // 2, 1)
    return max((2 * order) // 3, 4)


def _profile_values(nodes):
    sig = all_sigmas(nodes.kappas)  # (N, m+1)
    return [_fsum(nodes.weights * sig[:, r]) for r in range(sig.shape[1])]


def curvature_profile(surface, order=None, tol=CONVERGENCE_TOL):
    """All totals (M_0, ..., M_{n-1}) from one quadrature pass plus a coarser
    pass for the error estimate."""
    if getattr(surface, "singular", False):
        from .parallel import limit_total_curvature
        vals, errs = [], []
        for r in range(surface.n):
            lim = limit_total_curvature(surface, r, order=order)
            vals.append(lim.value)
            errs.append(lim.error)
        return CurvatureProfile(surface.label, surface.n, vals, errs, int(order or surface.default_order),
                                [True] * surface.n)
    order = int(order or surface.default_order)
    fine = _profile_values(surface.nodes(order))
    coarse = _profile_values(surface.nodes(_coarse_order(surface, order)))
    errs = [abs(a - b) for a, b in zip(fine, coarse)]
    scale = max(abs(fine[0]), 1e-300)
    conv = [e <= tol * max(abs(v), scale) for v, e in zip(fine, errs)]
    if not all(conv):
        warnings.warn(f"quadrature not converged on {surface.label} at order {order}",
                      AccuracyWarning, stacklevel=2)
    return CurvatureProfile(surface.label, surface.n, fine, errs, order, conv)


def total_mean_curvature(surface, r, order=None, tol=CONVERGENCE_TOL):
    """M_r(surface) as a :class:`TotalCurvature` (use ``float()`` for the value)."""
    if r < 0 or r > surface.n - 1:
        return TotalCurvature(0.0, 0.0, r, int(order or 0))
    if getattr(surface, "singular", False) and r >= 1:
        from .parallel import limit_total_curvature
        lim = limit_total_curvature(surface, r, order=order)
        return TotalCurvature(lim.value, lim.error, r, int(order or surface.default_order))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        prof = curvature_profile(surface, order, tol)
    tc = TotalCurvature(prof.values[r], prof.errors[r], r, prof.order, prof.converged[r])
    if not tc.converged:
        warnings.warn(f"M_{r} not converged on {surface.label}", AccuracyWarning, stacklevel=2)
    return tc


# ---------------------------------------------------------------------------
# Gauss form

@dataclass
class FormPullback:
    value: float
    nodes_used: int
    nodes_skipped: int

    def __float__(self):
        return float(self.value)

    @property
    def coverage(self):
        total = self.nodes_used + self.nodes_skipped
        return self.nodes_used / total if total else 0.0


_FD5 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))


def _vertical_volume(space, X, nu, dnu):
    """Fiber volume form of the unit tangent sphere at nu applied to the
    vertical projections of the normal derivatives."""
    sig = space.metric_signature
    proj = dnu - np.einsum("nid,nd,d->ni", dnu, nu, sig)[:, :, None] * nu[:, None, :]
    proj = np.stack([space.tangent_project(X, proj[:, i]) for i in range(proj.shape[1])], axis=1)
    return space.oriented_volume(X, np.concatenate([nu[:, None, :], proj], axis=1))


def gauss_form_pullback(surface, order=None, step=1e-4):
    """Integral of the pulled-back Gauss form, an independent route to M_{n-1}.

    Parametric surfaces: the normal field is differentiated by a five-point
    central difference in each chart parameter and integrated against the
    parameter measure, signed by the chart orientation. Meshes: fitted vertex
    normals span spherical simplices (solid angles) per face.
    """
    if isinstance(surface, MeshSurface):
        return _mesh_gauss_form(surface)
    space = surface.space
    order = int(order or surface.default_order)
    total = []
    used = skipped = 0
    for chart in surface.charts():
        u, w = chart.rule(order)
        fr = chart.frame(u)
        nu = surface.orientation * fr.nu
        dnu = np.zeros((len(u), chart.m, space.coord_dim))
        for i in range(chart.m):
            for k, c in _FD5:
                du = np.zeros_like(u)
                du[:, i] = k * step
                dnu[:, i] += c * chart.frame(u + du).nu
            dnu[:, i] *= surface.orientation / (12.0 * step)
        vol = _vertical_volume(space, fr.X, nu, dnu)
        psign = np.sign(space.oriented_volume(fr.X, np.concatenate([nu[:, None, :], fr.dX], axis=1)))
        vals = w * vol * psign
        ok = np.isfinite(vals) & (psign != 0)
        used += int(ok.sum())
        skipped += int((~ok).sum())
        total.append(vals[ok])
    return FormPullback(_fsum(np.concatenate(total)) if total else 0.0, used, skipped)


def _mesh_gauss_form(mesh):
    space = mesh.space
    from .meshcurv import simplex_frames
    m = mesh.m
    Vf = mesh.vertices[mesh.faces]
    Xc, _ = simplex_frames(space, Vf, np.full((1, m), 1.0 / (m + 1)))
    Xc = Xc[:, 0]
    N = mesh.orientation * mesh.fit.normals[mesh.faces]  # (F, m+1, D)
    if space.is_hyperbolic:
        N = np.stack([space.parallel_transport(Vf[:, k], Xc, N[:, k]) for k in range(m + 1)], axis=1)
    B = space.orthonormal_tangent_basis(Xc)  # (F, n, D)
    C = np.einsum("fkd,fad,d->fka", N, B, space.metric_signature)  # coordinates
    C /= np.linalg.norm(C, axis=2, keepdims=True)
    if m == 2:
        a, b, c = C[:, 0], C[:, 1], C[:, 2]
        num = np.einsum("fi,fi->f", a, np.cross(b, c))
        den = 1 + np.einsum("fi,fi->f", a, b) + np.einsum("fi,fi->f", b, c) + np.einsum("fi,fi->f", c, a)
        ang = 2 * np.arctan2(num, den)
    else:
        a, b = C[:, 0], C[:, 1]
        ang = np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0], np.einsum("fi,fi->f", a, b))
    ok = np.isfinite(ang)
    return FormPullback(mesh.orientation * _fsum(ang[ok]), int(ok.sum()), int((~ok).sum()))
