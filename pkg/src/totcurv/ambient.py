"""Constant-curvature model spaces: euclidean R^n and hyperbolic H^n.

Hyperbolic space of curvature -c is realized in the hyperboloid model

    H^n = {x in R^{n,1} : <x, x> = -1/c, x_0 > 0},

with the Minkowski product <a, b> = -a_0 b_0 + a_1 b_1 + ... + a_n b_n.
All operations are vectorized over leading axes; coordinates live on the
last axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointError

POINT_TOL = 1e-9


@dataclass(frozen=True)
class AmbientSpace:
    """A euclidean or hyperbolic model space.

    Parameters
    ----------
    kind : {"euclidean", "hyperbolic"}
    dim : int
        Ambient dimension n (2 or 3).
    curvature_scale : float
        c >= 0; sectional curvature is identically -c. Forced to 0 for
        euclidean spaces.
    """

    kind: str = "euclidean"
    dim: int = 3
    curvature_scale: float = 0.0

    def __post_init__(self):
        if self.kind not in ("euclidean", "hyperbolic"):
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        if self.dim not in (2, 3):
            raise ValueError("ambient dimension must be 2 or 3")
        if self.kind == "euclidean" and self.curvature_scale != 0.0:
            raise ValueError("euclidean space has curvature_scale 0")
        if self.kind == "hyperbolic" and not self.curvature_scale > 0:
            raise ValueError("hyperbolic space needs curvature_scale > 0")

    @classmethod
    def euclidean(cls, dim=3):
        return cls("euclidean", dim, 0.0)

    @classmethod
    def hyperbolic(cls, dim=3, c=1.0):
        return cls("hyperbolic", dim, float(c))

    @property
    def is_hyperbolic(self):
        return self.kind == "hyperbolic"

    @property
    def c(self):
        return self.curvature_scale

    @property
    def s(self):
        """Square root of the curvature scale (inverse curvature radius)."""
        return math.sqrt(self.curvature_scale)

    @property
    def coord_dim(self):
        return self.dim + 1 if self.is_hyperbolic else self.dim

    @property
    def metric_signature(self):
        sig = np.ones(self.coord_dim)
        if self.is_hyperbolic:
            sig[0] = -1.0
        return sig

    def describe(self):
        if self.is_hyperbolic:
            return f"H{self.dim}(c={self.c:g})"
        return f"R{self.dim}"

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "c": self.curvature_scale}

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind", "euclidean")
        dim = int(d.get("dim", 3))
        if kind == "hyperbolic":
            return cls.hyperbolic(dim, float(d.get("c", 1.0)))
        return cls.euclidean(dim)

    # -- metric -----------------------------------------------------------

    def inner(self, a, b):
        """Ambient inner product (Minkowski for the hyperboloid model)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.is_hyperbolic:
            return np.sum(a[..., 1:] * b[..., 1:], axis=-1) - a[..., 0] * b[..., 0]
        return np.sum(a * b, axis=-1)

    def norm(self, v):
        return np.sqrt(np.maximum(self.inner(v, v), 0.0))

    def origin(self):
        o = np.zeros(self.coord_dim)
        if self.is_hyperbolic:
            o[0] = 1.0 / self.s
        return o

    def unit_timelike(self, x):
        """Unit future-pointing timelike vector along x (hyperbolic only)."""
        return np.asarray(x, dtype=float) * self.s

    def project(self, x):
        """Renormalize points onto the model (no-op in euclidean space)."""
        x = np.asarray(x, dtype=float)
        if not self.is_hyperbolic:
            return x
        q = -self.inner(x, x)
        return x / np.sqrt(self.c * q)[..., None]

    def check_points(self, x, tol=POINT_TOL):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.coord_dim:
            raise InvalidPointError(
                f"expected {self.coord_dim} coordinates, got {x.shape[-1]}")
        if not np.all(np.isfinite(x)):
            raise InvalidPointError("non-finite coordinates")
        if self.is_hyperbolic:
            dev = np.abs(self.c * self.inner(x, x) + 1.0)
            if np.any(dev > tol * np.maximum(1.0, self.c * np.sum(x * x, axis=-1))) \
                    or np.any(x[..., 0] <= 0):
                raise InvalidPointError("point is off the hyperboloid sheet")
        return x

    def tangent_project(self, x, v):
        """Orthogonal projection of a coordinate vector onto T_x M."""
        v = np.asarray(v, dtype=float)
        if not self.is_hyperbolic:
            return v
        return v + self.c * self.inner(x, v)[..., None] * x

    def distance(self, p, q):
        p = self.check_points(p)
        q = self.check_points(q)
        if not self.is_hyperbolic:
            return np.linalg.norm(p - q, axis=-1)
        return self._hyp_distance(p, q)

    def _hyp_distance(self, p, q):
        # arccosh loses half the digits near 1; use the chord form instead.
        d = p - q
        chord2 = np.maximum(self.inner(d, d), 0.0) * self.c
        return 2.0 * np.arcsinh(0.5 * np.sqrt(chord2)) / self.s

    def exp_map(self, p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if not self.is_hyperbolic:
            return p + v
        nv = self.norm(v)[..., None]
        t = self.s * nv
        # sinh(t)/t -> 1 as t -> 0
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(t > 1e-8, np.sinh(t) / np.where(t > 0, t, 1.0), 1.0 + t * t / 6)
        return self.project(np.cosh(t) * p + ratio * v)

    def log_map(self, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if not self.is_hyperbolic:
            return q - p
        u = q + self.c * self.inner(p, q)[..., None] * p
        nu = self.norm(u)[..., None]
        d = self._hyp_distance(p, q)[..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(nu > 1e-300, d / np.where(nu > 0, nu, 1.0), 1.0)
        return u * scale

    def geodesic_coefficients(self, t):
        """Coefficients (a, b, da, db) with gamma(t) = a x + b v and
        gamma'(t) = da x + db v for a unit-speed geodesic from x along v."""
        t = np.asarray(t, dtype=float)
        if not self.is_hyperbolic:
            return np.ones_like(t), t, np.zeros_like(t), np.ones_like(t)
        s = self.s
        return np.cosh(s * t), np.sinh(s * t) / s, s * np.sinh(s * t), np.cosh(s * t)

    def parallel_transport(self, p, q, v):
        """Transport tangent vectors v at p to q along the geodesic."""
        v = np.asarray(v, dtype=float)
        if not self.is_hyperbolic:
            return v
        alpha = self.c * self.inner(q, v) / (1.0 - self.c * self.inner(p, q))
        return v + alpha[..., None] * (np.asarray(p) + np.asarray(q))

    def transport_matrix(self, p, q):
        """Linear map of parallel transport p -> q as a coordinate matrix."""
        m = np.eye(self.coord_dim)
        if not self.is_hyperbolic:
            return m
        jq = q * self.metric_signature
        alpha = self.c / (1.0 - self.c * self.inner(p, q))
        return m + alpha * np.outer(p + q, jq)

    def oriented_volume(self, x, vectors):
        """Oriented n-volume of n tangent vectors at x.

        ``vectors`` has shape (..., n, coord_dim). In the hyperboloid model
        the unit timelike vector at x is prepended, so a positively oriented
        orthonormal frame at the origin has volume +1.
        """
        vectors = np.asarray(vectors, dtype=float)
        if self.is_hyperbolic:
            xh = self.unit_timelike(np.broadcast_to(x, vectors.shape[:-2] + (self.coord_dim,)))
            vectors = np.concatenate([xh[..., None, :], vectors], axis=-2)
        return np.linalg.det(vectors)

    def orthonormal_tangent_basis(self, x):
        """An orthonormal basis of T_x M, shape (..., n, coord_dim).

        The basis is positively oriented in the sense of ``oriented_volume``.
        """
        x = np.asarray(x, dtype=float)
        if not self.is_hyperbolic:
            return np.broadcast_to(np.eye(self.dim), x.shape[:-1] + (self.dim, self.dim)).copy()
        basis = []
        for k in range(1, self.coord_dim):
            e = np.zeros(x.shape)
            e[..., k] = 1.0
            e = self.tangent_project(x, e)
            for b in basis:
                e = e - self.inner(e, b)[..., None] * b
            e = e / self.norm(e)[..., None]
            basis.append(e)
        return np.stack(basis, axis=-2)

    def curvature_bound(self, region=None):
        """sup |K| over a region; exact for constant-curvature models."""
        return float(self.curvature_scale)

    # -- model conversions ------------------------------------------------

    def from_klein(self, k):
        """Map points of the Klein ball (|k| < 1) onto the hyperboloid."""
        k = np.asarray(k, dtype=float)
        r2 = np.sum(k * k, axis=-1)
        if np.any(r2 >= 1.0):
            raise InvalidPointError("Klein coordinates must lie in the open unit ball")
        lam = 1.0 / np.sqrt(1.0 - r2)
        x = np.concatenate([lam[..., None], lam[..., None] * k], axis=-1)
        return x / self.s

    def to_klein(self, x):
        x = np.asarray(x, dtype=float)
        return x[..., 1:] / x[..., :1]

    def point_at_polar(self, radius, direction):
        """exp of a tangent vector at the origin given in R^n coordinates."""
        direction = np.asarray(direction, dtype=float)
        v = radius * direction
        if not self.is_hyperbolic:
            return v
        v = np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)
        return self.exp_map(self.origin(), v)


def unit_sphere_volume(n):
    """Volume of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    if int(n) != n or n < 2:
        raise ValueError("unit_sphere_volume needs an integer n >= 2")
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def distance(space, p, q):
    return space.distance(p, q)


def exp_map(space, p, v):
    return space.exp_map(p, v)


def curvature_bound(space, region=None):
    return space.curvature_bound(region)
