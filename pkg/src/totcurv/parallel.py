"""Outer parallel hypersurfaces and quantities along the normal flow.

Gamma^t is obtained by flowing every point along its normal geodesic for
time t. In curvature -c the principal curvatures obey the Riccati equation
kappa' = c - kappa^2, solved in closed form by :func:`parallel_curvatures`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature as quad
from .curvature import curvature_profile, total_mean_curvature
from .errors import FlowSingularityError

DEFAULT_EPS0 = 0.1
DEFAULT_LEVELS = 6
MONOTONE_TOL = 1e-6


def _flow_factor(space, kappas, t):
    """Jacobi factor of each principal direction; must stay positive."""
    if not space.is_hyperbolic:
        return 1.0 + t * kappas
    s = space.s
    return np.cosh(s * t) + kappas * np.sinh(s * t) / s


def parallel_curvatures(kappas, t, space):
    """Principal curvatures after flowing a distance t along the normal.

    Euclidean: kappa / (1 + t kappa). Curvature -c (s = sqrt c):
    (kappa cosh st + s sinh st) / (cosh st + kappa sinh(st) / s).
    """
    k = np.asarray(kappas, dtype=float)
    den = _flow_factor(space, k, t)
    if np.any(den <= 0):
        raise FlowSingularityError(f"normal flow reaches a focal point before t = {t:g}")
    if not space.is_hyperbolic:
        return k / den
    s = space.s
    return (k * np.cosh(s * t) + s * np.sinh(s * t)) / den


def check_flow(surface, t, order=16):
    """Raise :class:`FlowSingularityError` if the flow up to t is singular."""
    if t < 0:
        raise FlowSingularityError("inner parallel surfaces are not supported (t < 0)")
    if t == 0 or getattr(surface, "singular", False) or surface.convex:
        return
    k = surface.nodes(order).kappas
    if np.any(_flow_factor(surface.space, k, t) <= 0):
        raise FlowSingularityError(f"flow distance {t:g} exceeds the focal distance")


def parallel_surface(surface, eps, check=True):
    """Outer parallel hypersurface at distance ``eps`` (exp_map along nu)."""
    if check:
        check_flow(surface, eps)
    if eps == 0:
        return surface
    return surface.parallel(eps)


# ---------------------------------------------------------------------------
# limit definition

@dataclass
class LimitResult:
    value: float
    error: float
    epsilons: np.ndarray
    table: np.ndarray
    monotone: bool

    def __float__(self):
        return float(self.value)


def _neville_at_zero(x, y):
    """Value at 0 of the interpolating polynomial through (x, y)."""
    p = list(map(float, y))
    x = list(map(float, x))
    n = len(x)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
    return p[0]


def default_epsilons(eps0=DEFAULT_EPS0, levels=DEFAULT_LEVELS):
    return eps0 * 0.5 ** np.arange(levels)


def limit_total_curvature(surface, r, epsilons=None, order=None, tol=MONOTONE_TOL):
    """M_r(Gamma) as the limit of M_r(Gamma^eps) for eps -> 0.

    The values on a geometric grid are extrapolated to eps = 0 with Richardson
    (polynomial) extrapolation; the error estimate is the change from
    dropping the largest eps. ``monotone`` reports whether the table is
    nondecreasing in eps up to ``tol`` (relative).
    """
    eps = np.asarray(default_epsilons() if epsilons is None else epsilons, dtype=float)
    if np.any(np.diff(eps) >= 0) or np.any(eps <= 0):
        raise ValueError("epsilons must be positive and strictly decreasing")
    vals = np.array([float(total_mean_curvature(parallel_surface(surface, e, check=False), r,
                                                order)) for e in eps])
    value = _neville_at_zero(eps, vals)
    err = abs(value - _neville_at_zero(eps[1:], vals[1:])) if len(eps) > 2 else abs(vals[-1] - value)
    scale = max(np.max(np.abs(vals)), 1e-300)
    monotone = bool(np.all(np.diff(vals) <= tol * scale))
    return LimitResult(value, err, eps, vals, monotone)


# ---------------------------------------------------------------------------
# comparison bound along the flow

@dataclass
class BoundCheck:
    r: int
    epsilon: float
    lhs: float
    rhs: float
    passed: bool
    rhs_derivative: float  # bound from the exact first variation (see docs)
    passed_derivative: bool
    curvature_bound: float


def _profile(surface, order):
    import warnings
    from .errors import AccuracyWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        return curvature_profile(surface, order).values


ROUNDOFF = 1e-12


def comparison_bound_check(surface, eps, r, order=None, tol=1e-6, base_profile=None):
    """Check |M_r(Gamma^eps) - M_r(Gamma)| <= ((r+1) M_{r+1} + C M_{r-1})(Gamma^eps) eps.

    C is the sup of |sectional curvature| (0 or c), M_n = M_{-1} = 0. Also
    reported: the bound with C M_{r-1} weighted by (n - r), which is what the
    first variation d/dt M_r = (r+1) M_{r+1} + c (n-r) M_{r-1} gives.
    Both comparisons allow ROUNDOFF * |M_r| of absolute slack, since with
    rhs = 0 (M_{n-1} of euclidean convex surfaces) lhs is pure rounding.
    """
    n = surface.n
    base = base_profile if base_profile is not None else _profile(surface, order)
    C = surface.space.curvature_bound()
    if eps == 0:
        return BoundCheck(r, 0.0, 0.0, 0.0, True, 0.0, True, C)
    prof = _profile(parallel_surface(surface, eps, check=False), order)

    def M(k):
        return prof[k] if 0 <= k <= n - 1 else 0.0

    lhs = abs(prof[r] - base[r])
    rhs = ((r + 1) * M(r + 1) + C * M(r - 1)) * eps
    rhs_d = ((r + 1) * M(r + 1) + C * (n - r) * M(r - 1)) * eps
    slack = ROUNDOFF * max(abs(prof[r]), abs(base[r]))
    return BoundCheck(r, float(eps), lhs, rhs, lhs <= rhs * (1 + tol) + slack, rhs_d,
                      lhs <= rhs_d * (1 + tol) + slack, C)


# ---------------------------------------------------------------------------
# tube integrals and sweeps

@dataclass
class TubeIntegral:
    value: float
    error: float

    def __float__(self):
        return float(self.value)


def tube_integral(surface, eps, r, order=None, points=8):
    """Integral of M_r(Gamma^t) over t in [0, eps] by Gauss-Legendre in t
    (``points`` nodes, error from a rule with half as many)."""
    if eps == 0:
        return TubeIntegral(0.0, 0.0)
    check_flow(surface, eps)
    cache = {}

    def M(t):
        if t not in cache:
            cache[t] = float(total_mean_curvature(parallel_surface(surface, t, check=False), r,
                                                  order))
        return cache[t]

    def rule(k):
        t, w = quad.gauss_legendre(k, 0.0, eps)
        return math.fsum(wi * M(ti) for ti, wi in zip(t, w))

    fine = rule(points)
    coarse = rule(max(points // 2, 2))
    return TubeIntegral(fine, abs(fine - coarse))


@dataclass
class ParallelSweep:
    surface_id: str
    epsilons: np.ndarray
    profiles: list
    reach: list
    tubes: list = field(default_factory=list)  # per eps: list of tube integrals per r

    CSV_COLUMNS = ("surface_id", "epsilon", "r", "M_r", "certified_reach", "tube_integral")

    def __post_init__(self):
        e = np.asarray(self.epsilons, dtype=float)
        if np.any(np.diff(e) <= 0) or np.any(e < 0):
            raise ValueError("epsilon grid must be nonnegative and strictly increasing")
        if len(self.profiles) != len(e):
            raise ValueError("one profile per grid point required")

    def table(self, r):
        return np.array([p[r] for p in self.profiles])

    def monotone(self, r, tol=MONOTONE_TOL):
        v = self.table(r)
        scale = max(np.max(np.abs(v)), 1e-300) if len(v) else 1.0
        return bool(np.all(np.diff(v) >= -tol * scale))

    def to_csv(self, fh=None):
        own = fh is None
        fh = fh or io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for i, e in enumerate(self.epsilons):
            for r, v in enumerate(self.profiles[i]):
                tube = self.tubes[i][r] if self.tubes else float("nan")
                w.writerow([self.surface_id, repr(float(e)), r, repr(float(v)),
                            repr(float(self.reach[i])), repr(float(tube))])
        return fh.getvalue() if own else None


def parallel_sweep(surface, epsilons, order=None, reach=True, tubes=False, density=32):
    """Profiles of Gamma^eps over an increasing eps grid.

    With ``reach`` each Gamma^eps (eps > 0) gets a double-ball certificate
    at trial radius eps; with ``tubes`` the tube integrals over [0, eps]
    are added per r.
    """
    from .distance import estimate_reach
    eps = np.asarray(epsilons, dtype=float)
    profiles, reaches, tube_rows = [], [], []
    for e in eps:
        s = parallel_surface(surface, float(e))
        profiles.append(list(_profile(s, order)))
        if reach and e > 0:
            reaches.append(estimate_reach(s, float(e), density=density).certified)
        else:
            reaches.append(float("nan"))
        if tubes:
            tube_rows.append([float(tube_integral(surface, float(e), r, order))
                              for r in range(surface.n)])
    return ParallelSweep(surface.label, eps, profiles, reaches, tube_rows)
