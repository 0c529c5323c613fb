"""Reference values computed independently of the package.

Each oracle uses only mpmath / scipy and textbook formulas. The FROZEN
table holds their values at the time they were derived; ``test_oracles``
recomputes every entry so drift in either direction is caught.
"""

import math

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

mp.mp.dps = 30


def hyperbolic_sphere_profile(R):
    # geodesic sphere in H^3: area 4 pi sinh^2 R, principal curvatures coth R
    area = 4 * mp.pi * mp.sinh(R) ** 2
    k = mp.coth(R)
    return [float(area), float(area * 2 * k), float(area * k * k)]


def hyperbolic_circle_profile(R):
    return [float(2 * mp.pi * mp.sinh(R)), float(2 * mp.pi * mp.cosh(R))]


def hyperbolic_shell_volume(r0, r1):
    # coarea over geodesic spheres
    return float(mp.quad(lambda t: 4 * mp.pi * mp.sinh(t) ** 2, [r0, r1]))


def riccati_transport(k0, t, c=1.0):
    # kappa' = c - kappa^2 along the outward normal flow
    sol = solve_ivp(lambda _, y: [c - y[0] ** 2], (0.0, t), [k0], rtol=1e-12, atol=1e-14)
    return float(sol.y[0, -1])


def ellipsoid_profile(a, b, c):
    """M_0, M_1, M_2 of the euclidean ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1
    from the implicit-surface formulas for mean and Gauss curvature."""
    from scipy.integrate import dblquad

    def integrand(ph, th, r):
        st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
        x, y, z = a * st * cp, b * st * sp, c * ct
        xt = np.array([a * ct * cp, b * ct * sp, -c * st])
        xp = np.array([-a * st * sp, b * st * cp, 0.0])
        dA = np.linalg.norm(np.cross(xt, xp))
        if r == 0:
            return dA
        if r == 2:
            p2 = x * x / a ** 4 + y * y / b ** 4 + z * z / c ** 4
            return dA / ((a * b * c) ** 2 * p2 ** 2)
        return 2 * _ellipsoid_mean(a, b, c, x, y, z) * dA

    return [dblquad(integrand, 0, math.pi, 0, 2 * math.pi, args=(r,), epsabs=1e-13,
                    epsrel=1e-13)[0] for r in range(3)]


def _ellipsoid_mean(a, b, c, x, y, z):
    # H = |grad F|^-3 (grad F^T Hess F grad F - |grad F|^2 tr Hess F) / 2 with
    # F = x^2/a^2 + y^2/b^2 + z^2/c^2, sign chosen positive for the outward normal
    g = [2 * x / a ** 2, 2 * y / b ** 2, 2 * z / c ** 2]
    Hd = [2 / a ** 2, 2 / b ** 2, 2 / c ** 2]
    ng2 = sum(v * v for v in g)
    quad_form = sum(gi * gi * hi for gi, hi in zip(g, Hd))
    return (ng2 * sum(Hd) - quad_form) / (2 * ng2 ** 1.5)


def tetrahedron_mean_limit(edge):
    # M_1 of a polytope: sum of edge length times exterior dihedral angle
    return float(6 * edge * (mp.pi - mp.acos(mp.mpf(1) / 3)))


def hyperbolic_triangle_area(A, B, C):
    """Area pi - (sum of angles) of a geodesic triangle with vertices on the
    hyperboloid (c = 1), angles from tangent vectors of the sides."""
    def minner(u, v):
        return -u[0] * v[0] + sum(u[i] * v[i] for i in range(1, len(u)))

    def angle(P, Q, R):
        def tangent(P, Q):
            lam = -minner(P, Q)
            v = [Q[i] - lam * P[i] for i in range(len(P))]
            nv = mp.sqrt(minner(v, v))
            return [x / nv for x in v]
        u, v = tangent(P, Q), tangent(P, R)
        return mp.acos(max(-1, min(1, minner(u, v))))

    P = [[mp.mpf(x) for x in p] for p in (A, B, C)]
    return float(mp.pi - angle(P[0], P[1], P[2]) - angle(P[1], P[2], P[0]) - angle(P[2], P[0], P[1]))


KLEIN_TETRA = [[0.3, 0.0, 0.0], [-0.2, 0.3, 0.0], [-0.1, -0.3, 0.1], [0.0, 0.05, 0.4]]


def klein_to_hyperboloid(k):
    k = np.asarray(k, dtype=float)
    w = 1.0 / np.sqrt(1.0 - np.sum(k * k))
    return np.concatenate([[w], w * k])


def hyperbolic_tetra_area(klein_points):
    P = [klein_to_hyperboloid(k) for k in klein_points]
    return sum(hyperbolic_triangle_area(P[i], P[j], P[k])
               for i, j, k in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)))


FROZEN = {
    "h3_sphere_R1": [17.355387381771436, 45.576472051551505, 29.92175799613061],
    "h2_circle_R1": [7.384006872882646, 9.695461572464488],
    "h3_shell_1_1p2": 4.521910466198936,
    "riccati_coth1_t0p5": 1.104791392982672,
    "ellipsoid_211": [21.478435327883734, 34.68753081338021, 12.566370614359174],
    "tetra_edge_2sqrt2_M1": 32.42452122508992,
    "h3_klein_tetra_area": 0.517573274611775,
}


def compute_all():
    return {
        "h3_sphere_R1": hyperbolic_sphere_profile(1),
        "h2_circle_R1": hyperbolic_circle_profile(1),
        "h3_shell_1_1p2": hyperbolic_shell_volume(1, 1.2),
        "riccati_coth1_t0p5": riccati_transport(float(mp.coth(1)), 0.5),
        "ellipsoid_211": ellipsoid_profile(2, 1, 1),
        "tetra_edge_2sqrt2_M1": tetrahedron_mean_limit(2 * math.sqrt(2)),
        "h3_klein_tetra_area": hyperbolic_tetra_area(KLEIN_TETRA),
    }


if __name__ == "__main__":
    for k, v in compute_all().items():
        print(repr(k), ":", repr(v))
