"""Scenario-driven convergence and monotonicity experiments.

A :class:`Scenario` is plain json-compatible data; running it yields a
:class:`Report` whose verdicts are computed only from its own table, so a
saved report can be re-judged without recomputation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .ambient import AmbientSpace
from .convex import hull_body, polytope_from_points, random_convex_body
from .curvature import curvature_profile
from .distance import enclosed_volume, estimate_reach, hausdorff_distance, region_volume
from .errors import AccuracyWarning, ConfigError, GeometryError, PreconditionError
from .parallel import limit_total_curvature, parallel_surface
from .surfaces import mesh_from_parametric, perturb, surface_from_spec

DEFAULT_TOLERANCES = {
    "monotone": 1e-6,        # relative decrease allowed in eps sweeps
    "ratio_factor": 10.0,    # max ratio <= factor * median ratio
    "final_rel": 1e-2,       # final |dM_r| / |M_r|
    "reach": 0.0,            # uniform reach bound to certify
    "decrease": 1e-12,       # relative slack for "|dM_r| decreases"
}


@dataclass
class Scenario:
    id: str
    kind: str                       # convergence | monotonicity | theorem2
    ambient: dict
    surface: dict                   # {"catalog": ..} | {"random": seed, ..} | {"hull": [[..]]}
    sequence: dict                  # {"mesh": [k..]} | {"perturbation": [a..]} | {"epsilons": [..]} | {"samples": [k..]}
    r_values: list = None
    tolerances: dict = field(default_factory=dict)
    order: int | None = None
    density: int = 32
    seed: int = 0
    out: str | None = None

    KINDS = ("convergence", "monotonicity", "theorem2")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        self.space = AmbientSpace.from_dict(self.ambient)
        if self.r_values is None:
            self.r_values = list(range(self.space.dim))
        if any(r < 0 or r >= self.space.dim for r in self.r_values):
            raise ConfigError("r values must lie in 0..n-1")
        if len(self.sequence) != 1:
            raise ConfigError("sequence needs exactly one generator")
        key, vals = next(iter(self.sequence.items()))
        if key not in ("mesh", "perturbation", "epsilons", "samples"):
            raise ConfigError(f"unknown sequence generator {key!r}")
        if not isinstance(vals, list) or not vals:
            raise ConfigError("sequence must be a nonempty list")
        if key == "epsilons" and (np.any(np.diff(vals) <= 0) or min(vals) < 0):
            raise ConfigError("epsilon grid must be nonnegative and strictly increasing")
        self.tol = {**DEFAULT_TOLERANCES, **self.tolerances}

    @classmethod
    def from_dict(cls, d):
        known = {k: d[k] for k in ("id", "kind", "ambient", "surface", "sequence", "r_values",
                                   "tolerances", "order", "density", "seed", "out") if k in d}
        return cls(**known)

    def to_dict(self):
        return {k: v for k, v in asdict(self).items()}


def load_scenario(path):
    with open(path) as fh:
        return Scenario.from_dict(json.load(fh))


@dataclass
class Report:
    scenario_id: str
    columns: tuple
    rows: list
    verdicts: dict
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.verdicts.values())

    def column(self, name, r=None):
        rows = self.rows if r is None else [row for row in self.rows if row["r"] == r]
        return np.array([row[name] for row in rows], dtype=float)

    def to_csv(self):
        fh = io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in self.columns])
        return fh.getvalue()

    def to_json(self):
        return json.dumps({"scenario": self.scenario_id, "columns": list(self.columns),
                           "rows": [[_jsonable(row[c]) for c in self.columns] for row in self.rows],
                           "verdicts": self.verdicts, "notes": self.notes},
                          sort_keys=True, indent=1)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


# ---------------------------------------------------------------------------
# building blocks

def _profile(surface, order=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        return curvature_profile(surface, order).values


def _base_surface(sc):
    spec = sc.surface
    if "catalog" in spec:
        return surface_from_spec({"catalog": spec["catalog"], "params": spec.get("params", {})},
                                 sc.space)
    if "random" in spec:
        return random_convex_body(sc.space, int(spec["random"]), int(spec.get("n_points", 12)),
                                  float(spec.get("radius", 0.8)),
                                  float(spec.get("eps0", 0.1))).boundary
    if "hull" in spec:
        return hull_body(np.array(spec["hull"], float), sc.space,
                         float(spec.get("eps0", 0.1))).boundary
    raise ConfigError("surface spec needs 'catalog', 'random' or 'hull'")


def _omega(a, b, order=None, seed=0):
    """|region between a and b|, choosing a method that fits the pair."""
    if a.radial is not None and b.radial is not None:
        return float(region_volume(a, b, "radial", order))
    for inner, outer in ((a, b), (b, a)):
        try:
            return float(region_volume(inner, outer, "flux"))
        except GeometryError:
            pass
    return float(region_volume(a, b, "monte-carlo", seed=seed))


def _delta_verdicts(rows, r_values, tol, targets, prefix=""):
    verdicts = {}
    for r in r_values:
        d = np.array([row["delta_M_r"] for row in rows if row["r"] == r])
        ratio = np.array([row["ratio"] for row in rows if row["r"] == r])
        scale = max(abs(targets[r]), 1e-300)
        verdicts[f"{prefix}decreasing_r{r}"] = bool(
            np.all(np.diff(d) <= tol["decrease"] * scale))
        verdicts[f"{prefix}final_r{r}"] = bool(d[-1] / scale < tol["final_rel"]) if len(d) else True
        fin = ratio[np.isfinite(ratio)]
        if len(fin):
            verdicts[f"{prefix}ratio_bounded_r{r}"] = bool(
                np.max(fin) <= tol["ratio_factor"] * np.median(fin))
    return verdicts


# ---------------------------------------------------------------------------
# runners

CONVERGENCE_COLUMNS = ("i", "parameter", "r", "hausdorff", "certified_reach", "M_r",
                       "delta_M_r", "omega", "ratio")


def run_convergence(sc):
    """Sequence Gamma_i -> Gamma (mesh refinement or shrinking perturbations).

    Every Gamma_i must certify reach >= tolerances["reach"]; otherwise a
    :class:`PreconditionError` aborts the run.
    """
    base = _base_surface(sc)
    target = _profile(base, sc.order)
    key, values = next(iter(sc.sequence.items()))
    if key not in ("mesh", "perturbation"):
        raise ConfigError("convergence needs a 'mesh' or 'perturbation' sequence")
    bound = float(sc.tol["reach"])
    rows = []
    notes = []
    for i, p in enumerate(values):
        if key == "mesh":
            surf = mesh_from_parametric(base, int(p))
            prof = _profile(surf, None)
        else:
            surf = perturb(base, float(p), mode=sc.surface.get("bump"), seed=sc.seed)
            prof = _profile(surf, sc.order)
        reach = float("nan")
        if bound > 0:
            cert = estimate_reach(surf, bound, density=sc.density)
            reach = cert.certified
            if not cert.all_passed:
                raise PreconditionError(
                    f"scenario {sc.id}: item {i} ({key}={p}) fails the reach test at {bound:g} "
                    f"(worst margin {np.min(cert.margins):.3e}, tolerance {cert.tolerance:.3e})")
        hd = float(hausdorff_distance(surf, base, density=sc.density))
        omega = _omega(surf, base, sc.order, sc.seed) if p != 0 else 0.0
        for r in sc.r_values:
            d = abs(prof[r] - target[r])
            ratio = d / omega if omega > 0 else float("nan")
            rows.append({"i": i, "parameter": p, "r": r, "hausdorff": hd,
                         "certified_reach": reach, "M_r": prof[r], "delta_M_r": d,
                         "omega": omega, "ratio": ratio})
    verdicts = _delta_verdicts(rows, sc.r_values, sc.tol, target)
    if bound > 0:
        verdicts["uniform_reach"] = all(row["certified_reach"] >= bound for row in rows)
    return Report(sc.id, CONVERGENCE_COLUMNS, rows, verdicts, notes)


MONOTONICITY_COLUMNS = ("i", "epsilon", "r", "M_r", "certified_reach")


def run_monotonicity(sc, reach=False):
    base = _base_surface(sc)
    eps = [float(e) for e in sc.sequence.get("epsilons", [])]
    if not eps:
        raise ConfigError("monotonicity needs an 'epsilons' sequence")
    rows = []
    for i, e in enumerate(eps):
        s = parallel_surface(base, e)
        prof = _profile(s, sc.order)
        rc = float("nan")
        if reach and e > 0:
            rc = estimate_reach(s, e, density=sc.density).certified
        for r in sc.r_values:
            rows.append({"i": i, "epsilon": e, "r": r, "M_r": prof[r], "certified_reach": rc})
    verdicts = {}
    for r in sc.r_values:
        v = np.array([row["M_r"] for row in rows if row["r"] == r])
        scale = max(np.max(np.abs(v)), 1e-300)
        verdicts[f"monotone_r{r}"] = bool(np.all(np.diff(v) >= -sc.tol["monotone"] * scale))
    return Report(sc.id, MONOTONICITY_COLUMNS, rows, verdicts)


THEOREM2_COLUMNS = ("i", "samples", "r", "hausdorff", "M_r", "delta_M_r", "omega", "ratio",
                    "chain_bound")


def boundary_samples(base, k, seed=0):
    """k points on a catalog circle/sphere-like surface: equally spaced angles
    (n = 2) or a Fibonacci lattice of directions (n = 3), pushed to the
    surface along radial geodesics."""
    sp = base.space
    if base.radial is None:
        raise ConfigError("boundary sampling needs a radial catalog surface")
    if sp.dim == 2:
        off = np.random.default_rng(seed).uniform(0, 2 * math.pi / k) if seed else 0.0
        t = off + 2 * math.pi * np.arange(k) / k
        d = np.stack([np.cos(t), np.sin(t)], axis=1)
    else:
        i = np.arange(k) + 0.5
        z = 1 - 2 * i / k
        phi = math.pi * (3 - math.sqrt(5)) * i
        rr = np.sqrt(1 - z * z)
        d = np.stack([rr * np.cos(phi), rr * np.sin(phi), z], axis=1)
    rho = base.radial(d)
    return sp.point_at_polar(rho[:, None], d)


def run_theorem2(sc, chain_eps=0.1):
    """Hulls of ever denser boundary samples converging to a convex Gamma.

    Both sides use the limit definition for singular inputs; the chain bound
    |M(G_i) - M(G_i^e)| + |M(G_i^e) - M(G^e)| + |M(G^e) - M(G)| at one e is
    reported as a diagnostic.
    """
    base = _base_surface(sc)
    target = _profile(base, sc.order)
    base_eps = _profile(parallel_surface(base, chain_eps), sc.order)
    ks = [int(k) for k in sc.sequence.get("samples", [])]
    if not ks:
        raise ConfigError("theorem2 needs a 'samples' sequence")
    rows = []
    for i, k in enumerate(ks):
        poly = polytope_from_points(sc.space, boundary_samples(base, k, sc.seed), f"hull{k}")
        prof = _profile(poly, sc.order)
        prof_eps = _profile(poly.parallel(chain_eps), sc.order)
        hd = float(hausdorff_distance(poly, base, density=sc.density))
        # inscribed hulls are nested inside Gamma
        omega = enclosed_volume(base, sc.order) - enclosed_volume(poly)
        for r in sc.r_values:
            d = abs(prof[r] - target[r])
            chain = (abs(prof[r] - prof_eps[r]) + abs(prof_eps[r] - base_eps[r])
                     + abs(base_eps[r] - target[r]))
            rows.append({"i": i, "samples": k, "r": r, "hausdorff": hd, "M_r": prof[r],
                         "delta_M_r": d, "omega": omega,
                         "ratio": d / omega if omega > 0 else float("nan"),
                         "chain_bound": chain})
    verdicts = _delta_verdicts(rows, sc.r_values, sc.tol, target)
    verdicts = {k: v for k, v in verdicts.items() if not k.startswith("ratio")}
    return Report(sc.id, THEOREM2_COLUMNS, rows, verdicts)


def run_scenario(sc):
    return {"convergence": run_convergence, "monotonicity": run_monotonicity,
            "theorem2": run_theorem2}[sc.kind](sc)


# ---------------------------------------------------------------------------
# output

def emit_report(report, fmt, out_dir):
    """Write ``<scenario>.csv``, ``.json`` or ``.svg`` into out_dir; returns
    the path. CSV and JSON bytes depend only on the report contents."""
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, report.scenario_id)
    if fmt == "csv":
        path = base + ".csv"
        with open(path, "w", newline="") as fh:
            fh.write(report.to_csv())
    elif fmt == "json":
        path = base + ".json"
        with open(path, "w") as fh:
            fh.write(report.to_json())
    elif fmt == "svg":
        path = base + ".svg"
        _plot(report, path)
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    return path


def _plot(report, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "totcurv"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    rs = sorted({row["r"] for row in report.rows})
    if "epsilon" in report.columns:
        for r in rs:
            ax.plot(report.column("epsilon", r), report.column("M_r", r), marker="o", label=f"r={r}")
        ax.set_xlabel("epsilon")
        ax.set_ylabel("M_r")
    else:
        for r in rs:
            y = report.column("delta_M_r", r)
            ax.semilogy(report.column("i", r), np.where(y > 0, y, np.nan), marker="o",
                        label=f"r={r}")
        ax.set_xlabel("i")
        ax.set_ylabel("|delta M_r|")
    if rs:
        ax.legend()
    ax.set_title(report.scenario_id)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
