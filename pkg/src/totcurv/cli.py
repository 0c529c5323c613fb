"""Command line interface: ``totcurv <subcommand> ...``.

Exit status is 0 iff every verdict of the run passes, 1 if a verdict
fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from .ambient import AmbientSpace
from .convex import catalog_body, conjecture_gap, random_convex_body
from .curvature import curvature_profile, gauss_form_pullback, total_mean_curvature
from .errors import AccuracyWarning, ConfigError, GeometryError
from .experiments import Scenario, emit_report, load_scenario, run_scenario
from .parallel import parallel_sweep
from .surfaces import CATALOG, catalog_surface, parse_surface_spec, read_mesh


def _space(args, name):
    if args.dim:
        dim = args.dim
    elif name in ("circle", "ellipse"):
        dim = 2
    else:
        dim = 3
    if args.ambient == "euclidean":
        return AmbientSpace.euclidean(dim)
    return AmbientSpace.hyperbolic(dim, args.curvature)


def build_surface(text, args):
    """Surface from ``name[:k=v,...]``: a catalog name, ``random`` (keys seed,
    n_points, radius, eps0) or ``mesh`` (key path)."""
    name, params = parse_surface_spec(text)
    if name == "mesh":
        path = text.partition("path=")[2]
        if not path:
            raise ConfigError("mesh spec needs path=<file>")
        return read_mesh(path)
    space = _space(args, name)
    if name == "random":
        body = random_convex_body(space, int(params.get("seed", args.seed)),
                                  int(params.get("n_points", 12)), float(params.get("radius", 0.8)),
                                  float(params.get("eps0", 0.1)))
        return body.boundary
    if name not in CATALOG:
        raise ConfigError(f"unknown surface {name!r}; choose from {CATALOG + ('random', 'mesh')}")
    return catalog_surface(name, space, **params)


def _write(args, name, text):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, name), "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_measure(args):
    s = build_surface(args.surface, args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AccuracyWarning)
        prof = curvature_profile(s, args.quadrature_order)
    _write(args, "profile.csv", prof.to_csv())
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return 0


def cmd_verify_form(args):
    s = build_surface(args.surface, args)
    form = gauss_form_pullback(s, args.quadrature_order)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        tc = float(total_mean_curvature(s, s.n - 1, args.quadrature_order))
    rel = abs(form.value - tc) / max(abs(tc), 1e-300)
    tol = args.tol if args.tol is not None else 1e-4
    ok = rel <= tol
    _write(args, "verify_form.csv",
           "surface_id,gauss_form,M_top,relative_difference,passed\n"
           f"{s.label},{form.value!r},{tc!r},{rel!r},{int(ok)}\n")
    return 0 if ok else 1


def cmd_parallel_sweep(args):
    s = build_surface(args.surface, args)
    eps = [float(x) for x in args.epsilons.split(",")]
    sweep = parallel_sweep(s, eps, args.quadrature_order, reach=args.reach, tubes=args.tubes)
    _write(args, "sweep.csv", sweep.to_csv())
    tol = args.tol if args.tol is not None else 1e-6
    return 0 if all(sweep.monotone(r, tol) for r in range(s.n)) else 1


def _scenario_from_args(args, kind):
    if args.scenario:
        sc = load_scenario(args.scenario)
        if sc.kind != kind:
            raise ConfigError(f"scenario kind is {sc.kind!r}, expected {kind!r}")
        overrides = {}
        if args.quadrature_order:
            overrides["order"] = args.quadrature_order
        if args.seed is not None and args.seed_given:
            overrides["seed"] = args.seed
        if overrides:
            d = {**sc.to_dict(), **overrides}
            sc = Scenario.from_dict(d)
        return sc
    if kind != "monotonicity" or not args.surface:
        raise ConfigError("--scenario is required")
    name, params = parse_surface_spec(args.surface)
    space = _space(args, name)
    surface = ({"random": int(params.get("seed", args.seed))} if name == "random"
               else {"catalog": name, "params": params})
    eps = [float(x) for x in (args.epsilons or "0,0.05,0.1,0.2").split(",")]
    return Scenario("monotonic", "monotonicity", space.to_dict(), surface, {"epsilons": eps},
                    order=args.quadrature_order, seed=args.seed,
                    tolerances={"monotone": args.tol} if args.tol is not None else {})


def _run(args, kind):
    sc = _scenario_from_args(args, kind)
    rep = run_scenario(sc)
    out = args.out or sc.out
    if out:
        for fmt in ("csv", "json", "svg"):
            emit_report(rep, fmt, out)
    else:
        sys.stdout.write(rep.to_csv())
    for name, ok in rep.verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_conjecture(args):
    s = build_surface(args.surface, args)
    body = catalog_body(s)
    g = conjecture_gap(body, args.quadrature_order)
    sp = s.space
    tol = args.tol if args.tol is not None else 1e-6
    if not sp.is_hyperbolic:
        ok = abs(g.gap) <= 1e-3 * g.sphere
    elif sp.dim == 2:
        ok = g.gauss_bonnet_mismatch(sp.c) <= 1e-2 and g.gap >= -tol
    else:
        ok = g.gap >= -tol
    _write(args, "conjecture.csv",
           "surface_id,M_top,sphere_volume,gap,enclosed_volume,passed\n"
           f"{s.label},{g.value!r},{g.sphere!r},{g.gap!r},{g.enclosed!r},{int(ok)}\n")
    return 0 if ok else 1


def make_parser():
    p = argparse.ArgumentParser(prog="totcurv", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ambient", choices=("euclidean", "hyperbolic"), default="euclidean")
    common.add_argument("--dim", type=int, default=None)
    common.add_argument("--curvature", type=float, default=1.0,
                        help="c > 0 for the hyperbolic ambient of curvature -c")
    common.add_argument("--scenario", default=None, help="json scenario file")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--quadrature-order", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, surface=True, optional_surface=False):
        sp = sub.add_parser(name, parents=[common])
        if surface:
            sp.add_argument("surface", nargs="?" if optional_surface else None)
        sp.set_defaults(func=func)
        return sp

    add("measure", cmd_measure)
    add("verify-form", cmd_verify_form)
    ps = add("parallel-sweep", cmd_parallel_sweep)
    ps.add_argument("--epsilons", default="0,0.05,0.1,0.2")
    ps.add_argument("--reach", action="store_true", help="certify reach of every parallel surface")
    ps.add_argument("--tubes", action="store_true", help="add tube integrals")
    add("converge", lambda a: _run(a, "convergence"), surface=False)
    mono = add("monotonic", lambda a: _run(a, "monotonicity"), optional_surface=True)
    mono.add_argument("--epsilons", default=None)
    add("theorem2", lambda a: _run(a, "theorem2"), surface=False)
    add("conjecture", cmd_conjecture)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
