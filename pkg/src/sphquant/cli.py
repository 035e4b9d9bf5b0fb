"""Command-line recipes that tabulate the package's computations as CSV.

Each run writes ``--out`` (CSV with ``#`` provenance lines and a header row)
and ``--out`` + ``.json`` with the resolved configuration, version and wall
time. Exit status is 0 on success, 2 for an invalid configuration and 3 for
a numerical failure.

Examples
--------
    python3 -m sphquant optimize --d 3 --n 9 --s 2 --out a.csv
    python3 -m sphquant figure --name sphere-left --s 1 --d 3:50:1 --n 10,100,1000 --out f.csv
"""

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .designs import factorial_optimal
from .engine import DistortionQuery, expected_distortion
from .evt import evt_optimal_radius, evt_distortion, kappa, kappa_bounds
from .models import family_from_name, target_from_name
from .montecarlo import mc_distortion
from .quadrature import QuadratureConfig
from .search import crossover_size, optimal_parameter

RECIPES = ("distortion", "optimize", "evt", "bounds", "mc", "crossover", "factorial", "figure")
FIGURES = ("sphere-left", "ball-grid", "normal-sigma", "kappa", "crossover")
WORKERS_ENV = "SPHQUANT_WORKERS"


class SpecError(ValueError):
    """Invalid configuration; ``key`` names the offending option."""

    def __init__(self, key, message):
        super().__init__(f"invalid --{key}: {message}")
        self.key = key


class PointFailure(RuntimeError):
    def __init__(self, point, cause):
        super().__init__(f"numerical failure at {point}: {cause}")
        self.point = point


def _parse_grid(key, text, cast):
    """``'a,b,c'`` or inclusive ``'lo:hi:step'``."""
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError("expected lo:hi:step with step > 0")
            lo, hi, step = parts
            k = int(math.floor((hi - lo) / step + 1e-9))
            vals = [lo + i * step for i in range(k + 1)]
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
        if not vals:
            raise ValueError("empty list")
        out = []
        for v in vals:
            if cast is int and v != int(v):
                raise ValueError(f"{v} is not an integer")
            out.append(cast(v))
        return out
    except ValueError as exc:
        raise SpecError(key, str(exc)) from None


def build_parser():
    p = argparse.ArgumentParser(prog="sphquant", description=__doc__.split("\n")[0])
    p.add_argument("recipe", choices=RECIPES)
    p.add_argument("--d", default="3", help="dimension(s): list or lo:hi:step")
    p.add_argument("--n", default="10", help="design size(s): list or lo:hi:step")
    p.add_argument("--s", default="2", help="distortion order(s)")
    p.add_argument("--target", default="sphere", choices=("sphere", "ball", "normal"))
    p.add_argument("--family", default="sphere", choices=("sphere", "ball", "normal", "atom-sphere"))
    p.add_argument("--value", type=float, help="family parameter for distortion/mc")
    p.add_argument("--a", type=float, default=1.0, help="sphere radius of the atom-sphere family")
    p.add_argument("--family-b", default="normal", choices=("sphere", "ball", "normal"),
                   help="competing family for crossover")
    p.add_argument("--n-hi", type=int, default=100000, help="crossover search cap")
    p.add_argument("--samples", type=int, default=100000, help="Monte-Carlo target draws")
    p.add_argument("--name", choices=FIGURES, help="figure recipe name")
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    return p


def resolve(args):
    """Validate and normalise parsed arguments into a plain dict."""
    spec = {
        "recipe": args.recipe,
        "d": _parse_grid("d", args.d, int),
        "n": _parse_grid("n", args.n, int),
        "s": _parse_grid("s", args.s, float),
        "target": args.target,
        "family": args.family,
        "family_b": args.family_b,
        "value": args.value,
        "a": args.a,
        "n_hi": args.n_hi,
        "samples": args.samples,
        "name": args.name,
        "rel_tol": args.rel_tol,
        "seed": args.seed,
        "out": args.out,
    }
    if min(spec["d"]) < 2:
        raise SpecError("d", "dimension must be >= 2")
    if min(spec["n"]) < 1:
        raise SpecError("n", "design size must be >= 1")
    if min(spec["s"]) <= 0:
        raise SpecError("s", "order must be > 0")
    if not spec["rel_tol"] > 0:
        raise SpecError("rel-tol", "must be > 0")
    r = spec["recipe"]
    if r in ("distortion", "mc") and spec["value"] is None:
        raise SpecError("value", f"required by recipe {r}")
    if r in ("evt",) and min(spec["d"]) < 3:
        raise SpecError("d", "extreme-value recipes need d >= 3")
    if r == "bounds" and min(spec["d"]) < 5:
        raise SpecError("d", "kappa bounds need d >= 5")
    if r in ("evt", "bounds") and min(spec["n"]) < 2:
        raise SpecError("n", "extreme-value recipes need n >= 2")
    if r == "mc" and spec["samples"] < 2:
        raise SpecError("samples", "must be >= 2")
    if r == "crossover" and spec["n_hi"] < 2:
        raise SpecError("n-hi", "must be >= 2")
    if r == "factorial" and any(s not in (2.0, 4.0) for s in spec["s"]):
        raise SpecError("s", "factorial recipe reports s = 2, 4 and inf together; use 2 or 4")
    if r == "figure" and spec["name"] is None:
        raise SpecError("name", "figure recipe needs --name")
    return spec


# ------------------------------------------------------------- row builders


def _family(spec, name, d, value=1.0):
    if name == "atom-sphere":
        return family_from_name(name, d, value, a=spec["a"])
    return family_from_name(name, d, value)


def _query(spec, d, n, s, family=None, target=None):
    quad = QuadratureConfig(rel_tol=spec["rel_tol"])
    value = 1.0 if spec["value"] is None else spec["value"]
    fam = _family(spec, family or spec["family"], d, value)
    return DistortionQuery(d, n, s, target_from_name(target or spec["target"], d), fam, quad)


def _intn(x):
    return int(x) if float(x).is_integer() else x


def _row_distortion(spec, d, n, s):
    q = _query(spec, d, n, s)
    return [d, n, _intn(s), spec["value"], expected_distortion(q)]


def _row_optimize(spec, d, n, s, family=None, target=None):
    value, dist = optimal_parameter(_query(spec, d, n, s, family, target))
    return [d, n, _intn(s), value, dist]


def _row_evt(spec, d, n, s):
    tgt = target_from_name(spec["target"], d)
    a = evt_optimal_radius(tgt, n, d, s)
    return [d, n, _intn(s), kappa(n, d), a, evt_distortion(tgt, a, n, d, s)]


def _row_bounds(spec, d, n):
    lo, hi = kappa_bounds(n, d)
    return [d, n, kappa(n, d), lo, hi]


def _row_mc(spec, d, n, s, index):
    q = _query(spec, d, n, s)
    rep = mc_distortion(q.quantiser, q.target, s, spec["samples"],
                        seed=spec["seed"] + index, n=n)
    return [d, n, _intn(s), spec["value"], rep.estimate, rep.std_error, rep.n_samples,
            rep.hoeffding_bound, expected_distortion(q)]


def _row_crossover(spec, d, s, fam_a=None, fam_b=None, target=None):
    tgt = target_from_name(target or spec["target"], d)
    res = crossover_size(d, s, _family(spec, fam_a or spec["family"], d),
                         _family(spec, fam_b or spec["family_b"], d), spec["n_hi"], tgt,
                         quad=QuadratureConfig(rel_tol=spec["rel_tol"]))
    return [d, _intn(s), res.n_star or 0, int(res.n_star is not None)]


def _row_factorial(spec, d):
    b2, v2 = factorial_optimal(d, 2)
    b4, v4 = factorial_optimal(d, 4)
    binf, cr = factorial_optimal(d, math.inf)
    return [d, b2, v2, b4, v4, binf, cr]


def _row_normal_sigma(spec, d, n, s):
    a, da = _row_optimize(spec, d, n, s, "sphere", "normal")[3:]
    sig, ds = _row_optimize(spec, d, n, s, "normal", "normal")[3:]
    return [d, n, _intn(s), a, da, sig, ds]


def plan(spec):
    """``(header, tasks)``; each task is ``(function_name, args)`` in grid order."""
    r, ds, ns, ss = spec["recipe"], spec["d"], spec["n"], spec["s"]
    grid = [(d, n, s) for d in ds for n in ns for s in ss]
    if r == "figure":
        name = spec["name"]
        if name == "sphere-left":
            spec = dict(spec, target="sphere", family="sphere")
            return spec, ["d", "n", "s", "a_star", "distortion"], [("optimize", g) for g in grid]
        if name == "ball-grid":
            spec = dict(spec, target="ball", family="ball")
            return spec, ["d", "n", "s", "b_star", "distortion"], [("optimize", g) for g in grid]
        if name == "normal-sigma":
            return (spec, ["d", "n", "s", "a_star", "distortion_sphere", "sigma_star",
                           "distortion_normal"], [("normal_sigma", g) for g in grid])
        if name == "kappa":
            if min(ds) < 3:
                raise SpecError("d", "kappa needs d >= 3")
            if min(ns) < 2:
                raise SpecError("n", "kappa needs n >= 2")
            return spec, ["d", "n", "kappa"], [("kappa", (d, n)) for d in ds for n in ns]
        if name == "crossover":
            spec = dict(spec, target="normal", family="sphere", family_b="normal")
            return (spec, ["d", "s", "n_star", "found"],
                    [("crossover", (d, s)) for d in ds for s in ss])
    if r == "distortion":
        return spec, ["d", "n", "s", "value", "distortion"], [("distortion", g) for g in grid]
    if r == "optimize":
        return spec, ["d", "n", "s", "value", "distortion"], [("optimize", g) for g in grid]
    if r == "evt":
        return spec, ["d", "n", "s", "kappa", "a_hat", "e_hat"], [("evt", g) for g in grid]
    if r == "bounds":
        return spec, ["d", "n", "kappa", "lo", "hi"], [("bounds", (d, n)) for d in ds for n in ns]
    if r == "mc":
        return (spec, ["d", "n", "s", "value", "estimate", "std_error", "n_samples",
                       "hoeffding_bound", "exact"],
                [("mc", g + (i,)) for i, g in enumerate(grid)])
    if r == "crossover":
        return spec, ["d", "s", "n_star", "found"], [("crossover", (d, s)) for d in ds for s in ss]
    if r == "factorial":
        return (spec, ["d", "b2", "distortion2", "b4", "distortion4", "b_inf", "covering_radius"],
                [("factorial", (d,)) for d in ds])
    raise SpecError("recipe", r)


_ROWS = {
    "distortion": _row_distortion,
    "optimize": _row_optimize,
    "evt": _row_evt,
    "bounds": _row_bounds,
    "mc": _row_mc,
    "crossover": _row_crossover,
    "factorial": _row_factorial,
    "normal_sigma": _row_normal_sigma,
    "kappa": lambda spec, d, n: [d, n, kappa(n, d)],
}


def _run_task(job):
    spec, (kind, args) = job
    try:
        row = _ROWS[kind](spec, *args)
    except (ArithmeticError, FloatingPointError, ValueError) as exc:
        raise PointFailure(dict(zip(("d", "n", "s"), args)), exc) from None
    if not all(math.isfinite(float(x)) for x in row):
        raise PointFailure(dict(zip(("d", "n", "s"), args)), "non-finite result")
    return row


def _fmt(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def run(spec):
    """Execute a resolved spec; returns the number of rows written."""
    t0 = time.perf_counter()
    spec, header, tasks = plan(spec)
    workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    jobs = [(spec, t) for t in tasks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, jobs))
    else:
        rows = [_run_task(j) for j in jobs]
    config = {k: v for k, v in spec.items() if k != "out"}
    lines = [f"# sphquant {__version__}",
             f"# recipe: {spec['recipe']}",
             "# config: " + json.dumps(config, sort_keys=True),
             ",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    with open(spec["out"], "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    side = {"config": config, "version": __version__, "columns": header,
            "rows": len(rows), "wall_time_s": time.perf_counter() - t0}
    with open(spec["out"] + ".json", "w") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
    return len(rows)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = resolve(args)
        plan(spec)
    except SpecError as exc:
        print(f"sphquant: {exc}", file=sys.stderr)
        return 2
    try:
        run(spec)
    except SpecError as exc:
        print(f"sphquant: {exc}", file=sys.stderr)
        return 2
    except PointFailure as exc:
        print(f"sphquant: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
