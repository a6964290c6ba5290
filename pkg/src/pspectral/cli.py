"""Command-line front end.

Every command prints JSON (default) or CSV to stdout or ``--out``. Exit
status: 0 success, 1 failed checks, 2 invalid input, 3 numerical failure,
4 curvature condition violated.
"""

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import CurvatureViolated, NumericalFailure, PSpectralError, ValidationError

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_CURVATURE = 4

DEFAULT_TOL = 1e-10


# --------------------------------------------------------------------------
# single computations; each returns a flat dict (or a list of them)


def _mu(a):
    from .eigensolver import mu_p

    return mu_p(a["p"], a["kappa"], a["D"], a["tol"]).to_dict()


def _lambda0(a):
    from .eigensolver import lambda0

    return {"p": a["p"], "kappa": a["kappa"], "lambda0": lambda0(a["p"], a["kappa"], a["tol"]), "tol": a["tol"]}


def _delta_bar(a):
    from .eigensolver import delta_bar

    return {"p": a["p"], "kappa": a["kappa"], "lambda": a["lambda"],
            "delta_bar": delta_bar(a["p"], a["kappa"], a["lambda"], a["tol"]), "tol": a["tol"]}


def _model(a):
    from .eigensolver import model_for_range
    from .ode_model import ModelParams, solve_ivp_cap, solve_ivp_odd

    params = ModelParams(a["p"], a["kappa"], a["lambda"])
    n = a.get("samples") or 401
    tol = max(a["tol"] * 0.01, 1e-13)
    if a.get("odd"):
        sol = solve_ivp_odd(params, a["t_end"] or 1.0, n_samples=n, tol=tol)
    elif a.get("u_max") is not None:
        sol = model_for_range(a["p"], a["kappa"], a["lambda"], a["u_max"], a["tol"])
        if n != len(sol.t_grid):
            sol = solve_ivp_cap(params, sol.a, n_samples=n, tol=tol)
    else:
        sol = solve_ivp_cap(params, a["a"] if a.get("a") is not None else 0.0,
                            t_end=a.get("t_end"), n_samples=n, tol=tol)
    meta = {"p": params.p, "kappa": params.kappa, "lambda": params.lam, "alpha": params.alpha,
            "a": sol.a, "b_of_a": sol.b_of_a, "m_of_a": sol.m_of_a, "delta_of_a": sol.delta_of_a,
            "odd": sol.odd, "samples": len(sol.t_grid), "tol": a["tol"]}
    rows = [dict(zip(("t", "theta", "log_r", "w", "w_prime"), map(float, r))) for r in sol.to_rows()]
    return meta, rows


def _rayleigh(a):
    from .geometry import cylinder_interval
    from .rayleigh import WeightedInterval, minimize_rayleigh

    if a.get("input"):
        dom = WeightedInterval.from_csv(a["input"], a["p"])
    else:
        dom = cylinder_interval(a["p"], a["kappa"], a["D"], a["n"], a["r"], a["mesh"])
    init = a.get("init") or "odd-linear"
    pair = minimize_rayleigh(dom, init=init, steps=a["steps"], tol=a["rtol"], seed=a["seed"])
    out = {"p": dom.p, **pair.to_dict(), "init": init, "seed": a["seed"], "tol": a["rtol"]}
    return out, pair


def _sharpness(a):
    from .geometry import sharpness_experiment

    ratio = a["delta_ratio"]
    return sharpness_experiment(a["p"], a["kappa"], a["n"], a["D"], a["r"],
                                delta_rule=lambda r: ratio * r, mesh_N=a["mesh"])


# --------------------------------------------------------------------------
# output


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if hasattr(v, "item"):
        return _clean(v.item())
    return v


def to_json(obj):
    if isinstance(obj, dict):
        obj = {k: _clean(v) for k, v in obj.items()}
    elif isinstance(obj, list):
        obj = [{k: _clean(v) for k, v in r.items()} if isinstance(r, dict) else r for r in obj]
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def to_csv(rows):
    if isinstance(rows, dict):
        rows = [rows]
    buf = io.StringIO()
    if not rows:
        return ""
    wr = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    wr.writerow(header)
    for r in rows:
        wr.writerow(["" if r.get(k) is None else (repr(float(r[k])) if isinstance(r[k], float) else r[k])
                     for k in header])
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(result, fmt):
    return to_json(result) if fmt == "json" else to_csv(result)


# --------------------------------------------------------------------------
# sweep


SWEEPABLE = {
    "mu": (_mu, ("p", "kappa", "D")),
    "lambda0": (_lambda0, ("p", "kappa")),
    "delta-bar": (_delta_bar, ("p", "kappa", "lambda")),
    "sharpness": (None, ("p", "kappa", "n", "D", "r")),
}


def _sweep_row(job):
    command, params = job
    row = dict(params)
    try:
        if command == "sharpness":
            args = dict(params, r=[params["r"]])
            res = _sharpness(args)[0]
            row.update({k: v for k, v in res.items() if k != "r"})
            row["status"] = res["status"]
            return row
        res = SWEEPABLE[command][0](params)
        row.update(res)
        row["status"] = "ok"
    except PSpectralError as exc:
        row["status"] = type(exc).__name__
    return row


def worker_count(n_jobs):
    env = os.environ.get("PSPECTRAL_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ValidationError(f"PSPECTRAL_THREADS must be a positive integer, got {env!r}")
    return max(1, min(cap, n_jobs))


def sweep(command, grid, fixed):
    """Evaluate ``command`` over the Cartesian product of ``grid`` (name -> list).

    Rows come back in lexicographic order of the grid indices; a failing row
    records its error class in ``status`` instead of aborting the sweep.
    """
    if command not in SWEEPABLE:
        raise ValidationError(f"cannot sweep {command!r}")
    names = list(grid)
    jobs = []
    for combo in itertools.product(*(grid[n] for n in names)):
        params = dict(zip(names, combo))
        params.update(fixed)
        jobs.append((command, params))
    workers = worker_count(len(jobs))
    if workers == 1:
        return [_sweep_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, jobs))


# --------------------------------------------------------------------------
# parser


def _common(sp, tol=True):
    if tol:
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="solver tolerance (default 1e-10)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", help="write to this path instead of stdout")


def build_parser():
    ap = argparse.ArgumentParser(prog="pspectral", description="Sharp first-eigenvalue bounds for the weighted p-Laplacian.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("mu", help="model eigenvalue mu_p(kappa, D)")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--D", type=float, required=True)
    _common(sp)

    sp = sub.add_parser("lambda0", help="first eigenvalue of the model on the line")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-8, help="convergence tolerance in D (default 1e-8)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")

    sp = sub.add_parser("delta-bar", help="symmetric interval length for a given lambda")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    _common(sp)

    sp = sub.add_parser("model", help="model solution; CSV trajectory t, theta, log_r, w, w_prime")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--a", type=float, help="start w(a) = -1, w'(a) = 0 (default a = 0)")
    g.add_argument("--u-max", type=float, help="choose a so that max w = u_max")
    g.add_argument("--odd", action="store_true", help="odd solution w(0) = 0, w'(0) = 1")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--samples", type=int, default=401)
    sp.add_argument("--meta", action="store_true", help="print only the shooting quantities")
    _common(sp)

    sp = sub.add_parser("rayleigh", help="discrete Rayleigh minimization on a weighted interval")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--input", help="CSV with columns s, rho (default: Gaussian-weighted cylinder)")
    sp.add_argument("--kappa", type=float, default=0.0)
    sp.add_argument("--D", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--mesh", type=int, default=1024)
    sp.add_argument("--init", choices=("odd-linear", "random"), default="odd-linear")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--steps", type=int, default=2000)
    sp.add_argument("--tol", type=float, default=1e-12, help="relative decrease stopping tolerance")
    sp.add_argument("--phi-out", help="also write phi as CSV (s, phi)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")

    sp = sub.add_parser("sharpness", help="capped-cylinder eigenvalues against mu_p")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--D", type=float, default=1.0)
    sp.add_argument("--r", type=float, nargs="+", required=True)
    sp.add_argument("--delta-ratio", type=float, default=0.1, help="delta = ratio * r (default 0.1)")
    sp.add_argument("--mesh", type=int, help="cells over [0, D] (default: resolves the switching region)")
    sp.add_argument("--surface-out", help="write the surface of the first r as CSV")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")

    sp = sub.add_parser("check", help="run invariant suites")
    sp.add_argument("--suite", choices=("all", "ptrig", "ode", "eigen", "rayleigh", "geometry"), default="all")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out")

    sp = sub.add_parser("sweep", help="Cartesian-product sweep with per-row status")
    sp.add_argument("target", choices=tuple(SWEEPABLE))
    sp.add_argument("--p", type=float, nargs="+", required=True)
    sp.add_argument("--kappa", type=float, nargs="+", default=[0.0])
    sp.add_argument("--D", type=float, nargs="+", default=[1.0])
    sp.add_argument("--lambda", dest="lam", type=float, nargs="+")
    sp.add_argument("--n", type=int, nargs="+", default=[3])
    sp.add_argument("--r", type=float, nargs="+")
    sp.add_argument("--delta-ratio", type=float, default=0.1)
    sp.add_argument("--mesh", type=int)
    _common(sp)
    return ap


def run(args):
    """Dispatch parsed arguments; returns the exit status."""
    cmd = args.command
    fmt = args.format
    if cmd == "mu":
        _emit(_render(_mu({"p": args.p, "kappa": args.kappa, "D": args.D, "tol": args.tol}), fmt), args.out)
    elif cmd == "lambda0":
        _emit(_render(_lambda0({"p": args.p, "kappa": args.kappa, "tol": args.tol}), fmt), args.out)
    elif cmd == "delta-bar":
        _emit(_render(_delta_bar({"p": args.p, "kappa": args.kappa, "lambda": args.lam, "tol": args.tol}), fmt), args.out)
    elif cmd == "model":
        meta, rows = _model({"p": args.p, "kappa": args.kappa, "lambda": args.lam, "a": args.a,
                             "u_max": args.u_max, "odd": args.odd, "t_end": args.t_end,
                             "samples": args.samples, "tol": args.tol})
        if args.meta:
            text = _render(meta, fmt)
        elif fmt == "csv":
            text = to_csv(rows)
        else:
            text = to_json(dict(meta, columns=["t", "theta", "log_r", "w", "w_prime"],
                                trajectory=[list(r.values()) for r in rows]))
        _emit(text, args.out)
    elif cmd == "rayleigh":
        out, pair = _rayleigh({"p": args.p, "input": args.input, "kappa": args.kappa, "D": args.D, "n": args.n,
                               "r": args.r, "mesh": args.mesh, "init": args.init, "seed": args.seed,
                               "steps": args.steps, "rtol": args.tol})
        if args.phi_out:
            pair.phi_to_csv(args.phi_out)
        _emit(_render(out, fmt), args.out)
    elif cmd == "sharpness":
        params = {"p": args.p, "kappa": args.kappa, "n": args.n, "D": args.D, "r": args.r,
                  "delta_ratio": args.delta_ratio, "mesh": args.mesh}
        if args.surface_out:
            from .geometry import SurfaceSpec, build_surface, default_mesh

            r0 = args.r[0]
            d0 = args.delta_ratio * r0
            spec = SurfaceSpec(args.n, args.kappa, args.D, r0, d0)
            build_surface(spec, args.mesh or default_mesh(args.D, d0)).to_csv(args.surface_out)
        rows = _sharpness(params)
        _emit(_render(rows, fmt), args.out)
        if any(r["status"] != "ok" for r in rows):
            print("curvature condition violated for at least one radius", file=sys.stderr)
            return EXIT_CURVATURE
    elif cmd == "check":
        from .checks import run_suite

        results = run_suite(args.suite)
        rows = [{"suite": s, "check": n, "passed": ok, "detail": d} for s, n, ok, d in results]
        _emit(_render(rows, fmt), args.out)
        for r in rows:
            print(f"{'PASS' if r['passed'] else 'FAIL'} [{r['suite']}] {r['check']}: {r['detail']}", file=sys.stderr)
        if not all(r["passed"] for r in rows):
            return EXIT_CHECK
    elif cmd == "sweep":
        target = args.target
        grid = {"p": args.p, "kappa": args.kappa}
        fixed = {"tol": args.tol}
        if target in ("mu",):
            grid["D"] = args.D
        elif target == "delta-bar":
            if not args.lam:
                raise ValidationError("delta-bar sweep needs --lambda")
            grid["lambda"] = args.lam
        elif target == "sharpness":
            if not args.r:
                raise ValidationError("sharpness sweep needs --r")
            grid.update(n=args.n, D=args.D, r=args.r)
            fixed.update(delta_ratio=args.delta_ratio, mesh=args.mesh)
        rows = sweep(target, grid, fixed)
        _emit(_render(rows, fmt), args.out)
    return EXIT_OK


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return run(args)
    except CurvatureViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CURVATURE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
