"""Command-line front end.

Subcommands:
  test      run the rank test on CSV data with a certified p-value interval
  bounds    evaluate every explicit bound at (n, r, h-norms)
  verify    run the exact verification suites (JSON lines, exit 0 iff green)
  distance  estimate a distance to the chi-square limit and gate it on its bound
  rate      gap-versus-bound table across a list of n

Exit codes: 0 success, 1 check failure, 2 usage error, 3 input/IO error.
Identical invocations (same flags, same seed) produce byte-identical output;
the FRIEDMAN_BOUNDS_THREADS environment variable caps --threads without
affecting any result.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import bounds as bounds_mod
from . import coupling, exact, montecarlo, stein, testfunctions
from .chisq import ChiSquareLaw, chisq_cdf
from .errors import (BudgetError, DomainError, FriedmanBoundsError, NonFiniteError,
                     ParseError, TieError)
from .ranks import friedman_statistic, load_csv

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _thread_cap(requested: int) -> int:
    cap = os.environ.get("FRIEDMAN_BOUNDS_THREADS")
    if cap is not None:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, requested)


def _test_function(name: str, t: float) -> testfunctions.TestFunction:
    if name == "cos":
        return testfunctions.cosine(t)
    if name == "sin":
        return testfunctions.sine(t)
    if name == "x":
        return testfunctions.identity()
    if name == "x2":
        return testfunctions.power(2)
    raise DomainError(f"unknown test function {name!r}")


# ---------------------------------------------------------------------------
# test
# ---------------------------------------------------------------------------

def _cmd_test(args) -> int:
    ranks = load_csv(args.input, args.format)
    score = friedman_statistic(ranks)
    n, r = score.n, score.r
    p_value = 1.0 - chisq_cdf(ChiSquareLaw(r - 1), score.f_r)
    kol_raw = bounds_mod.bound_kolmogorov(n, r)
    kol = min(1.0, kol_raw)
    lo = max(0.0, p_value - kol)
    hi = min(1.0, p_value + kol)
    unit = bounds_mod.bound_report(n, r, bounds_mod.SmoothNorms(1.0, 1.0, 1.0))
    report = {
        "n": n,
        "r": r,
        "statistic": score.f_r,
        "p_value": p_value,
        "kolmogorov_raw": kol_raw,
        "kolmogorov_bound": kol,
        "p_value_interval": [lo, hi],
        "unit_norm_bounds": unit.to_dict(),
    }
    if args.json:
        print(_dump(report))
        return EXIT_OK
    print(f"Friedman rank test: n={n} trials, r={r} treatments")
    print(f"  statistic F_r            {score.f_r:.10g}")
    print(f"  approximate p-value      {p_value:.10g}   (chi-square, {r - 1} df)")
    print(f"  Kolmogorov bound         {kol:.10g}   (raw {kol_raw:.6g})")
    print(f"  certified p interval     [{lo:.10g}, {hi:.10g}]")
    if kol >= 1.0:
        print("  note: the distance bound is vacuous at this sample size;")
        print("        the interval certifies nothing beyond [0, 1].")
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _cmd_bounds(args) -> int:
    norms = bounds_mod.SmoothNorms(h1=args.h1, h2=args.h2, h3=args.h3)
    report = bounds_mod.bound_report(args.n, args.r, norms)
    if args.json:
        print(_dump(report.to_dict()))
        return EXIT_OK
    d = report.to_dict()
    print(f"bounds at n={args.n}, r={args.r}, norms=({args.h1:g}, {args.h2:g}, {args.h3:g})")
    for key in ("compact", "sharp", "trivial", "kolmogorov_raw", "kolmogorov",
                "wasserstein_r2", "smooth_r2", "selected"):
        if d[key] is not None:
            print(f"  {key:<16} {d[key]:.10g}")
    if d["coefficients"] is not None:
        c = d["coefficients"]
        print("  coefficients     " + ", ".join(f"{k}={v:.6g}" for k, v in sorted(c.items())))
    print(f"  jensen           {d['jensen']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _coupling_suite(r_max: int, n_max: int) -> list[dict]:
    out = []
    for r in range(2, min(r_max, 5) + 1):
        for n in range(1, min(n_max, 4) + 1):
            for fn in (coupling.verify_regression, coupling.verify_increment_moments,
                       coupling.verify_triple_structure):
                try:
                    out.extend(fn(r, n))
                except BudgetError as exc:
                    out.append({"identity": fn.__name__, "r": r, "n": n,
                                "status": "skip", "lhs": "-", "rhs": "-", "note": str(exc)})
    return out


def _stein_suite(p_max: int) -> list[dict]:
    out = []
    functions = [testfunctions.cosine(1.0), testfunctions.sine(1.0), testfunctions.identity()]
    for p in range(1, p_max + 1):
        grid = stein.standard_grid(p, points=60)
        for h in functions:
            sol = stein.SteinSolution(p, h)
            worst = max(stein.stein_residual(p, h, float(x), solution=sol) for x in grid)
            out.append({"identity": "stein residual <= 1e-5 on grid", "r": None, "n": None,
                        "status": "pass" if worst <= 1e-5 else "fail",
                        "lhs": f"{worst:.3e}", "rhs": "1e-5", "note": f"p={p}, h={h.label}"})
    ident = testfunctions.identity()
    sol = stein.SteinSolution(3, ident)
    dev = max(abs(sol.fprime(float(x)) + 2.0) for x in stein.standard_grid(3, points=40))
    out.append({"identity": "h(t)=t gives f' = -2", "r": None, "n": None,
                "status": "pass" if dev <= 1e-8 else "fail",
                "lhs": f"{dev:.3e}", "rhs": "1e-8", "note": "p=3"})
    for p, k in ((4, 2), (8, 3)):
        rep = stein.derivative_bound_check(p, testfunctions.cosine(1.0), k,
                                           grid=stein.standard_grid(p, points=50))
        ok = all(rep["holds"].values())
        out.append({"identity": f"derivative caps hold (k={k})", "r": None, "n": None,
                    "status": "pass" if ok else "fail",
                    "lhs": f"{rep['observed_sup']:.6g}",
                    "rhs": str({k2: round(v, 6) for k2, v in rep["caps"].items()}),
                    "note": f"p={p}"})
    lem = stein.verify_operator_link(3, 2, testfunctions.cosine(1.0))
    out.append({"identity": "operator-link two-path agreement", "r": 3, "n": 2,
                "status": lem["status"],
                "lhs": f"{lem['operator_agreement']:.3e} / {lem['stein_identity_residual']:.3e}",
                "rhs": "1e-5"})
    return out


def _cmd_verify(args) -> int:
    suites = []
    if args.suite in ("lemmas", "all"):
        suites.append(exact.verify_lemma_formulas(args.r_max, args.n_max))
        suites.append(exact.verify_inequalities(min(args.r_max, 10)))
    if args.suite in ("identities", "all"):
        for r in range(3, min(args.r_max, 6) + 1):
            suites.append(exact.verify_index_decomposition(r, trials=args.trials, seed=args.seed))
    if args.suite in ("coupling", "all"):
        suites.append(_coupling_suite(args.r_max, args.n_max))
    if args.suite in ("stein", "all"):
        suites.append(_stein_suite(args.p_max))
    ok = True
    for suite in suites:
        for entry in suite:
            print(_dump(entry))
            if entry["status"] == "fail":
                ok = False
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# distance / rate
# ---------------------------------------------------------------------------

def _cmd_distance(args) -> int:
    threads = _thread_cap(args.threads)
    rng = montecarlo.RngContract(seed=args.seed)
    if args.metric == "kolmogorov":
        if args.mode == "exact":
            est = montecarlo.exact_kolmogorov(args.n, args.r)
        else:
            est = montecarlo.estimate_kolmogorov(args.n, args.r, args.samples, rng,
                                                 threads=threads)
        bound = min(1.0, bounds_mod.bound_kolmogorov(args.n, args.r))
        ok = est.value <= bound + est.half_width
    elif args.metric == "cos":
        h = testfunctions.cosine(args.t)
        norms = bounds_mod.SmoothNorms(h.norm(1), h.norm(2), h.norm(3))
        if args.mode == "exact":
            est = montecarlo.DistanceEstimate(
                value=montecarlo.exact_smooth_gap(args.n, args.r, h),
                half_width=0.0, samples=math.factorial(args.r) ** args.n,
                method="exact-enumeration")
        else:
            est = montecarlo.estimate_smooth_gap(args.n, args.r, h, args.samples, rng,
                                                 threads=threads)
        bound = bounds_mod.bound_report(args.n, args.r, norms).selected
        ok = est.value <= bound + est.half_width
    elif args.metric == "wasserstein":
        if args.r != 2:
            raise DomainError("the Wasserstein diagnostic is available for r = 2 only")
        est = montecarlo.estimate_wasserstein(args.n, args.samples, rng, threads=threads)
        bound = bounds_mod.bound_r2_special(args.n, "wasserstein")
        ok = est.value <= bound + est.half_width
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown metric {args.metric!r}")
    row = {
        "metric": args.metric,
        "n": args.n,
        "r": args.r,
        "estimate": est.value,
        "half_width": est.half_width,
        "samples": est.samples,
        "method": est.method,
        "bound": bound,
        "within_bound": bool(ok),
    }
    if args.metric == "cos":
        row["t"] = args.t
    print(_dump(row))
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_rate(args) -> int:
    threads = _thread_cap(args.threads)
    try:
        n_list = [int(tok) for tok in args.n.split(",") if tok.strip()]
    except ValueError as exc:
        raise DomainError(f"bad --n list {args.n!r}: {exc}") from exc
    if not n_list or any(n < 1 for n in n_list):
        raise DomainError(f"bad --n list {args.n!r}")
    h = _test_function(args.h, args.t)
    rows = montecarlo.rate_experiment(args.r, n_list, h, mode=args.mode,
                                      samples=args.samples,
                                      rng=montecarlo.RngContract(seed=args.seed),
                                      threads=threads)
    ok = True
    for row in rows:
        print(_dump(row))
        if row["gap_below_bound"] is False:
            ok = False
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="friedman-bounds",
        description="Friedman's chi-square test with explicit approximation-error bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the rank test on a CSV file")
    p_test.add_argument("input", help="CSV path: rows are trials, columns treatments")
    p_test.add_argument("--format", choices=("scores", "ranks"), default="scores")
    p_test.add_argument("--json", action="store_true")
    p_test.set_defaults(fn=_cmd_test)

    p_bounds = sub.add_parser("bounds", help="evaluate the explicit bounds")
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--r", type=int, required=True)
    p_bounds.add_argument("--h1", type=float, default=1.0)
    p_bounds.add_argument("--h2", type=float, default=1.0)
    p_bounds.add_argument("--h3", type=float, default=1.0)
    p_bounds.add_argument("--json", action="store_true")
    p_bounds.set_defaults(fn=_cmd_bounds)

    p_verify = sub.add_parser("verify", help="run the exact verification suites")
    p_verify.add_argument("--suite", choices=("lemmas", "coupling", "stein", "identities", "all"),
                          default="all")
    p_verify.add_argument("--r-max", type=int, default=6, dest="r_max")
    p_verify.add_argument("--n-max", type=int, default=4, dest="n_max")
    p_verify.add_argument("--p-max", type=int, default=6, dest="p_max")
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(fn=_cmd_verify)

    p_dist = sub.add_parser("distance", help="distance estimate gated on its bound")
    p_dist.add_argument("--r", type=int, required=True)
    p_dist.add_argument("--n", type=int, required=True)
    p_dist.add_argument("--metric", choices=("kolmogorov", "cos", "wasserstein"),
                        default="kolmogorov")
    p_dist.add_argument("--mode", choices=("exact", "mc"), default="mc")
    p_dist.add_argument("--samples", type=int, default=1_000_000)
    p_dist.add_argument("--seed", type=int, default=0)
    p_dist.add_argument("--t", type=float, default=1.0)
    p_dist.add_argument("--threads", type=int, default=1)
    p_dist.set_defaults(fn=_cmd_distance)

    p_rate = sub.add_parser("rate", help="gap-versus-bound table across n")
    p_rate.add_argument("--r", type=int, required=True)
    p_rate.add_argument("--h", choices=("x", "x2", "cos", "sin"), default="x2")
    p_rate.add_argument("--t", type=float, default=1.0)
    p_rate.add_argument("--n", type=str, required=True, help="comma-separated trial counts")
    p_rate.add_argument("--mode", choices=("auto", "exact", "mc"), default="auto")
    p_rate.add_argument("--samples", type=int, default=1_000_000)
    p_rate.add_argument("--seed", type=int, default=0)
    p_rate.add_argument("--threads", type=int, default=1)
    p_rate.set_defaults(fn=_cmd_rate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (TieError, NonFiniteError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FriedmanBoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
