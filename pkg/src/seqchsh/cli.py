"""Command-line front end.

Exit codes: 0 success, 1 usage/configuration error, 2 numeric-consistency failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analytics, emit
from .errors import NumericConsistencyError, SeqChshError
from .measurements import default_angles, default_bundle
from .sequential import ScenarioConfig, check_tsirelson, run_scenario
from .states import SchmidtSpec, k_param, make_spec, pair_slack
from .verify import run_suites

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
FAULTS = {"drop-input-average": 1.0}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ordered_map(fn, items, jobs: int):
    """Evaluate ``fn`` over ``items`` on up to ``jobs`` threads; results keep input order."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        s, t = text.lower().split("x")
        return int(s), int(t)
    except ValueError as exc:
        raise UsageError(f"--dims must look like SxT, got {text!r}") from exc


def _parse_coeffs(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--coeffs must be comma-separated numbers, got {text!r}") from exc


def _load_spec(args) -> SchmidtSpec:
    if args.spec:
        if args.coeffs or args.dims:
            raise UsageError("give either --spec or --coeffs/--dims, not both")
        return SchmidtSpec.load(args.spec, strict=args.strict)
    if not (args.coeffs and args.dims):
        raise UsageError("simulate needs --coeffs and --dims (or --spec FILE)")
    s, t = _parse_dims(args.dims)
    return make_spec(_parse_coeffs(args.coeffs), s, t, strict=args.strict)


def _angle(value, degrees: bool):
    if value is None:
        return None
    return math.radians(value) if degrees else value


def _default_p(K: float) -> float:
    """Midpoint of the double-violation interval when it exists, else 1/2."""
    if K > 0:
        iv = analytics.feasible_interval(K)
        if iv.nonempty:
            return 0.5 * (iv.p_low + iv.p_high)
    return 0.5


def cmd_simulate(args, out, err) -> int:
    spec = _load_spec(args)
    K = k_param(spec)
    theta1 = _angle(args.theta1, args.degrees)
    theta2 = _angle(args.theta2, args.degrees)
    d1, d2 = default_angles(spec)
    p = _default_p(K) if args.p is None else args.p
    bundle = default_bundle(spec, theta1, theta2, p)
    weight = FAULTS.get(args.fault, 0.5)
    report = run_scenario(ScenarioConfig(spec, bundle, args.bobs, weight))
    for st in report.stages:
        check_tsirelson(st.s_value)
    for v in report.mixed:
        check_tsirelson(v)

    meta = {
        "coeffs": list(spec.coeffs), "dim_a": spec.dim_a, "dim_b": spec.dim_b,
        "K": K, "pair_slack": pair_slack(spec),
        "theta1_source": "default arctan(K)" if theta1 is None else "user",
        "theta2_source": "default arctan(2K)" if theta2 is None else "user",
        "p_source": "default" if args.p is None else "user",
    }
    if args.format == "json":
        report = type(report)(report.stages, report.mixed, report.mix_p, report.thetas, meta)
        text = report.to_json()
    else:
        comments = [f"{k}={emit.fmt(v) if isinstance(v, float) else v}"
                    for k, v in meta.items() if k != "coeffs"]
        comments.insert(0, "coeffs=" + ",".join(emit.fmt(c) for c in spec.coeffs))
        comments += [f"theta1={emit.fmt(bundle.thetas[0])}",
                     f"theta2={emit.fmt(bundle.thetas[1])}", f"p={emit.fmt(p)}"]
        rows = [(st.k, st.lam, st.s_value, report.s_mixed(st.k), st.trace, st.min_eig)
                for st in report.stages]
        text = emit.csv_text(["k", "lambda", "S_k_lambda", "S_k_mixed", "trace", "min_eig"],
                             rows, comments)
    emit.write_output(text, args.out, out)

    summary = out if args.out else err
    print(f"K = {K:.6f}   theta1 = {bundle.thetas[0]:.6f}   theta2 = {bundle.thetas[1]:.6f}"
          f"   p = {p:.6f}", file=summary)
    print(f"{'k':>3} {'S_k^1':>10} {'S_k^2':>10} {'S_k':>10}", file=summary)
    for k in range(1, report.n_bobs + 1):
        flag = "  exploratory (k>2)" if k > 2 else ""
        print(f"{k:>3} {report.s(k, 1):10.6f} {report.s(k, 2):10.6f} "
              f"{report.s_mixed(k):10.6f}{flag}", file=summary)
    if report.n_bobs >= 2:
        print(f"double violation: {'yes' if report.double_violation else 'no'}", file=summary)
    return EXIT_OK


def _grid_K(n: int) -> list[float]:
    return [j / n for j in range(1, n + 1)]


def region_rows(Ks, p_grid: int, jobs: int = 1):
    ps = np.linspace(0.0, 1.0, p_grid)

    def rows_for(K):
        rows = []
        for p in ps:
            s1, s2 = analytics.mixed_scores(float(p), K)
            check_tsirelson(s1)
            check_tsirelson(s2)
            rows.append((float(p), K, s1, s2,
                         analytics.violates(s1) and analytics.violates(s2)))
        return rows, analytics.feasible_interval(K)

    results = _ordered_map(rows_for, Ks, jobs)
    rows = [r for block, _ in results for r in block]
    intervals = [(K, iv.p_low, iv.p_high, iv.nonempty) for K, (_, iv) in zip(Ks, results)]
    return rows, intervals


def cmd_region(args, out, err) -> int:
    if args.K is not None:
        Ks = [args.K]
    elif args.K_grid is not None:
        if args.K_grid < 1:
            raise UsageError("--K-grid must be at least 1")
        Ks = _grid_K(args.K_grid)
    else:
        raise UsageError("region needs --K or --K-grid")
    if args.p_grid < 2:
        raise UsageError("--p-grid must be at least 2")
    rows, intervals = region_rows(Ks, args.p_grid, args.jobs)
    kc = analytics.critical_K()
    if args.format == "json":
        text = emit.json_text({
            "cells": [dict(zip(("p", "K", "S1", "S2", "both_violate"), r)) for r in rows],
            "intervals": [dict(zip(("K", "p_low", "p_high", "nonempty"), r)) for r in intervals],
            "critical_K": kc,
        })
    else:
        text = emit.csv_text(["p", "K", "S1", "S2", "both_violate"], rows, footer=[
            (["K", "p_low", "p_high", "nonempty"], intervals),
            (["critical_K"], [(kc,)]),
        ])
    emit.write_output(text, args.out, out)
    return EXIT_OK


def tradeoff_rows(K: float, samples: int):
    grid = set(np.linspace(0.0, math.pi / 2, samples).tolist())
    grid |= {math.atan(K), math.atan(2 * K)}
    rows = []
    for theta in sorted(grid):
        s1c1 = float(analytics.bound_s1_case1(theta, K))
        s2c1 = float(analytics.bound_s2_case1(theta, K))
        s1c2 = float(analytics.bound_s1_case2(theta, K))
        s2c2 = float(analytics.bound_s2_case2(theta, K))
        residual = analytics.tradeoff_case2(min(s1c2, 2 * K), K) - s2c2
        for v in (s1c1, s2c1, s1c2, s2c2):
            check_tsirelson(v)
        rows.append((theta, s1c1, s2c1, s1c2, s2c2, residual))
    return rows


def cmd_tradeoff(args, out, err) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    analytics._check_K(args.K)
    rows = tradeoff_rows(args.K, args.samples)
    header = ["theta", "S1hat_c1", "S2hat_c1", "S1hat_c2", "S2hat_c2", "eq9_residual"]
    if args.format == "json":
        text = emit.json_text({"K": args.K, "rows": [dict(zip(header, r)) for r in rows]})
    else:
        text = emit.csv_text(header, rows, comments=[f"K={emit.fmt(args.K)}"])
    emit.write_output(text, args.out, out)
    return EXIT_OK


def cmd_optimize(args, out, err) -> int:
    res = analytics.optimize_min_violation(args.K, args.grid)
    check_tsirelson(res.min_score)
    header = ["K", "theta1", "theta2", "p", "min_score", "double_violation"]
    row = (args.K, res.theta1, res.theta2, res.p, res.min_score,
           analytics.violates(res.min_score))
    if args.format == "json":
        text = emit.json_text(dict(zip(header, row)))
    else:
        text = emit.csv_text(header, [row], comments=[f"grid={args.grid}"])
    emit.write_output(text, args.out, out)
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    weight = FAULTS.get(args.fault, 0.5)
    results = run_suites(seed=args.seed, input_weight=weight)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name:<24} checks={r.checks:<6} {r.seconds:7.3f}s  {r.detail}",
              file=out)
    ok = all(r.passed for r in results)
    print("all suites passed" if ok else "verification FAILED", file=out)
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqchsh",
                     description="Sequential CHSH nonlocality sharing with projective measurements")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--jobs", type=int, default=1)

    sim = sub.add_parser("simulate", help="run the sequential scenario for a Schmidt state")
    sim.add_argument("--coeffs", help="comma-separated Schmidt weights")
    sim.add_argument("--dims", help="local dimensions as SxT")
    sim.add_argument("--spec", help='JSON file {"coeffs": [...], "dim_a": s, "dim_b": t}')
    sim.add_argument("--theta1", type=float)
    sim.add_argument("--theta2", type=float)
    sim.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    sim.add_argument("--p", type=float, help="probability of branch 1")
    sim.add_argument("--bobs", type=int, default=2)
    sim.add_argument("--strict", action="store_true", help="reject non-normalized weights")
    sim.add_argument("--fault", choices=sorted(FAULTS), help=argparse.SUPPRESS)
    common(sim)

    reg = sub.add_parser("region", help="double-violation region over (p, K)")
    reg.add_argument("--K", type=float)
    reg.add_argument("--K-grid", type=int, dest="K_grid")
    reg.add_argument("--p-grid", type=int, dest="p_grid", default=101)
    common(reg)

    tr = sub.add_parser("tradeoff", help="closed-form bounds along theta")
    tr.add_argument("--K", type=float, required=True)
    tr.add_argument("--samples", type=int, default=91)
    common(tr)

    opt = sub.add_parser("optimize", help="grid search maximizing min(S1, S2)")
    opt.add_argument("--K", type=float, required=True)
    opt.add_argument("--grid", type=int, default=32)
    common(opt)

    ver = sub.add_parser("verify", help="run the self-verification suites")
    ver.add_argument("--seed", type=int, default=12345)
    ver.add_argument("--fault", choices=sorted(FAULTS), help=argparse.SUPPRESS)
    return parser


COMMANDS = {"simulate": cmd_simulate, "region": cmd_region, "tradeoff": cmd_tradeoff,
            "optimize": cmd_optimize, "verify": cmd_verify}


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except NumericConsistencyError as exc:
        print(f"numeric consistency failure: {exc}", file=err)
        return EXIT_NUMERIC
    except (SeqChshError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
