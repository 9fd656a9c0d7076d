"""Command-line front end.

Subcommands cover the transform pipeline (conjugate, biconjugate, convolve,
classify, transform), the risk functionals (premium, avar, dual-gap), the
stochastic orders (order, crossing, consistency) and the acceptance battery
(selftest).  Grid functions travel as CSV with a self-describing comment
header; instances, distributions and verdicts travel as JSON.  Exit codes:
0 success, 1 input error, 2 a refuted property or failed order assertion
(the JSON report then carries the counterexample).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .gridfn import (ExpFunction, GGAffine, GridFunction, Indicator, LogGrid,
                     Polynomial, SampleTable, check_gg_convex,
                     classify_convexities, make_grid_function, read_csv,
                     write_csv)
from .orders import (consistency_test, distribution_from_json, ga_order_leq,
                     order_leq, sign_change_count, single_crossing_ga_cx)
from .riskmeasures import (FiniteProbSpace, OrliczSpec, PositiveRandomVariable,
                           RiskMeasureSpec, ScenarioMeasure, avar,
                           dual_representation_eval, orlicz_premium)
from .acceptance import DEFAULT_SEED, run_all


def _fail(msg: str) -> "SystemExit":
    print(f"error: {msg}", file=sys.stderr)
    return SystemExit(1)


# -- input parsing ------------------------------------------------------------------


def parse_grid(text: str) -> LogGrid:
    """lo:hi:n, e.g. 1e-4:1e4:2048."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad grid spec {text!r}, expected lo:hi:n")
    return LogGrid(float(parts[0]), float(parts[1]), int(parts[2]))


def parse_descriptor(text: str):
    """exp | affine:A,B | indicator:lo,hi,level | poly:c0,c1,... |
    table:x1=f1,x2=f2,..."""
    if text == "exp":
        return ExpFunction()
    head, _, rest = text.partition(":")
    if head == "affine":
        a, b = (float(v) for v in rest.split(","))
        return GGAffine(a, b)
    if head == "indicator":
        vals = [float(v) for v in rest.split(",")]
        if len(vals) == 2:
            vals.append(1.0)
        return Indicator(vals[0], vals[1], vals[2])
    if head == "poly":
        return Polynomial(tuple(float(v) for v in rest.split(",")))
    if head == "table":
        xs, fs = [], []
        for pair in rest.split(","):
            x, _, f = pair.partition("=")
            xs.append(float(x))
            fs.append(math.inf if f.strip() == "inf" else float(f))
        return SampleTable(tuple(xs), tuple(fs))
    raise ValueError(f"unknown function descriptor {text!r}")


def load_grid_function(args) -> GridFunction:
    if getattr(args, "infile", None):
        return read_csv(args.infile)
    if getattr(args, "fn", None):
        grid = parse_grid(args.grid) if args.grid else LogGrid.default()
        return make_grid_function(parse_descriptor(args.fn), grid)
    raise ValueError("provide either --fn or --in")


def load_instance(path: str):
    """Instance JSON: {"probs": [...], "values": [...]}"""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "probs" not in doc or "values" not in doc:
        raise ValueError(f"{path}: expected an object with 'probs' and 'values'")
    P = FiniteProbSpace(np.asarray(doc["probs"], dtype=float))
    X = PositiveRandomVariable(np.asarray(doc["values"], dtype=float))
    if X.n != P.n:
        raise ValueError(f"{path}: 'probs' and 'values' lengths differ")
    return X, P


def load_distribution(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return distribution_from_json(fh.read())


def parse_phi(text: str) -> OrliczSpec:
    """power:p | log-affine | exponential | table:x1=v1,..."""
    head, _, rest = text.partition(":")
    if head == "power":
        return OrliczSpec.power(float(rest))
    if head == "log-affine":
        return OrliczSpec.log_affine()
    if head == "exponential":
        return OrliczSpec.exponential()
    if head == "table":
        xs, vs = [], []
        for pair in rest.split(","):
            x, _, v = pair.partition("=")
            xs.append(float(x))
            vs.append(float(v))
        return OrliczSpec.table(xs, vs)
    raise ValueError(f"unknown Orlicz descriptor {text!r}")


def load_spec(path: str) -> RiskMeasureSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError(f"{path}: expected an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "geometric-mean":
        return RiskMeasureSpec.geometric_mean()
    if kind == "p-norm":
        return RiskMeasureSpec.p_norm(float(doc["p"]))
    if kind == "orlicz":
        fam = doc.get("family", "power")
        if fam == "power":
            return RiskMeasureSpec.orlicz_premium(OrliczSpec.power(float(doc["p"])))
        if fam == "log-affine":
            return RiskMeasureSpec.orlicz_premium(OrliczSpec.log_affine())
        if fam == "exponential":
            return RiskMeasureSpec.orlicz_premium(OrliczSpec.exponential())
        if fam == "table":
            return RiskMeasureSpec.orlicz_premium(
                OrliczSpec.table(doc["x"], doc["v"]))
        raise ValueError(f"unknown Orlicz family {fam!r}")
    if kind == "exp-avar-log":
        return RiskMeasureSpec.exp_avar_log(float(doc["lam"]))
    if kind == "worst-case-geometric":
        scen = tuple(ScenarioMeasure(np.asarray(d, dtype=float))
                     for d in doc["densities"])
        return RiskMeasureSpec.worst_case_geometric(scen)
    if kind == "penalized-geometric":
        scen = tuple(ScenarioMeasure(np.asarray(d, dtype=float))
                     for d in doc["densities"])
        return RiskMeasureSpec.penalized_geometric(
            scen, tuple(float(a) for a in doc["alphas"]))
    if kind == "exp-monetary-log":
        if doc.get("monetary") == "entropic":
            gamma = float(doc.get("gamma", 1.0))

            def entropic(z: np.ndarray, probs: np.ndarray) -> float:
                a = np.log(probs) + gamma * z
                m = float(np.max(a))
                return (m + math.log(float(np.sum(np.exp(a - m))))) / gamma

            return RiskMeasureSpec.exp_monetary_log(entropic, name=f"entropic:{gamma}")
        raise ValueError("exp-monetary-log JSON supports the 'entropic' functional")
    raise ValueError(f"unknown risk measure kind {kind!r}")


def _emit_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, default=float)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _grid_warnings(f: GridFunction) -> list[str]:
    warn = []
    if bool(np.any(np.isneginf(f.log_values))):
        warn.append("input attains the value 0; its conjugate is identically "
                    "infinite and the calculus rules follow the 0*inf "
                    "conventions")
    return warn


# -- subcommand handlers --------------------------------------------------------------


def _cmd_conjugate(args) -> int:
    from .transform import gg_conjugate
    f = load_grid_function(args)
    dual = parse_grid(args.dual_grid) if args.dual_grid else f.grid
    out = gg_conjugate(f, dual)
    write_csv(args.out, out, version=__version__)
    _emit_json({"command": "conjugate", "cover": list(out.cover) if out.cover else None,
                "warnings": _grid_warnings(f), "out": args.out}, args.report)
    return 0


def _cmd_biconjugate(args) -> int:
    from .transform import gg_biconjugate
    f = load_grid_function(args)
    dual = parse_grid(args.dual_grid) if args.dual_grid else f.grid
    out = gg_biconjugate(f, dual)
    write_csv(args.out, out, version=__version__)
    _emit_json({"command": "biconjugate",
                "cover": list(out.cover) if out.cover else None,
                "warnings": _grid_warnings(f), "out": args.out}, args.report)
    return 0


def _cmd_convolve(args) -> int:
    from .transform import mult_inf_convolution
    f = read_csv(args.f) if args.f.endswith(".csv") else make_grid_function(
        parse_descriptor(args.f), parse_grid(args.grid) if args.grid else LogGrid.default())
    g = read_csv(args.g) if args.g.endswith(".csv") else make_grid_function(
        parse_descriptor(args.g), parse_grid(args.grid) if args.grid else LogGrid.default())
    out = mult_inf_convolution(f, g)
    write_csv(args.out, out, version=__version__)
    return 0


def _cmd_classify(args) -> int:
    f = load_grid_function(args)
    flags = classify_convexities(f)
    verdict = check_gg_convex(f)
    doc = {"command": "classify",
           "aa": flags.aa, "ag": flags.ag, "ga": flags.ga, "gg": flags.gg,
           "nondecreasing": flags.nondecreasing,
           "gg_holds": verdict.holds,
           "gg_counterexample": list(verdict.counterexample) if verdict.counterexample else None,
           "warnings": _grid_warnings(f)}
    _emit_json(doc, args.report)
    return 0


def _cmd_transform(args) -> int:
    from .transform import TransformParams, duality_transform
    f = load_grid_function(args)
    out = duality_transform(f, TransformParams(args.A, args.B, args.C))
    write_csv(args.out, out, version=__version__)
    _emit_json({"command": "transform", "A": args.A, "B": args.B, "C": args.C,
                "cover": list(out.cover) if out.cover else None,
                "warnings": _grid_warnings(f), "out": args.out}, args.report)
    return 0


def _cmd_premium(args) -> int:
    X, P = load_instance(args.dist)
    phi = parse_phi(args.phi)
    value = orlicz_premium(X, P, phi, tol=args.tol)
    print(f"{value:.10g}")
    if args.report:
        _emit_json({"command": "premium", "phi": args.phi, "value": value},
                   args.report)
    return 0


def _cmd_avar(args) -> int:
    X, P = load_instance(args.dist)
    value = avar(X.values, P, args.lam)
    print(f"{value:.10g}")
    if args.report:
        _emit_json({"command": "avar", "lam": args.lam, "value": value},
                   args.report)
    return 0


def _cmd_dual_gap(args) -> int:
    X, P = load_instance(args.dist)
    spec = load_spec(args.spec)
    with open(args.family, "r", encoding="utf-8") as fh:
        fam_doc = json.load(fh)
    if not isinstance(fam_doc, dict) or "family" not in fam_doc:
        raise ValueError(f"{args.family}: expected an object with a 'family' array")
    family = [PositiveRandomVariable(np.asarray(v, dtype=float))
              for v in fam_doc["family"]]
    res = dual_representation_eval(spec, X, P, family)
    doc = {"command": "dual-gap", "value": res.value, "gap": res.gap,
           "monotone_marker": res.monotone_marker,
           "homogeneity_marker": res.homogeneity_marker,
           "best_Y": res.best.values.tolist() if res.best is not None else None}
    _emit_json(doc, args.report)
    tol = 1e-9
    if res.gap < -tol * max(1.0, abs(res.value)):
        return 2
    return 0


def _cmd_order(args) -> int:
    F = load_distribution(args.f)
    G = load_distribution(args.g)
    if args.mode in ("st", "cx", "icx"):
        v = order_leq(F, G, args.mode)
    else:
        v = ga_order_leq(F, G, args.mode)
    doc = {"command": "order", "mode": args.mode, "holds": v.holds,
           "witness": v.witness}
    _emit_json(doc, args.report)
    return 0 if v.holds else 2


def _cmd_crossing(args) -> int:
    F = load_distribution(args.f)
    G = load_distribution(args.g)
    count, seq = sign_change_count(F, G)
    res = single_crossing_ga_cx(F, G)
    _emit_json({"command": "crossing", "count": count,
                "sequence": list(seq), "applicable": res.applicable,
                "implied": res.implied}, args.report)
    return 0


def _cmd_consistency(args) -> int:
    F = load_distribution(args.f)
    G = load_distribution(args.g)
    spec = load_spec(args.spec)
    res = consistency_test(spec, F, G, mode=args.mode)
    doc = {"command": "consistency", "mode": args.mode, "ordered": res.ordered,
           "rho_F": res.rho_F, "rho_G": res.rho_G, "consistent": res.consistent}
    _emit_json(doc, args.report)
    return 0 if res.consistent else 2


def _cmd_selftest(args) -> int:
    seed = args.seed
    report = run_all(seed=seed)
    print(f"acceptance battery (seed {seed})")
    for r in report.results:
        print("  " + r.line())
    print(f"total wall time: {report.total_elapsed:.1f}s")
    doc = {"command": "selftest", "seed": seed,
           "all_passed": report.all_passed,
           "criteria": [{"id": r.cid, "name": r.name, "passed": r.passed,
                         "details": r.details} for r in report.results]}
    if args.report:
        _emit_json(doc, args.report)
    ok = report.all_passed and report.total_elapsed < 60.0
    if report.total_elapsed >= 60.0:
        print("FAIL: wall time budget of 60s exceeded")
    return 0 if ok else 2


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ggconvex",
        description="multiplicative convex analysis, return risk measures, "
                    "and multiplicative stochastic orders")
    ap.add_argument("--version", action="version", version=f"ggconvex {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_fn_args(p, dual=False):
        p.add_argument("--fn", help="built-in descriptor, e.g. exp, affine:2,1, "
                                    "indicator:2,2,3, poly:1,1,1")
        p.add_argument("--in", dest="infile", help="input grid CSV")
        p.add_argument("--grid", help="lo:hi:n, default 1e-4:1e4:2048")
        if dual:
            p.add_argument("--dual-grid", dest="dual_grid",
                           help="dual grid lo:hi:n, default = primal")
        p.add_argument("--report", help="optional JSON report path")

    p = sub.add_parser("conjugate", help="multiplicative convex conjugate")
    add_fn_args(p, dual=True)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(handler=_cmd_conjugate)

    p = sub.add_parser("biconjugate", help="double conjugate (convex envelope)")
    add_fn_args(p, dual=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_biconjugate)

    p = sub.add_parser("convolve", help="multiplicative inf-convolution")
    p.add_argument("--f", required=True, help="CSV path or descriptor")
    p.add_argument("--g", required=True, help="CSV path or descriptor")
    p.add_argument("--grid", help="grid for descriptor inputs")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_convolve)

    p = sub.add_parser("classify", help="convexity flags of a sampled function")
    add_fn_args(p)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("transform", help="general duality transform "
                                         "A x^log(B) f*(B x^C)")
    add_fn_args(p)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_transform)

    p = sub.add_parser("premium", help="Orlicz premium of an instance")
    p.add_argument("--dist", required=True, help="instance JSON "
                                                 '{"probs": [...], "values": [...]}')
    p.add_argument("--phi", required=True, help="power:p | log-affine | "
                                                "exponential | table:x=v,...")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--report")
    p.set_defaults(handler=_cmd_premium)

    p = sub.add_parser("avar", help="average value at risk of an instance")
    p.add_argument("--dist", required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--report")
    p.set_defaults(handler=_cmd_avar)

    p = sub.add_parser("dual-gap", help="dual representation lower bound and gap")
    p.add_argument("--dist", required=True)
    p.add_argument("--spec", required=True, help="risk measure spec JSON")
    p.add_argument("--family", required=True, help='{"family": [[...], ...]}')
    p.add_argument("--report")
    p.set_defaults(handler=_cmd_dual_gap)

    p = sub.add_parser("order", help="stochastic order decision")
    p.add_argument("--mode", required=True,
                   choices=["st", "cx", "icx", "ga-cx", "ga-icx"])
    p.add_argument("--f", required=True, help="distribution JSON")
    p.add_argument("--g", required=True)
    p.add_argument("--report")
    p.set_defaults(handler=_cmd_order)

    p = sub.add_parser("crossing", help="sign-change count and single-crossing "
                                        "criterion")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--report")
    p.set_defaults(handler=_cmd_crossing)

    p = sub.add_parser("consistency", help="order verdict vs risk functional")
    p.add_argument("--spec", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--mode", default="ga-cx", choices=["ga-cx", "ga-icx"])
    p.add_argument("--report")
    p.set_defaults(handler=_cmd_consistency)

    p = sub.add_parser("selftest", help="run the acceptance battery")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--report", help="optional JSON report path")
    p.set_defaults(handler=_cmd_selftest)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if "GG_SEED" in os.environ and hasattr(args, "seed"):
        args.seed = int(os.environ["GG_SEED"])
    try:
        return args.handler(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
