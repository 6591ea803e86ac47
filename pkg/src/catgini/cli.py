"""Command line interface.

Exit codes: 0 success, 2 input error, 3 degenerate statistic, 4 aborted
simulation replicate.
"""
from __future__ import annotations

import argparse
import sys


from . import __version__
from .core import (
    DataError,
    DegeneracyError,
    RngStream,
    load_csv,
    load_paired_csv,
)
from .gini import distance_correlation, gini_correlation
from .harness import (
    ExperimentPlan,
    ReplicateAbortError,
    dumps17,
    export_report,
    fmt_float,
    load_plan,
    run_beta_sweep,
)
from .inference import (
    ADDED_VALUE_HYPOTHESIS,
    HYPOTHESIS,
    METHODS,
    BootstrapResult,
    added_value_pair,
    asn_test,
    bootstrap_test,
    cgc_difference,
    permutation_independence_test,
    projection_test,
)
from .simgen import DESIGNS, ScenarioConfig

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_ABORT = 0, 2, 3, 4
DEFAULT_SEED = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _columns(text):
    if text is None:
        return None
    cols = [c.strip() for c in text.split(",") if c.strip()]
    return [int(c) if c.isdigit() else c for c in cols]


def _floats(text):
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        k = int(round((stop - start) / step))
        return [round(start + i * step, 12) for i in range(k + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def _out(text):
    sys.stdout.write(text)


def _result_dict(res):
    if isinstance(res, BootstrapResult):
        return {"method": "bootstrap", "rho1_hat": res.rho1_hat, "rho2_hat": res.rho2_hat,
                "d_n": res.d0, "p_value": res.p_value, "B": res.b}
    return {"method": res.method, "rho1_hat": res.rho1_hat, "rho2_hat": res.rho2_hat,
            "d_n": res.d_n, "variance_hat": res.variance_hat, "z_score": res.z_score,
            "p_value": res.p_value}


def _run_test(pair, args):
    if args.method == "asN":
        return asn_test(pair, args.alpha)
    if args.method == "projection":
        return projection_test(pair, args.alpha)
    return bootstrap_test(pair, args.B, RngStream(args.seed))


def _report_test(args, pair, hypothesis, labels_xy, dcor):
    est = cgc_difference(pair)
    res = _run_test(pair, args)
    info = _result_dict(res)
    reject = res.reject(args.alpha) if isinstance(res, BootstrapResult) else res.reject
    if args.json:
        doc = {"hypothesis": hypothesis, "n": pair.n, "K": pair.n_classes,
               "p": pair.p, "q": pair.q, "alpha": args.alpha, "seed": args.seed,
               **info, "reject": reject, "distance_correlation": dcor}
        _out(dumps17(doc) + "\n")
        return
    g1, g2 = labels_xy
    lines = [
        hypothesis,
        f"n = {pair.n}, K = {pair.n_classes}, dim({g1}) = {pair.p}, dim({g2}) = {pair.q}",
        f"rho_g({g1},Z) estimate : {fmt_float(est.rho1_hat)}",
        f"rho_g({g2},Z) estimate : {fmt_float(est.rho2_hat)}",
        f"D_n                   : {fmt_float(est.d_n)}",
        f"method                : {info['method']}",
    ]
    if "variance_hat" in info:
        lines += [f"variance estimate     : {fmt_float(info['variance_hat'])}",
                  f"z score               : {fmt_float(info['z_score'])}"]
    else:
        lines.append(f"bootstrap replicates  : {info['B']} (seed {args.seed})")
    lines += [
        f"p-value               : {fmt_float(info['p_value'])}",
        f"decision at alpha={args.alpha:g} : {'reject H0' if reject else 'do not reject H0'}",
        f"distance correlation between X and Y (diagnostic): {fmt_float(dcor)}",
    ]
    _out("\n".join(lines) + "\n")


def cmd_compare(args) -> int:
    pair = load_paired_csv(args.csv, args.label, _columns(args.x), _columns(args.y))
    if args.swap:
        pair = pair.swapped()
    dcor = distance_correlation(pair.x, pair.y)
    _report_test(args, pair, HYPOTHESIS, ("X", "Y"), dcor)
    return EXIT_OK


def cmd_added_value(args) -> int:
    pair = load_paired_csv(args.csv, args.label, _columns(args.x), _columns(args.y))
    dcor = distance_correlation(pair.x, pair.y)
    _report_test(args, added_value_pair(pair), ADDED_VALUE_HYPOTHESIS, ("W", "X"), dcor)
    return EXIT_OK


def cmd_independence(args) -> int:
    d = load_csv(args.csv, args.label, _columns(args.features))
    res = permutation_independence_test(d, args.R, RngStream(args.seed))
    est = gini_correlation(d)
    if args.json:
        doc = {"hypothesis": "H0: rho_g(X,Z) = 0  vs  H1: rho_g(X,Z) > 0",
               "n": d.n, "K": d.n_classes, "d": d.d, "rho_hat": res.rho_hat,
               "gcov": est.gcov, "delta": est.delta, "R": args.R, "seed": args.seed,
               "p_value": res.p_value}
        _out(dumps17(doc) + "\n")
        return EXIT_OK
    _out("\n".join([
        "H0: rho_g(X,Z) = 0  vs  H1: rho_g(X,Z) > 0 (permutation test)",
        f"n = {d.n}, K = {d.n_classes}, dim(X) = {d.d}",
        f"rho_g(X,Z) estimate : {fmt_float(res.rho_hat)}",
        f"permutations        : {args.R} (seed {args.seed})",
        f"p-value             : {fmt_float(res.p_value)}",
    ]) + "\n")
    return EXIT_OK


def _plan_from_args(args) -> ExperimentPlan:
    if args.plan:
        plan = load_plan(args.plan)
        overrides = {}
        if args.seed_given:
            overrides["seed"] = args.seed
        if overrides:
            kv = plan.to_flat()
            kv.update(overrides)
            plan = ExperimentPlan.from_flat(kv)
        return plan
    sizes = tuple(int(v) for v in args.n.split(","))
    scenario = ScenarioConfig(design=args.design, dims=(args.p, args.q),
                              class_sizes=sizes, sigma_variant=args.sigma_variant,
                              seed=args.seed, exp_convention=args.exp_convention)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    return ExperimentPlan(scenario=scenario, beta_grid=tuple(_floats(args.beta_grid)),
                          replications=args.R, alpha=args.alpha, methods=methods,
                          bootstrap_b=args.B, mode=args.mode.replace("-", "_"),
                          seed=args.seed, timing=args.timing)


def cmd_simulate(args) -> int:
    plan = _plan_from_args(args)
    report = run_beta_sweep(plan)
    text = export_report(report, args.out, args.format)
    if args.out in (None, "-"):
        _out(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="catgini", description=(
        "Compare categorical Gini correlations of two predictor groups "
        "with a common categorical response."))
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, group_cols=True):
        p.add_argument("csv", help="input CSV with a header row")
        p.add_argument("--label", required=True, help="label column (name or 0-based index)")
        if group_cols:
            p.add_argument("--x", required=True, help="comma-separated x columns")
            p.add_argument("--y", required=True, help="comma-separated y columns")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    for name, fn, helptext in (
            ("compare", cmd_compare, "test rho_g(X,Z) > rho_g(Y,Z)"),
            ("added-value", cmd_added_value, "test whether Y adds to X")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--method", choices=METHODS, default="asN")
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--B", type=int, default=1000, help="bootstrap replicates")
        if name == "compare":
            p.add_argument("--swap", action="store_true", help="exchange the two groups")
        p.set_defaults(func=fn)

    p = sub.add_parser("independence", help="permutation test of rho_g(X,Z) = 0")
    common(p, group_cols=False)
    p.add_argument("--features", help="comma-separated feature columns (default: all but label)")
    p.add_argument("--R", type=int, default=999, help="number of permutations")
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("simulate", help="Monte Carlo size/power experiment")
    p.add_argument("--plan", help="plan file (flat key = value config)")
    p.add_argument("--design", default="ex1a")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--n", default="40,40,40", help="class sizes, comma separated")
    p.add_argument("--beta-grid", default="0:1:0.2", help="start:stop:step or a,b,c")
    p.add_argument("--methods", default="asN")
    p.add_argument("--R", type=int, default=3000, help="Monte Carlo replications")
    p.add_argument("--B", type=int, default=1000, help="bootstrap replicates")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mode", choices=("compare", "added-value", "added_value"),
                   default="compare")
    p.add_argument("--sigma-variant", choices=("independent", "ar"), default="independent")
    p.add_argument("--exp-convention", choices=("rate", "mean"), default="rate")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timing", action="store_true", help="record wall time (breaks byte reproducibility)")
    p.add_argument("--out", default="-", help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json", "markdown"), default="csv")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate":
        if args.design not in DESIGNS and not args.plan:
            print(f"catgini: error: unknown design {args.design!r}; valid designs: "
                  f"{', '.join(DESIGNS)}", file=sys.stderr)
            return EXIT_INPUT
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = DEFAULT_SEED
    try:
        return args.func(args)
    except ReplicateAbortError as exc:
        print(f"catgini: replicate aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except DegeneracyError as exc:
        print(f"catgini: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataError, ValueError, OSError) as exc:
        print(f"catgini: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
