"""Command-line surface: gen, optimize, sweep, eval, project, compare."""

from __future__ import annotations

import argparse
import json
import sys

from .harness import (
    convergence_compare,
    lorenz_audit,
    pareto_sweep,
    quantile_cumulative_utility,
    synthetic_prefs,
)
from .isotonic import permutahedron_project
from .model import dcg_exposure_weights, item_exposures, user_utilities
from .optimizer import run_optimizer
from .runio import (
    ConfigError,
    fmt_float,
    load_policy,
    load_prefs,
    load_run_config,
    load_vector,
    write_comparison,
    write_policy,
    write_prefs,
    write_sweep,
    write_trace,
)
from .welfare import GgfWeights, gini_index


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lorenz-rank",
        description="Fairness-aware stochastic ranking via rank-weighted welfare")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a seeded synthetic preference matrix")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--skew", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    opt = sub.add_parser("optimize", help="run one optimization")
    opt.add_argument("--prefs", required=True)
    opt.add_argument("--config", required=True)
    opt.add_argument("--out", required=True, help="policy JSON output")
    opt.add_argument("--trace", help="trace CSV output")
    opt.add_argument("--reciprocal", action="store_true",
                     help="treat the (square) matrix as mutual preferences")

    swp = sub.add_parser("sweep", help="Pareto sweep over the trade-off lambda")
    swp.add_argument("--prefs", required=True)
    swp.add_argument("--config", required=True)
    swp.add_argument("--lambdas", required=True,
                     help="comma-separated trade-off grid, e.g. 0.01,0.5,0.99")
    swp.add_argument("--out", required=True)
    swp.add_argument("--audit", action="store_true",
                     help="fail with a message if the sweep is jointly dominated")

    ev = sub.add_parser("eval", help="metrics of an existing policy")
    ev.add_argument("--prefs", required=True)
    ev.add_argument("--policy", required=True)
    ev.add_argument("--config", help="optional config for K and quantiles")
    ev.add_argument("--out", help="write metrics JSON here instead of stdout")

    proj = sub.add_parser("project", help="debug: permutahedron projection")
    proj.add_argument("--weights", required=True, help="CSV of rank weights")
    proj.add_argument("--z", required=True, help="CSV of the point to project")

    cmp_ = sub.add_parser("compare", help="smoothing vs subgradient convergence")
    cmp_.add_argument("--prefs", required=True)
    cmp_.add_argument("--config", required=True)
    cmp_.add_argument("--beta0s", default="1,10,100")
    cmp_.add_argument("--out", required=True)
    return parser


def _cmd_gen(args) -> int:
    prefs = synthetic_prefs(args.n, args.m, args.skew, args.seed)
    meta = {"command": "gen", "n": args.n, "m": args.m,
            "skew": args.skew, "seed": args.seed}
    write_prefs(args.out, prefs, meta)
    return 0


def _cmd_optimize(args) -> int:
    run = load_run_config(args.config)
    config = run.optimizer
    if args.reciprocal:
        config = config.replace(reciprocal=True)
        if config.objective not in ("reciprocal-ggf", "eq-utility"):
            config = config.replace(objective="reciprocal-ggf")
    prefs = load_prefs(args.prefs)
    exp = dcg_exposure_weights(prefs.m, config.K)
    policy, trace = run_optimizer(config, prefs, exp)
    meta = {"command": "optimize", **run.to_dict(),
            "reciprocal": config.reciprocal, "objective": config.objective}
    write_policy(args.out, policy, meta)
    if args.trace:
        write_trace(args.trace, trace, meta)
    return 0


def _cmd_sweep(args) -> int:
    run = load_run_config(args.config)
    try:
        grid = [float(t) for t in args.lambdas.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --lambdas value: {exc}") from exc
    prefs = load_prefs(args.prefs)
    exp = dcg_exposure_weights(prefs.m, run.optimizer.K)
    records = pareto_sweep(run.optimizer, grid, prefs, exp, quantiles=run.quantiles)
    meta = {"command": "sweep", **run.to_dict(), "lambdas": grid}
    write_sweep(args.out, records, meta)
    if args.audit:
        report = lorenz_audit(records)
        if report.violations:
            print(f"lorenz audit: {len(report.violations)} violation(s)",
                  file=sys.stderr)
            return 1
    return 0


def _cmd_eval(args) -> int:
    prefs = load_prefs(args.prefs)
    policy = load_policy(args.policy)
    quantiles = (0.25, 0.5)
    if args.config:
        quantiles = load_run_config(args.config).quantiles
    exp = dcg_exposure_weights(policy.m, policy.K)
    u = user_utilities(policy, prefs, exp)
    v = item_exposures(policy, exp)
    metrics = {
        "total_utility": float(u.sum()),
        "gini_user_utility": gini_index(u) if u.sum() > 0 else None,
        "gini_exposure": gini_index(v),
    }
    for q in quantiles:
        metrics[f"qcum_{q:.2f}"] = quantile_cumulative_utility(u, q)
    text = json.dumps(metrics, indent=2, sort_keys=True)
    if args.out:
        from . import __version__
        meta = json.dumps({"command": "eval", "policy": args.policy}, sort_keys=True)
        with open(args.out, "w") as fh:
            fh.write(f"# lorenz-rank {__version__} config={meta}\n{text}\n")
    else:
        print(text)
    return 0


def _cmd_project(args) -> int:
    try:
        weights = GgfWeights(load_vector(args.weights))
    except ValueError as exc:
        raise ConfigError(f"{args.weights}: {exc}") from exc
    z = load_vector(args.z)
    result = permutahedron_project(weights, z)
    print(",".join(fmt_float(x) for x in result.y))
    return 0


def _cmd_compare(args) -> int:
    run = load_run_config(args.config)
    try:
        betas = [float(t) for t in args.beta0s.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --beta0s value: {exc}") from exc
    prefs = load_prefs(args.prefs)
    exp = dcg_exposure_weights(prefs.m, run.optimizer.K)
    comparison = convergence_compare(run.optimizer, prefs, exp, beta0_grid=betas)
    meta = {"command": "compare", **run.to_dict(), "beta0s": betas}
    write_comparison(args.out, comparison, meta)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "eval": _cmd_eval,
    "project": _cmd_project,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
