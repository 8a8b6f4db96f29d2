#!/usr/bin/env python3
"""
bench - PGels benchmark command line
====================================
Runs the E(t) benchmark, the invariant check suite, and empirical rate fits.

Usage:
    # Desk-scale deterministic run (budget in prox evaluations)
    bench run --family logistic-l1 --j 1 --shape 50 200 10 --lambda 1 \\
        --algos pgels,npg,pg,fista,refista --trials 2 --iters 500 --out results/smoke

    # Wall-clock run from a suite file, CLI flags override the file
    bench run --suite suites/logistic_full.yaml --tmax 20 --workers 4

    # Invariant checks
    bench check --quick
    bench check --category prox --json-output prox.json

    # Empirical convergence rate
    bench rate --algo npg --problem lasso --iters 400

Exit codes: 0 success, 1 failed checks / flagged cells / error, 130 interrupted.
"""

import argparse
import logging
import sys
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from . import __version__
from .benchmark import SuiteConfig, run_benchmark, write_outputs
from .checks import CATEGORIES, BenchChecker, Colors, print_header
from .diagnostics import empirical_rate
from .errors import PgelsError
from .instances import InstanceSpec, build_problem, lasso_problem
from .settings import BENCH, family_defaults
from .solvers import ALGORITHMS

logger = logging.getLogger(__name__)


def configure_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
    )


def _algos(text: str) -> List[str]:
    algos = [a.strip() for a in text.split(",") if a.strip()]
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown algorithms {unknown}; choose from {', '.join(ALGORITHMS)}")
    return algos


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="PGels benchmark harness",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Usage:")[1] if __doc__ else None,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=BENCH["log_level"],
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper,
                        help="Logging verbosity (default: BENCH_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run the E(t) benchmark")
    run.add_argument("--suite", metavar="FILE", help="YAML suite file")
    run.add_argument("--name", help="Suite name recorded in the outputs")
    run.add_argument("--family", choices=["logistic-l1", "ls-l1l2"])
    run.add_argument("--j", dest="j_values", type=int, nargs="+", metavar="J", help="Size multipliers")
    run.add_argument("--lambda", dest="lambdas", type=float, nargs="+", metavar="LAM",
                     help="Regularization parameters")
    run.add_argument("--algos", type=_algos, help=f"Comma-separated subset of {','.join(ALGORITHMS)}")
    run.add_argument("--trials", type=int)
    budget = run.add_mutually_exclusive_group()
    budget.add_argument("--tmax", dest="t_max", type=float, help="Wall-clock budget per run (seconds)")
    budget.add_argument("--iters", type=int, help="Prox-evaluation budget per run (deterministic mode)")
    run.add_argument("--seed", type=int, help="Base seed; trial t uses seed + t")
    run.add_argument("--delta", type=float, help="delta for pgels/pge (default per family)")
    run.add_argument("--shape", type=int, nargs=3, metavar=("M", "N", "S"), help="Override (m, n, s)")
    run.add_argument("--workers", type=int, default=BENCH["workers"], help="Parallel trials")
    run.add_argument("--out", default=BENCH["output_dir"], help="Output directory")

    check = sub.add_parser("check", help="Run the invariant check suite")
    check.add_argument("--category", choices=CATEGORIES, help="Run one category")
    check.add_argument("--quick", action="store_true", help="Fewer cases per check")
    check.add_argument("--json-output", metavar="FILE", help="Export results to JSON file")

    rate = sub.add_parser("rate", help="Fit the empirical convergence rate of one algorithm")
    rate.add_argument("--algo", default="npg", choices=ALGORITHMS)
    rate.add_argument("--problem", default="lasso", choices=["lasso", "logistic-l1", "ls-l1l2"])
    rate.add_argument("--shape", type=int, nargs=3, default=[50, 200, 10], metavar=("M", "N", "S"))
    rate.add_argument("--lambda", dest="lam", type=float, default=0.1)
    rate.add_argument("--seed", type=int, default=BENCH["seed"])
    rate.add_argument("--iters", type=int, default=400, help="Iterations of the fitted run")
    rate.add_argument("--delta", type=float, default=0.0)
    return parser


def suite_from_args(args) -> SuiteConfig:
    overrides = {
        "name": args.name,
        "family": args.family,
        "j_values": args.j_values,
        "lambdas": args.lambdas,
        "algorithms": args.algos,
        "trials": args.trials,
        "t_max": args.t_max,
        "iters": args.iters,
        "seed": args.seed,
        "delta": args.delta,
        "shape": tuple(args.shape) if args.shape else None,
    }
    if args.suite:
        return SuiteConfig.from_yaml(args.suite, **overrides)
    if args.family is None:
        raise ValueError("Either --suite or --family is required")
    defaults = family_defaults(args.family)
    fields = {
        "lambdas": defaults["lambdas"],
        "j_values": defaults["j_values"],
        "algorithms": defaults["algorithms"],
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return SuiteConfig(**fields)


def cmd_run(args) -> int:
    suite = suite_from_args(args)
    print_header(f"BENCHMARK: {suite.name} ({suite.family})")
    mode = f"{suite.iters} prox evaluations" if suite.deterministic else f"{suite.t_max} s"
    print(f"  Problem:    {family_defaults(suite.family)['description']}")
    print(f"  Cells:      {len(suite.cells())} (j={suite.j_values}, lambda={suite.lambdas})")
    print(f"  Algorithms: {', '.join(suite.algorithms)}")
    print(f"  Trials:     {suite.trials}, budget {mode}, delta={suite.resolved_delta}")

    result = run_benchmark(suite, workers=args.workers)
    paths = write_outputs(result, args.out)

    for cell in result.cells:
        icon = f"{Colors.RED}✗{Colors.RESET}" if cell.flagged else f"{Colors.GREEN}✓{Colors.RESET}"
        finals = ", ".join(f"{name}={cell.curves[name].mean[-1]:.3g}" for name in suite.algorithms)
        print(f"  {icon} j={cell.j} lambda={cell.lam:g}: E(end) {finals}")
    for label, path in paths.items():
        print(f"  {label:<9} {path}")
    return 1 if result.flagged else 0


def cmd_check(args) -> int:
    checker = BenchChecker(quick=args.quick)
    report = checker.run_category(args.category) if args.category else checker.run_all()
    if args.json_output:
        checker.export_json(args.json_output)
    return 0 if report.overall_status == "PASS" else 1


def cmd_rate(args) -> int:
    shape = tuple(args.shape)
    if args.problem == "lasso":
        problem, _ = lasso_problem(shape, args.lam, args.seed)
    else:
        problem, _ = build_problem(InstanceSpec(family=args.problem, lam=args.lam, seed=args.seed, shape=shape))
    fit, gaps, zeta = empirical_rate(problem, args.algo, args.iters, delta=args.delta)

    print_header(f"RATE: {args.algo} on {args.problem} {shape}")
    print(f"  zeta (reference objective): {zeta:.12g}")
    print(f"  usable gaps:                {gaps.size}")
    print(f"  model:                      {fit.model}")
    label = "rho" if fit.model == "geometric" else "exponent"
    print(f"  {label + ':':<28}{fit.parameter:.6g}")
    print(f"  R^2 geometric / power:      {fit.geometric_quality:.4f} / {fit.power_quality:.4f}")
    if gaps.size:
        print(f"  gap range:                  {gaps.max():.3e} .. {gaps.min():.3e}")
    return 0


COMMANDS = {"run": cmd_run, "check": cmd_check, "rate": cmd_rate}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    np.seterr(over="ignore", under="ignore")

    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print(f"\n{Colors.YELLOW}Interrupted by user{Colors.RESET}")
        return 130
    except (ValidationError, PgelsError, ValueError, OSError) as e:
        print(f"\n{Colors.RED}Error: {e}{Colors.RESET}")
        logger.debug("Fatal error", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
