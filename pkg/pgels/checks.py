"""
PGels Bench - Invariant Check Suite
===================================
Runs the library's correctness checks on small seeded problems and prints
a pass/fail report.

Categories:
1. gradients  - analytic gradients vs central differences, Lipschitz bounds
2. prox       - closed-form proximal maps vs the brute-force grid oracle
3. linesearch - re-evaluated acceptance criterion and inner-loop bounds on seeded runs
4. reductions - PGels(delta=0) == NPG iterate for iterate; mu0 = mu_max never shrinks
5. theory     - monitor, global bound, diminishing changes, final residual
6. rates      - FISTA gap decay and the geometric NPG rate on l1 least squares

Usage:
    bench check                       # everything
    bench check --category prox       # one category
    bench check --quick               # fewer cases
    bench check --json-output report.json
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, List

import numpy as np

from .diagnostics import check_trace, empirical_rate
from .instances import InstanceSpec, build_problem, lasso_problem, make_rng
from .losses import LeastSquaresData, LogisticData, least_squares_term, logistic_term
from .problem import gradient_check, lipschitz_check, prox_objective
from .prox import (
    L1MinusL2Term,
    L1Term,
    cube_grid,
    nonneg_indicator,
    project_nonneg,
    project_simplex,
    prox_oracle,
    simplex_directions,
    simplex_grid,
    simplex_indicator,
)
from .solvers import Budget, make_config, run_algorithm, run_npg, run_pgels

logger = logging.getLogger(__name__)

CATEGORIES = ("gradients", "prox", "linesearch", "reductions", "theory", "rates")
PROX_TOL = 1e-4
SOUNDNESS_CHECKS = ("potential-consistency", "window-max-consistency", "line-search-criterion", "inner-loop-bound")


# =============================================================================
# Report containers
# =============================================================================

@dataclass
class CheckResult:
    """Individual check result."""
    name: str
    status: str  # PASS, FAIL, SKIP
    message: str
    expected: Any = None
    actual: Any = None
    duration_ms: float = 0


@dataclass
class CheckCategory:
    name: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.status == "PASS")

    @property
    def failed(self) -> int:
        return sum(1 for c in self.checks if c.status == "FAIL")

    @property
    def skipped(self) -> int:
        return sum(1 for c in self.checks if c.status == "SKIP")

    @property
    def total(self) -> int:
        return len(self.checks)

    @property
    def status(self) -> str:
        return "PASS" if self.failed == 0 else "FAIL"


@dataclass
class CheckReport:
    start_time: str
    end_time: str = ""
    duration_seconds: float = 0
    categories: Dict[str, CheckCategory] = field(default_factory=dict)

    @property
    def total_passed(self) -> int:
        return sum(c.passed for c in self.categories.values())

    @property
    def total_failed(self) -> int:
        return sum(c.failed for c in self.categories.values())

    @property
    def total_skipped(self) -> int:
        return sum(c.skipped for c in self.categories.values())

    @property
    def overall_status(self) -> str:
        return "PASS" if self.total_failed == 0 else "FAIL"


# =============================================================================
# Console Output Helpers
# =============================================================================

class Colors:
    """ANSI color codes for terminal output."""
    GREEN = "\033[92m"
    RED = "\033[91m"
    YELLOW = "\033[93m"
    BLUE = "\033[94m"
    BOLD = "\033[1m"
    RESET = "\033[0m"


def print_header(text: str):
    print(f"\n{Colors.BOLD}{Colors.BLUE}{'=' * 70}{Colors.RESET}")
    print(f"{Colors.BOLD}{Colors.BLUE}{text.center(70)}{Colors.RESET}")
    print(f"{Colors.BOLD}{Colors.BLUE}{'=' * 70}{Colors.RESET}")


def print_result(check: CheckResult):
    if check.status == "PASS":
        icon, color = f"{Colors.GREEN}✓{Colors.RESET}", Colors.GREEN
    elif check.status == "FAIL":
        icon, color = f"{Colors.RED}✗{Colors.RESET}", Colors.RED
    else:
        icon, color = f"{Colors.YELLOW}⊘{Colors.RESET}", Colors.YELLOW
    print(f"  {icon} {color}{check.name}: {check.message}{Colors.RESET}")
    if check.status == "FAIL" and check.expected is not None:
        print(f"      Expected: {check.expected}")
        print(f"      Actual:   {check.actual}")


def print_final_summary(report: CheckReport):
    print_header("CHECK SUMMARY")
    status_color = Colors.GREEN if report.overall_status == "PASS" else Colors.RED
    print(f"\n  {Colors.BOLD}Overall Status: {status_color}{report.overall_status}{Colors.RESET}")
    print(f"\n  Duration: {report.duration_seconds:.1f} seconds")
    print(f"    {Colors.GREEN}Passed:  {report.total_passed}{Colors.RESET}")
    print(f"    {Colors.RED}Failed:  {report.total_failed}{Colors.RESET}")
    print(f"    {Colors.YELLOW}Skipped: {report.total_skipped}{Colors.RESET}")
    print("\n  Categories:")
    for name, category in report.categories.items():
        icon = "✓" if category.status == "PASS" else "✗"
        color = Colors.GREEN if category.status == "PASS" else Colors.RED
        print(f"    {color}{icon} {name}: {category.passed}/{category.total} passed{Colors.RESET}")
    print(f"\n{'=' * 70}\n")


# =============================================================================
# Checker
# =============================================================================

def _random_cases(rng, n: int, count: int):
    for _ in range(count):
        y = 2.0 * rng.standard_normal(n)
        nu = rng.uniform(0.1, 2.0)
        lam = rng.uniform(0.1, 1.0)
        yield y, nu, lam


def prox_disagreement(kind: str, n: int, cases: int, seed: int = 0) -> float:
    """Largest |objective(closed form) - objective(oracle)| over random subproblems."""
    rng = make_rng(seed)
    worst = 0.0
    for y, nu, lam in _random_cases(rng, n, cases):
        radius = 1.05 * max(float(np.abs(y).max()), 1.0)
        if kind == "l1":
            term = L1Term(lam)
            value, closed, grid, dirs = term.value, term.prox(y, nu), cube_grid(n, radius, 11), None
        elif kind == "l1-l2":
            term = L1MinusL2Term(lam)
            value, closed, grid, dirs = term.value, term.prox(y, nu), cube_grid(n, radius, 11), None
        elif kind == "nonneg":
            value = nonneg_indicator().value
            closed, grid, dirs = project_nonneg(y), cube_grid(n, radius, 11), None
        elif kind == "simplex":
            if n == 1:
                continue
            value = simplex_indicator().value
            closed, grid, dirs = project_simplex(y), simplex_grid(n, 21), simplex_directions(n)
        else:
            raise ValueError(f"Unknown prox kind: {kind}")
        oracle = prox_oracle(value, y, nu, grid, directions=dirs)
        gap = abs(prox_objective(value, closed, y, nu) - prox_objective(value, oracle, y, nu))
        worst = max(worst, gap)
    return worst


def tiny_logistic(seed: int = 0, shape=(30, 20, 4), lam: float = 0.1):
    problem, _ = build_problem(InstanceSpec(family="logistic-l1", lam=lam, seed=seed, shape=shape))
    return problem


def tiny_l12(seed: int = 0, shape=(30, 60, 4), lam: float = 0.1):
    problem, _ = build_problem(InstanceSpec(family="ls-l1l2", lam=lam, seed=seed, shape=shape))
    return problem


class BenchChecker:
    """Invariant suite grouped in categories."""

    def __init__(self, quick: bool = False):
        self.quick = quick
        self.report = CheckReport(start_time=datetime.now().isoformat())

    def _run(self, category: CheckCategory, name: str, fn: Callable[[], CheckResult]):
        start = time.time()
        try:
            result = fn()
        except Exception as e:
            logger.exception(f"Check {name} raised")
            result = CheckResult(name, "FAIL", f"{type(e).__name__}: {e}")
        result.name = name
        result.duration_ms = (time.time() - start) * 1000
        category.checks.append(result)
        print_result(result)

    # -------------------------------------------------------------------------
    def check_gradients(self) -> CheckCategory:
        print_header("CHECK: Gradients")
        category = CheckCategory("gradients")
        rng = make_rng(7)
        A = rng.standard_normal((15, 6))
        labels = np.where(rng.standard_normal(15) >= 0, 1.0, -1.0)
        labels[:2] = [1.0, -1.0]
        terms = {
            "least-squares": least_squares_term(LeastSquaresData(A=A, b=rng.standard_normal(15))),
            "logistic": logistic_term(LogisticData.from_features(A, labels)),
        }
        for name, term in terms.items():
            dim = 6 if name == "least-squares" else 7
            points = [rng.standard_normal(dim) for _ in range(5)]
            pairs = [(rng.standard_normal(dim), rng.standard_normal(dim)) for _ in range(20)]

            def gradient(term=term, points=points):
                err = gradient_check(term, points)
                return CheckResult("", "PASS" if err <= 1e-5 else "FAIL", f"max relative error {err:.2e}",
                                   expected="<= 1e-5", actual=err)

            def lipschitz(term=term, pairs=pairs):
                ratio = lipschitz_check(term, pairs)
                return CheckResult("", "PASS" if ratio <= 1.0 + 1e-6 else "FAIL",
                                   f"max observed ratio to L_f {ratio:.4f}", expected="<= 1", actual=ratio)

            self._run(category, f"{name} gradient", gradient)
            self._run(category, f"{name} Lipschitz bound", lipschitz)
        self.report.categories["gradients"] = category
        return category

    def check_prox(self) -> CheckCategory:
        print_header("CHECK: Proximal Maps")
        category = CheckCategory("prox")
        cases = 20 if self.quick else 200
        for kind in ("l1", "l1-l2", "nonneg", "simplex"):
            for n in (1, 2, 3):
                def agree(kind=kind, n=n):
                    worst = prox_disagreement(kind, n, cases, seed=n)
                    return CheckResult("", "PASS" if worst <= PROX_TOL else "FAIL",
                                       f"{cases} cases, worst objective gap {worst:.2e}",
                                       expected=f"<= {PROX_TOL}", actual=worst)
                self._run(category, f"{kind} n={n}", agree)
        self.report.categories["prox"] = category
        return category

    def check_linesearch(self) -> CheckCategory:
        print_header("CHECK: Line Search")
        category = CheckCategory("linesearch")
        runs = 5 if self.quick else 50
        for seed in range(runs):
            def sound(seed=seed):
                if seed % 2 == 0:
                    problem, delta = tiny_logistic(seed), 0.1
                else:
                    problem, delta = tiny_l12(seed), 0.9
                trace = run_algorithm("pgels", problem, np.zeros(problem.dimension),
                                      Budget(max_iterations=200), delta=delta)
                failed = [c.name for c in check_trace(trace)
                          if c.name in SOUNDNESS_CHECKS and not c.passed]
                worst = int(trace.column("inner_count").max())
                return CheckResult("", "FAIL" if failed else "PASS",
                                   f"{trace.iterations} steps, max {worst} candidates"
                                   + (f", failed {failed}" if failed else ""))
            self._run(category, f"seed {seed}", sound)
        self.report.categories["linesearch"] = category
        return category

    def check_reductions(self) -> CheckCategory:
        print_header("CHECK: Reductions")
        category = CheckCategory("reductions")
        problem, _ = lasso_problem(seed=3)
        x0 = np.zeros(problem.dimension)
        budget = Budget(max_iterations=150)
        # short runs: steps stay far above rounding noise
        short = Budget(max_iterations=50)

        def npg_identity():
            config = make_config("pgels", problem.lipschitz, 0.0, budget, record_iterates=True)
            pgels = run_pgels(problem, config, x0)
            npg = run_npg(problem, config, x0)
            same = (len(pgels.iterates) == len(npg.iterates)
                    and all(np.array_equal(a, b) for a, b in zip(pgels.iterates, npg.iterates)))
            return CheckResult("", "PASS" if same else "FAIL",
                               f"{len(pgels.iterates)} vs {len(npg.iterates)} iterates, identical={same}")

        def pg_no_shrink():
            logistic = tiny_logistic(3)
            trace = run_algorithm("pg-ls", logistic, np.zeros(logistic.dimension), short)
            counts = trace.column("inner_count")[1:]
            ok = bool(np.all(counts == 1))
            return CheckResult("", "PASS" if ok else "FAIL", f"max candidates per step {int(counts.max())}",
                               expected=1, actual=int(counts.max()))

        def pge_no_shrink():
            logistic = tiny_logistic(3)
            trace = run_algorithm("pge", logistic, np.zeros(logistic.dimension), short, delta=0.1)
            counts = trace.column("inner_count")[1:]
            ok = bool(np.all(counts == 1))
            return CheckResult("", "PASS" if ok else "FAIL", f"max candidates per step {int(counts.max())}",
                               expected=1, actual=int(counts.max()))

        self._run(category, "PGels(delta=0) == NPG", npg_identity)
        self._run(category, "PGels(delta=0, mu0=mu_max) never shrinks", pg_no_shrink)
        self._run(category, "PGe at the descent threshold never shrinks", pge_no_shrink)
        self.report.categories["reductions"] = category
        return category

    def check_theory(self) -> CheckCategory:
        print_header("CHECK: Convergence Theory")
        category = CheckCategory("theory")
        iterations = 300 if self.quick else 600

        for label, problem, delta in (("logistic", tiny_logistic(11, shape=(50, 200, 10), lam=0.05), 0.1),
                                      ("l1-l2", tiny_l12(11, shape=(50, 200, 10)), 0.9)):
            def trace_checks(problem=problem, delta=delta):
                trace = run_algorithm("pgels", problem, np.zeros(problem.dimension),
                                      Budget(max_iterations=iterations), delta=delta)
                failed = [c.name for c in check_trace(trace) if not c.passed]
                return CheckResult("", "FAIL" if failed else "PASS",
                                   f"{trace.iterations} iterations ({trace.termination})"
                                   + (f", failed {failed}" if failed else ""))
            self._run(category, f"{label} trace invariants", trace_checks)

        def residual():
            problem, _ = lasso_problem(seed=5)
            trace = run_algorithm("pgels", problem, np.zeros(problem.dimension),
                                  Budget(max_iterations=5000, residual_tol=1e-4), delta=0.1)
            final = trace.records[-1].residual
            ok = final is not None and final <= 1e-4
            return CheckResult("", "PASS" if ok else "FAIL",
                               f"residual {final:.2e} after {trace.iterations} iterations",
                               expected="<= 1e-4", actual=final)

        self._run(category, "stationarity on a (50, 200, 10) lasso", residual)
        self.report.categories["theory"] = category
        return category

    def check_rates(self) -> CheckCategory:
        print_header("CHECK: Rates")
        category = CheckCategory("rates")
        problem, _ = lasso_problem(seed=1)
        x0 = np.zeros(problem.dimension)

        def fista_decay():
            trace = run_algorithm("fista", problem, x0, Budget(max_iterations=100))
            reference = run_algorithm("fista", problem, x0, Budget(max_iterations=3000)).best_value
            best = np.minimum.accumulate(trace.objective_values) - reference
            ratio = best[10] / max(best[100], np.finfo(float).tiny)
            return CheckResult("", "PASS" if ratio >= 50 else "FAIL", f"gap(10) / gap(100) = {ratio:.1f}",
                               expected=">= 50", actual=ratio)

        def npg_geometric():
            fit, gaps, _ = empirical_rate(problem, "npg", 400)
            ok = fit.model == "geometric" and fit.parameter < 1 and fit.quality >= 0.95
            return CheckResult("", "PASS" if ok else "FAIL",
                               f"{fit.model} fit, parameter {fit.parameter:.4f}, R^2 {fit.quality:.3f} "
                               f"over {gaps.size} gaps")

        self._run(category, "FISTA gap decay", fista_decay)
        self._run(category, "NPG geometric rate", npg_geometric)
        self.report.categories["rates"] = category
        return category

    # -------------------------------------------------------------------------
    def run_category(self, category: str) -> CheckReport:
        if category not in CATEGORIES:
            raise ValueError(f"Unknown category: {category}")
        start = time.time()
        getattr(self, f"check_{category}")()
        return self._finish(start)

    def run_all(self) -> CheckReport:
        start = time.time()
        print_header("PGELS INVARIANT CHECKS")
        print(f"\n  Started: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        print(f"  Mode: {'Quick' if self.quick else 'Full'}")
        for category in CATEGORIES:
            getattr(self, f"check_{category}")()
        return self._finish(start)

    def _finish(self, start: float) -> CheckReport:
        self.report.end_time = datetime.now().isoformat()
        self.report.duration_seconds = time.time() - start
        print_final_summary(self.report)
        return self.report

    def export_json(self, filepath: str):
        report = {
            "start_time": self.report.start_time,
            "end_time": self.report.end_time,
            "duration_seconds": self.report.duration_seconds,
            "overall_status": self.report.overall_status,
            "summary": {
                "passed": self.report.total_passed,
                "failed": self.report.total_failed,
                "skipped": self.report.total_skipped,
            },
            "categories": {
                name: {
                    "status": cat.status,
                    "passed": cat.passed,
                    "failed": cat.failed,
                    "checks": [asdict(c) for c in cat.checks],
                }
                for name, cat in self.report.categories.items()
            },
        }
        with open(filepath, "w") as f:
            json.dump(report, f, indent=2, default=float)
        print(f"\n  Report exported to: {filepath}")
