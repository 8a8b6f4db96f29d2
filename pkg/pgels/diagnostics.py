"""
Trace diagnostics: post-hoc invariant checks and empirical convergence rates.

check_trace recomputes the potential and window maximum of every record,
re-evaluates the line-search criterion on them and checks the monitor,
range and bound properties every run must have.
fit_rate classifies an objective-gap sequence as geometric or power-law.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import InvariantViolation
from .linesearch import LineSearchParams, inner_loop_bound
from .settings import BENCH
from .solvers import STALL_ULPS, Budget, RunTrace, run_algorithm

logger = logging.getLogger(__name__)

THEORY_SLACK = 1e-10
MIN_FIT_LENGTH = 10
DIMINISHING_MIN_ITERATIONS = 500


@dataclass
class InvariantCheck:
    """Result of one named trace check."""
    name: str
    passed: bool
    message: str
    worst: float = 0.0


@dataclass(frozen=True)
class RateFit:
    model: str  # geometric or power
    parameter: float
    quality: float
    geometric_quality: float
    power_quality: float


# =============================================================================
# Rate fitting
# =============================================================================

def _linear_fit(t: np.ndarray, v: np.ndarray) -> tuple:
    """Least-squares slope and R^2 of v against t."""
    slope, intercept = np.polyfit(t, v, 1)
    residual = v - (slope * t + intercept)
    ss_res = float(residual @ residual)
    centered = v - v.mean()
    ss_tot = float(centered @ centered)
    if ss_tot == 0.0:
        return float(slope), 1.0 if ss_res <= 1e-24 else 0.0
    return float(slope), 1.0 - ss_res / ss_tot


def fit_rate(gaps) -> RateFit:
    """Fit log-gap against k and against log k over the tail half of the sequence.

    gaps[0] belongs to k = 1. A geometric model reports rho = exp(slope),
    a power model reports the exponent; ties go to the geometric model.
    """
    gaps = np.asarray(gaps, dtype=float)
    if gaps.ndim != 1 or gaps.size < MIN_FIT_LENGTH:
        raise ValueError(f"Need at least {MIN_FIT_LENGTH} gaps, got {gaps.size}")
    if np.any(~(gaps > 0)):
        raise ValueError("Gaps must be positive")

    k = np.arange(1, gaps.size + 1, dtype=float)
    tail = slice(gaps.size // 2, None)
    log_gap = np.log(gaps[tail])

    geo_slope, geo_q = _linear_fit(k[tail], log_gap)
    pow_slope, pow_q = _linear_fit(np.log(k[tail]), log_gap)

    if geo_q >= pow_q:
        return RateFit("geometric", float(np.exp(geo_slope)), geo_q, geo_q, pow_q)
    return RateFit("power", pow_slope, pow_q, geo_q, pow_q)


def objective_gaps(trace: RunTrace, reference: float) -> np.ndarray:
    """F(x^k) - reference for k >= 1, cut at the first non-positive gap."""
    gaps = trace.objective_values[1:] - reference
    nonpositive = np.flatnonzero(~(gaps > 0))
    if nonpositive.size:
        gaps = gaps[:nonpositive[0]]
    return gaps


# =============================================================================
# Trace checks
# =============================================================================

def _slack(value: float) -> float:
    return THEORY_SLACK * max(1.0, abs(value))


def check_trace(trace: RunTrace, params: Optional[LineSearchParams] = None,
                lipschitz: Optional[float] = None) -> List[InvariantCheck]:
    """Every invariant a finished run must satisfy, as a list of named results."""
    params = params or trace.line_search
    lipschitz = trace.lipschitz if lipschitz is None else lipschitz
    records = trace.records
    f0 = trace.f0
    checks = []

    times = trace.times
    ok = times[0] == 0.0 and bool(np.all(np.diff(times) >= 0))
    checks.append(InvariantCheck("time-monotone", ok, "T(0) = 0 and T(k) non-decreasing"))

    final_excess = trace.final_value - f0
    checks.append(InvariantCheck("objective-bound", final_excess <= _slack(f0),
                                 f"final F - F(x0) = {final_excess:.3g}", final_excess))

    checks.append(_diminishing_changes(trace))

    if params is not None and len(records) > 1:
        checks.extend(_line_search_checks(trace, params, lipschitz))
    return checks


def _diminishing_changes(trace: RunTrace) -> InvariantCheck:
    steps = trace.column("step_norm")[1:]
    if steps.size < DIMINISHING_MIN_ITERATIONS:
        return InvariantCheck("diminishing-changes", True,
                              f"skipped ({steps.size} < {DIMINISHING_MIN_ITERATIONS} iterations)")
    decile = steps.size // 10
    first, last = float(steps[:decile].mean()), float(steps[-decile:].mean())
    ok = last < first or last == 0.0
    return InvariantCheck("diminishing-changes", ok,
                          f"mean step first decile {first:.3g}, last decile {last:.3g}", last - first)


def _recomputed_potentials(records, delta: float) -> np.ndarray:
    """H = F + (delta mu_bar / 4) step_norm^2 from the stored ingredients."""
    f = np.array([r.f_value for r in records], dtype=float)
    if delta == 0.0:
        return f
    mu = np.array([r.mu_bar for r in records], dtype=float)
    step = np.array([r.step_norm for r in records], dtype=float)
    return f + (delta * mu / 4.0) * step ** 2


def _line_search_checks(trace: RunTrace, params: LineSearchParams, lipschitz: float) -> List[InvariantCheck]:
    records = trace.records
    f0 = trace.f0
    eps = np.finfo(float).eps
    hs = _recomputed_potentials(records, params.delta)

    bad_potential, worst_potential = [], 0.0
    for rec, h in zip(records, hs):
        gap = abs(rec.h_value - h)
        worst_potential = max(worst_potential, gap)
        if gap > 1e-12 * max(1.0, abs(h)):
            bad_potential.append(rec.k)

    worst_criterion, bad_criterion = -np.inf, []
    bad_window, worst_window = [], 0.0
    worst_inner, bad_inner = 0, []
    monitor_jumps, bound_excess = [], -np.inf
    bad_mu, bad_beta = [], []
    previous_max = np.inf

    for i, (prev, rec) in enumerate(zip(records[:-1], records[1:]), start=1):
        h = hs[i]
        window_max = float(hs[max(0, i - 1 - trace.window):i].max())
        gap = abs(rec.window_max - window_max) if np.isfinite(rec.window_max) else np.inf
        worst_window = max(worst_window, gap)
        if gap > 1e-12 * max(1.0, abs(window_max)):
            bad_window.append(rec.k)

        step_sq = rec.step_norm ** 2
        margin = h - window_max + (params.c / 2.0) * step_sq
        worst_criterion = max(worst_criterion, margin)
        if margin > 1e-12 * max(1.0, abs(h)):
            bad_criterion.append(rec.k)

        noise = (params.c / 2.0) * step_sq <= STALL_ULPS * eps * max(1.0, abs(h))
        bound = min(inner_loop_bound(params, rec.beta0, prev.mu_bar, lipschitz), BENCH["inner_cap"])
        worst_inner = max(worst_inner, rec.inner_count)
        if rec.inner_count > bound and not noise:
            bad_inner.append(rec.k)

        if window_max > previous_max + THEORY_SLACK:
            monitor_jumps.append(rec.k)
        previous_max = window_max

        bound_excess = max(bound_excess, h - f0)

        if not params.mu_min <= rec.mu_bar <= params.mu_max:
            bad_mu.append(rec.k)
        cap = params.beta_cap + 1e-15
        if not (0.0 <= rec.beta_bar <= cap and 0.0 <= rec.beta0 <= cap):
            bad_beta.append(rec.k)

    return [
        InvariantCheck("potential-consistency", not bad_potential,
                       f"stored H differs from F + delta mu/4 ||dx||^2 at {bad_potential[:5]}",
                       worst_potential),
        InvariantCheck("window-max-consistency", not bad_window,
                       f"stored window maximum differs from records [k-N]+..k at {bad_window[:5]}",
                       worst_window),
        InvariantCheck("line-search-criterion", not bad_criterion,
                       f"criterion re-evaluated on {len(records) - 1} steps, failures at {bad_criterion[:5]}",
                       worst_criterion),
        InvariantCheck("inner-loop-bound", not bad_inner,
                       f"max {worst_inner} candidates per iteration, over bound at {bad_inner[:5]}",
                       float(worst_inner)),
        InvariantCheck("monotone-monitor", not monitor_jumps,
                       f"window maximum increased at {monitor_jumps[:5]}"),
        InvariantCheck("global-bound", bound_excess <= THEORY_SLACK,
                       f"max H - F(x0) = {bound_excess:.3g}", bound_excess),
        InvariantCheck("mu-range", not bad_mu, f"mu_bar outside [mu_min, mu_max] at {bad_mu[:5]}"),
        InvariantCheck("beta-range", not bad_beta, f"beta outside [0, delta*beta_max] at {bad_beta[:5]}"),
    ]


def assert_trace(trace: RunTrace, params: Optional[LineSearchParams] = None,
                 lipschitz: Optional[float] = None) -> List[InvariantCheck]:
    """check_trace, raising InvariantViolation on the first failed check."""
    checks = check_trace(trace, params, lipschitz)
    for check in checks:
        if not check.passed:
            raise InvariantViolation(f"{trace.algorithm}: {check.name} failed: {check.message}")
    logger.debug(f"{trace.algorithm}: {len(checks)} trace checks passed")
    return checks


def empirical_rate(problem, algorithm: str, iterations: int, delta: float = 0.0,
                   floor: float = 1e-9) -> tuple:
    """Fit the gap sequence of one run against a reference run twice as long.

    Gaps below ``floor * max(1, |zeta|)`` are dropped as rounding noise.
    Returns (RateFit, gaps, zeta).
    """
    x0 = np.zeros(problem.dimension)
    trace = run_algorithm(algorithm, problem, x0, Budget(max_iterations=iterations), delta=delta)
    reference = run_algorithm(algorithm, problem, x0, Budget(max_iterations=2 * iterations), delta=delta)
    zeta = min(reference.best_value, trace.best_value)
    gaps = objective_gaps(trace, zeta)
    resolved = np.flatnonzero(gaps < floor * max(1.0, abs(zeta)))
    if resolved.size:
        gaps = gaps[:resolved[0]]
    logger.info(f"{algorithm}: {gaps.size} usable gaps against zeta={zeta:.12g}")
    return fit_rate(gaps), gaps, zeta
