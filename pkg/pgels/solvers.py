"""
Solvers
=======
PGels main loop plus the baselines it is benchmarked against.

Algorithms:
    pgels    - extrapolation + non-monotone line search on H_delta
    npg      - non-monotone proximal gradient (PGels with delta = 0)
    pge      - PGels with mu_k^0 = mu_max and beta_k^0 at the descent threshold (never shrinks)
    pg-ls    - PGels with delta = 0 and mu_k^0 = mu_max (PG with step 1/mu_max)
    pg       - fixed-step proximal gradient, step 1/L_f
    fista    - Nesterov extrapolation, step 1/L_f
    refista  - FISTA with periodic and gradient-based restarts
    pdcae    - proximal DCA with extrapolation for lam (||x||_1 - ||x||)

Usage:
    from pgels.solvers import Budget, run_algorithm
    trace = run_algorithm("pgels", problem, x0, Budget(max_iterations=500), delta=0.1)
    print(trace.termination, trace.final_value)
"""

import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import InvariantViolation
from .linesearch import (
    LineSearchParams,
    PotentialEntry,
    PotentialHistory,
    default_line_search,
    history_max,
    inner_loop_bound,
    lemma_beta_threshold,
    potential_value,
    shrink_params,
    sufficient_descent_holds,
    window_test,
)
from .problem import CompositeProblem, ProxTerm, objective_value, stationarity_residual
from .prox import L1MinusL2Term, soft_threshold
from .settings import BENCH, LINE_SEARCH_DEFAULTS

logger = logging.getLogger(__name__)

# Steps whose decrease term sits at this many ulps of |H| are rounding noise
STALL_ULPS = 64


# =============================================================================
# Configuration
# =============================================================================

class Budget(BaseModel):
    """Termination controls; whichever limit fires first stops the run."""
    model_config = ConfigDict(frozen=True)

    max_iterations: Optional[int] = Field(None, ge=0)
    max_time: Optional[float] = Field(None, gt=0)
    max_prox_evals: Optional[int] = Field(None, ge=0)
    residual_tol: float = Field(0.0, ge=0)
    clock: Literal["wall", "prox-evals"] = "wall"

    @model_validator(mode="after")
    def _has_limit(self):
        if (self.max_iterations is None and self.max_time is None
                and self.max_prox_evals is None and self.residual_tol == 0.0):
            raise ValueError("Budget needs at least one of max_iterations, max_time, "
                             "max_prox_evals or residual_tol")
        return self


class SolverConfig(BaseModel):
    """Everything run_pgels needs besides the problem and the starting point."""
    model_config = ConfigDict(frozen=True)

    line_search: LineSearchParams
    window: int = Field(LINE_SEARCH_DEFAULTS["window"], ge=0)
    beta_schedule: Literal["zero", "nesterov", "nesterov-restart", "constant", "lemma-safe"] = "nesterov"
    beta_constant: float = Field(0.0, ge=0)
    mu0_schedule: Literal["constant", "spectral", "max"] = "spectral"
    mu0: float = Field(LINE_SEARCH_DEFAULTS["mu0"], gt=0)
    restart_interval: Optional[int] = Field(BENCH["restart_interval"], ge=1)
    budget: Budget = Budget(max_iterations=1000)
    check_invariants: bool = True
    inner_cap: int = Field(BENCH["inner_cap"], ge=1)
    record_iterates: bool = False


# =============================================================================
# Traces
# =============================================================================

@dataclass(frozen=True)
class IterationRecord:
    """State after accepting x^k (k = 0 is the starting point)."""
    k: int
    f_value: float
    h_value: float
    time: float
    inner_count: int
    prox_evals: int
    step_norm: float
    mu_bar: float
    beta_bar: float
    mu0: float = math.nan
    beta0: float = math.nan
    window_max: float = math.nan
    monitor_index: int = -1
    restarted: bool = False
    residual: Optional[float] = None


@dataclass
class RunTrace:
    """Accepted iterates of one solver run."""
    algorithm: str
    records: List[IterationRecord]
    x_final: np.ndarray
    termination: str = "running"
    lipschitz: float = 0.0
    line_search: Optional[LineSearchParams] = None
    window: int = 0
    iterates: List[np.ndarray] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def objective_values(self) -> np.ndarray:
        return self.column("f_value")

    @property
    def times(self) -> np.ndarray:
        return self.column("time")

    @property
    def iterations(self) -> int:
        return self.records[-1].k

    @property
    def prox_evals(self) -> int:
        return self.records[-1].prox_evals

    @property
    def f0(self) -> float:
        return self.records[0].f_value

    @property
    def final_value(self) -> float:
        return self.records[-1].f_value

    @property
    def best_value(self) -> float:
        return float(np.min(self.objective_values))


class _Clock:
    """T(k): wall seconds or cumulative prox evaluations, with pausable exclusions."""

    def __init__(self, mode: str):
        self.mode = mode
        self.start = time.perf_counter()
        self.excluded = 0.0

    def wall(self) -> float:
        return time.perf_counter() - self.start - self.excluded

    def now(self, prox_evals: int) -> float:
        if self.mode == "prox-evals":
            return float(prox_evals)
        return self.wall()

    def excluding(self, fn, *args):
        t0 = time.perf_counter()
        try:
            return fn(*args)
        finally:
            self.excluded += time.perf_counter() - t0


def _residual_scale(problem: CompositeProblem) -> float:
    return problem.lipschitz if problem.lipschitz > 0 else 1.0


def _stop_reason(budget: Budget, k: int, wall: float, prox_evals: int,
                 residual: Optional[float]) -> Optional[str]:
    if residual is not None and budget.residual_tol > 0 and residual <= budget.residual_tol:
        return "residual"
    if budget.max_iterations is not None and k >= budget.max_iterations:
        return "max-iterations"
    if budget.max_prox_evals is not None and prox_evals >= budget.max_prox_evals:
        return "max-prox-evals"
    if budget.max_time is not None and wall >= budget.max_time:
        return "max-time"
    return None


def _start(problem: CompositeProblem, x0) -> tuple:
    x0 = np.array(x0, dtype=float, copy=True)
    f0 = objective_value(problem, x0)
    if not np.isfinite(f0):
        raise ValueError("Starting point must lie in dom P (F(x0) is not finite)")
    return x0, f0


# =============================================================================
# Building blocks
# =============================================================================

def prox_grad_step(y: np.ndarray, grad_y: np.ndarray, mu: float, prox: ProxTerm) -> np.ndarray:
    """argmin <grad f(y), x - y> + (mu / 2)||x - y||^2 + P(x) = Prox_{P/mu}(y - grad_y / mu)."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return prox.prox(y - grad_y / mu, 1.0 / mu)


@dataclass(frozen=True)
class NesterovState:
    """(t_{k-1}, t_k) of the recurrence t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2."""
    t_prev: float = 1.0
    t_curr: float = 1.0

    def advance(self) -> "NesterovState":
        return NesterovState(self.t_curr, (1.0 + math.sqrt(1.0 + 4.0 * self.t_curr ** 2)) / 2.0)


def nesterov_beta(state: NesterovState) -> tuple:
    """beta_k = (t_{k-1} - 1) / t_k and the advanced state."""
    return (state.t_prev - 1.0) / state.t_curr, state.advance()


def spectral_mu0(y_k: np.ndarray, y_prev: np.ndarray, g_k: np.ndarray, g_prev: np.ndarray,
                 mu_bar_prev: float, bounds: tuple) -> float:
    """Clipped curvature estimate <dy, dg> / ||dy||^2, floored at 0.5 * mu_bar_{k-1}."""
    mu_min, mu_max = bounds
    dy = y_k - y_prev
    dd = float(dy @ dy)
    if dd == 0.0:
        return mu_bar_prev
    quotient = float(dy @ (g_k - g_prev)) / dd
    return min(max(max(quotient, 0.5 * mu_bar_prev), mu_min), mu_max)


def _restart_fires(k: int, restart_interval: Optional[int], y, x_new, x) -> bool:
    """Periodic restart at k = dK, 2dK, ... or the gradient test <y - x+, x+ - x> > 0."""
    if restart_interval is not None and k > 0 and k % restart_interval == 0:
        return True
    return float((y - x_new) @ (x_new - x)) > 0.0


def _is_noise(step_sq: float, h: float, c: float) -> bool:
    return (c / 2.0) * step_sq <= STALL_ULPS * np.finfo(float).eps * max(1.0, abs(h))


# =============================================================================
# PGels
# =============================================================================

def _initial_beta(config: SolverConfig, state: NesterovState, mu0: float, mu_bar_prev: float,
                  lipschitz: float) -> tuple:
    params = config.line_search
    schedule = config.beta_schedule
    next_state = state
    if schedule == "zero":
        beta = 0.0
    elif schedule in ("nesterov", "nesterov-restart"):
        beta, next_state = nesterov_beta(state)
    elif schedule == "constant":
        beta = config.beta_constant
    else:
        beta = lemma_beta_threshold(mu0, mu_bar_prev, lipschitz, params.delta)
    return min(max(beta, 0.0), params.beta_cap), next_state


def run_pgels(problem: CompositeProblem, config: SolverConfig, x0,
              budget: Optional[Budget] = None, name: str = "pgels") -> RunTrace:
    """Proximal gradient with extrapolation and non-monotone line search.

    Each outer iteration picks mu_k^0 and beta_k^0, then alternates
    extrapolation, prox-gradient step and the window test, growing mu and
    shrinking beta until a candidate passes. The Nesterov state advances
    once per accepted step.
    """
    budget = budget or config.budget
    params = config.line_search
    lipschitz = problem.lipschitz
    params.validate_for(lipschitz)
    delta, c = params.delta, params.c
    grad = problem.smooth.gradient

    x, f0 = _start(problem, x0)
    x_prev = x
    history = PotentialHistory.seeded(config.window, f0)
    mu_bar_prev = 1.0
    state = NesterovState()
    y_prev = g_prev = None
    prox_evals = 0
    check_residual = budget.residual_tol > 0

    clock = _Clock(budget.clock)
    trace = RunTrace(algorithm=name, records=[], x_final=x, lipschitz=lipschitz,
                     line_search=params, window=config.window)
    residual0 = (clock.excluding(stationarity_residual, problem, x, _residual_scale(problem))
                 if check_residual else None)
    trace.records.append(IterationRecord(k=0, f_value=f0, h_value=f0, time=0.0, inner_count=0,
                                         prox_evals=0, step_norm=0.0, mu_bar=1.0, beta_bar=0.0,
                                         residual=residual0))
    if config.record_iterates:
        trace.iterates.append(x.copy())
    logger.info(f"{name}: n={problem.dimension}, L_f={lipschitz:.6g}, delta={delta}, "
                f"N={config.window}, mu_max={params.mu_max:.6g}")

    k = 0
    reason = _stop_reason(budget, 0, 0.0, 0, residual0)
    while reason is None:
        if config.mu0_schedule == "max":
            mu = params.mu_max
        elif config.mu0_schedule == "spectral" and k >= 1:
            mu = None
        else:
            mu = min(max(config.mu0, params.mu_min), params.mu_max)

        beta, next_state = _initial_beta(config, state, mu if mu is not None else params.mu_max,
                                         mu_bar_prev, lipschitz)
        beta0 = beta
        y = x + beta * (x - x_prev) if beta > 0 else x
        g = grad(y)
        if mu is None:
            mu = spectral_mu0(y, y_prev, g, g_prev, mu_bar_prev, (params.mu_min, params.mu_max))
        mu0 = mu

        h_max, monitor_index = history_max(history, k)
        count = 0
        while True:
            u = prox_grad_step(y, g, mu, problem.prox)
            prox_evals += 1
            count += 1
            f_u = objective_value(problem, u)
            d = u - x
            step_sq = float(d @ d)
            h = potential_value(f_u, u, x, mu, delta)
            if window_test(h, h_max, step_sq, c):
                break
            if count >= config.inner_cap:
                if _is_noise(step_sq, h_max, c):
                    reason = "numerical-stall"
                    break
                raise InvariantViolation(
                    f"{name}: line search failed after {count} candidates at k={k} "
                    f"(mu={mu:.6g}, beta={beta:.6g}, H-Hmax={h - h_max:.6g})"
                )
            mu, beta_next = shrink_params(mu, beta, params)
            if beta_next != beta:
                y = x + beta_next * (x - x_prev)
                g = grad(y)
            beta = beta_next

        if reason == "numerical-stall":
            logger.warning(f"{name}: numerical stall at k={k} after {count} candidates")
            break

        if config.check_invariants:
            _check_step(name, k, problem, params, history, u, x, h, mu, beta, mu_bar_prev,
                        beta0, count, step_sq)

        if config.beta_schedule == "nesterov-restart":
            if _restart_fires(k, config.restart_interval, y, u, x):
                next_state = NesterovState()
                restarted = True
            else:
                restarted = False
        else:
            restarted = False
        state = next_state

        step_norm = math.sqrt(step_sq)
        history.push(PotentialEntry(index=k + 1, h_value=h, f_value=f_u, mu_bar=mu,
                                    beta_bar=beta, step_norm=step_norm))
        x_prev, x = x, u
        y_prev, g_prev = y, g
        mu_bar_prev = mu
        k += 1

        residual = (clock.excluding(stationarity_residual, problem, x, _residual_scale(problem))
                    if check_residual else None)
        elapsed = clock.now(prox_evals)
        trace.records.append(IterationRecord(
            k=k, f_value=f_u, h_value=h, time=elapsed, inner_count=count, prox_evals=prox_evals,
            step_norm=step_norm, mu_bar=mu, beta_bar=beta, mu0=mu0, beta0=beta0,
            window_max=h_max, monitor_index=monitor_index, restarted=restarted, residual=residual,
        ))
        if config.record_iterates:
            trace.iterates.append(x.copy())
        if count > 1:
            logger.debug(f"{name}: k={k} accepted after {count} candidates (mu={mu:.4g}, beta={beta:.4g})")
        reason = _stop_reason(budget, k, clock.wall(), prox_evals, residual)

    trace.x_final = x
    trace.termination = reason
    logger.info(f"{name}: stopped ({reason}) after {k} iterations, {prox_evals} prox evaluations, "
                f"F={trace.final_value:.9g}")
    return trace


def _check_step(name, k, problem, params, history, u, x, h, mu, beta, mu_bar_prev,
                beta0, count, step_sq):
    """Runtime checks on an accepted step: inner-loop bound and the sufficient-descent lemma."""
    lipschitz = problem.lipschitz
    h_current = history.entries[-1].h_value
    bound = inner_loop_bound(params, beta0, mu_bar_prev, lipschitz)
    if count > bound and not _is_noise(step_sq, h_current, params.c):
        raise InvariantViolation(f"{name}: k={k} needed {count} candidates, bound is {bound}")

    if mu > lipschitz and beta <= lemma_beta_threshold(mu, mu_bar_prev, lipschitz, params.delta):
        if not sufficient_descent_holds(h, h_current, u, x, mu, params, lipschitz):
            raise InvariantViolation(
                f"{name}: sufficient descent failed at k={k} (mu={mu:.6g}, beta={beta:.6g}, "
                f"dH={h - h_current:.6g})"
            )


# =============================================================================
# NPG reference
# =============================================================================

def run_npg(problem: CompositeProblem, config: SolverConfig, x0,
            budget: Optional[Budget] = None, name: str = "npg") -> RunTrace:
    """Non-monotone proximal gradient without extrapolation.

    Accepts u once F(u) - max of the last N + 1 objective values is at most
    -(c/2)||u - x^k||^2. Coded independently of run_pgels; with delta = 0 the
    two visit the same iterates.
    """
    budget = budget or config.budget
    params = config.line_search
    lipschitz = problem.lipschitz
    c, tau = params.c, params.tau
    grad = problem.smooth.gradient

    x, f0 = _start(problem, x0)
    window = deque([f0], maxlen=config.window + 1)
    mu_bar_prev = 1.0
    x_old = g_old = None
    prox_evals = 0
    check_residual = budget.residual_tol > 0

    clock = _Clock(budget.clock)
    trace = RunTrace(algorithm=name, records=[], x_final=x, lipschitz=lipschitz,
                     line_search=params.model_copy(update={"delta": 0.0}), window=config.window)
    residual0 = (clock.excluding(stationarity_residual, problem, x, _residual_scale(problem))
                 if check_residual else None)
    trace.records.append(IterationRecord(k=0, f_value=f0, h_value=f0, time=0.0, inner_count=0,
                                         prox_evals=0, step_norm=0.0, mu_bar=1.0, beta_bar=0.0,
                                         residual=residual0))
    if config.record_iterates:
        trace.iterates.append(x.copy())
    logger.info(f"{name}: n={problem.dimension}, L_f={lipschitz:.6g}, N={config.window}")

    k = 0
    reason = _stop_reason(budget, 0, 0.0, 0, residual0)
    while reason is None:
        g = grad(x)
        if config.mu0_schedule == "max":
            mu = params.mu_max
        elif config.mu0_schedule == "spectral" and k >= 1:
            mu = spectral_mu0(x, x_old, g, g_old, mu_bar_prev, (params.mu_min, params.mu_max))
        else:
            mu = min(max(config.mu0, params.mu_min), params.mu_max)
        mu0 = mu

        f_max = -np.inf
        for f_i in window:
            f_max = max(f_max, f_i)

        count = 0
        while True:
            u = problem.prox.prox(x - g / mu, 1.0 / mu)
            prox_evals += 1
            count += 1
            f_u = objective_value(problem, u)
            d = u - x
            step_sq = float(d @ d)
            if window_test(f_u, f_max, step_sq, c):
                break
            if count >= config.inner_cap:
                if _is_noise(step_sq, f_max, c):
                    reason = "numerical-stall"
                    break
                raise InvariantViolation(f"{name}: line search failed after {count} candidates at k={k}")
            mu = min(tau * mu, params.mu_max)

        if reason == "numerical-stall":
            logger.warning(f"{name}: numerical stall at k={k} after {count} candidates")
            break

        window.append(f_u)
        x_old, g_old = x, g
        x = u
        mu_bar_prev = mu
        k += 1

        residual = (clock.excluding(stationarity_residual, problem, x, _residual_scale(problem))
                    if check_residual else None)
        elapsed = clock.now(prox_evals)
        trace.records.append(IterationRecord(
            k=k, f_value=f_u, h_value=f_u, time=elapsed, inner_count=count, prox_evals=prox_evals,
            step_norm=math.sqrt(step_sq), mu_bar=mu, beta_bar=0.0, mu0=mu0, beta0=0.0,
            window_max=f_max, residual=residual,
        ))
        if config.record_iterates:
            trace.iterates.append(x.copy())
        reason = _stop_reason(budget, k, clock.wall(), prox_evals, residual)

    trace.x_final = x
    trace.termination = reason
    logger.info(f"{name}: stopped ({reason}) after {k} iterations, {prox_evals} prox evaluations, "
                f"F={trace.final_value:.9g}")
    return trace


# =============================================================================
# Fixed-step baselines
# =============================================================================

def _extrapolated_loop(problem: CompositeProblem, x0, budget: Budget, name: str,
                       step: Callable, use_beta: bool, restart_interval: Optional[int],
                       restarts: bool, record_iterates: bool = False) -> RunTrace:
    """Shared loop for x^{k+1} = step(y^k, x^k), y^k = x^k + beta_k (x^k - x^{k-1})."""
    lipschitz = problem.lipschitz
    if not lipschitz > 0:
        raise ValueError(f"{name} needs a positive Lipschitz bound, got {lipschitz}")

    x, f0 = _start(problem, x0)
    x_prev = x
    state = NesterovState()
    prox_evals = 0
    check_residual = budget.residual_tol > 0

    clock = _Clock(budget.clock)
    trace = RunTrace(algorithm=name, records=[], x_final=x, lipschitz=lipschitz)
    residual0 = (clock.excluding(stationarity_residual, problem, x, lipschitz)
                 if check_residual else None)
    trace.records.append(IterationRecord(k=0, f_value=f0, h_value=f0, time=0.0, inner_count=0,
                                         prox_evals=0, step_norm=0.0, mu_bar=lipschitz, beta_bar=0.0,
                                         residual=residual0))
    if record_iterates:
        trace.iterates.append(x.copy())
    logger.info(f"{name}: n={problem.dimension}, L_f={lipschitz:.6g}")

    k = 0
    reason = _stop_reason(budget, 0, 0.0, 0, residual0)
    while reason is None:
        beta, next_state = nesterov_beta(state) if use_beta else (0.0, state)
        y = x + beta * (x - x_prev) if beta > 0 else x
        x_new = step(y, x)
        prox_evals += 1

        restarted = restarts and _restart_fires(k, restart_interval, y, x_new, x)
        if restarted:
            next_state = NesterovState()
            logger.debug(f"{name}: restart at k={k}")
        state = next_state

        step_norm = float(np.linalg.norm(x_new - x))
        x_prev, x = x, x_new
        k += 1
        f_value = objective_value(problem, x)

        residual = (clock.excluding(stationarity_residual, problem, x, lipschitz)
                    if check_residual else None)
        elapsed = clock.now(prox_evals)
        trace.records.append(IterationRecord(
            k=k, f_value=f_value, h_value=f_value, time=elapsed, inner_count=1,
            prox_evals=prox_evals, step_norm=step_norm, mu_bar=lipschitz, beta_bar=beta,
            mu0=lipschitz, beta0=beta, restarted=restarted, residual=residual,
        ))
        if record_iterates:
            trace.iterates.append(x.copy())
        reason = _stop_reason(budget, k, clock.wall(), prox_evals, residual)

    trace.x_final = x
    trace.termination = reason
    logger.info(f"{name}: stopped ({reason}) after {k} iterations, F={trace.final_value:.9g}")
    return trace


def run_fista(problem: CompositeProblem, variant: str, x0, budget: Budget,
              restart_interval: Optional[int] = BENCH["restart_interval"],
              record_iterates: bool = False) -> RunTrace:
    """PG (beta = 0), FISTA, or reFISTA with step 1/L_f."""
    if variant not in ("pg", "fista", "refista"):
        raise ValueError(f"Unknown variant: {variant}")
    lipschitz = problem.lipschitz
    grad = problem.smooth.gradient

    def step(y, x):
        return prox_grad_step(y, grad(y), lipschitz, problem.prox)

    return _extrapolated_loop(problem, x0, budget, variant, step,
                              use_beta=variant != "pg",
                              restart_interval=restart_interval,
                              restarts=variant == "refista",
                              record_iterates=record_iterates)


def l1_minus_l2_subgradient(x: np.ndarray, lam: float) -> np.ndarray:
    """xi in lam * subdiff ||x||: lam x / ||x||, or 0 at the origin."""
    norm = np.linalg.norm(x)
    if norm == 0.0:
        return np.zeros_like(x)
    return (lam / norm) * x


def run_pdcae(problem: CompositeProblem, x0, budget: Budget,
              restart_interval: Optional[int] = BENCH["restart_interval"],
              record_iterates: bool = False) -> RunTrace:
    """Proximal DCA with extrapolation for f + lam (||x||_1 - ||x||).

    x^{k+1} = soft_threshold(y^k - (grad f(y^k) - xi^k) / L_f, lam / L_f),
    with beta_k chosen as in reFISTA.
    """
    regularizer = problem.prox.regularizer
    if not isinstance(regularizer, L1MinusL2Term):
        raise ValueError(f"pdcae needs an l1-l2 regularizer, got {problem.prox.name!r}")
    lam = regularizer.lam
    lipschitz = problem.lipschitz
    grad = problem.smooth.gradient

    def step(y, x):
        xi = l1_minus_l2_subgradient(x, lam)
        return soft_threshold(y - (grad(y) - xi) / lipschitz, lam / lipschitz)

    return _extrapolated_loop(problem, x0, budget, "pdcae", step, use_beta=True,
                              restart_interval=restart_interval, restarts=True,
                              record_iterates=record_iterates)


# =============================================================================
# Registry
# =============================================================================

LINE_SEARCH_ALGORITHMS = ("pgels", "npg", "pge", "pg-ls")
FIXED_STEP_ALGORITHMS = ("pg", "fista", "refista", "pdcae")
ALGORITHMS = LINE_SEARCH_ALGORITHMS + FIXED_STEP_ALGORITHMS


def make_config(name: str, lipschitz: float, delta: float, budget: Budget, **overrides) -> SolverConfig:
    """SolverConfig preset for one of the line-search algorithms."""
    if name == "pgels":
        fields = {"beta_schedule": "nesterov", "mu0_schedule": "spectral"}
    elif name == "npg":
        delta, fields = 0.0, {"beta_schedule": "zero", "mu0_schedule": "spectral"}
    elif name == "pge":
        fields = {"beta_schedule": "lemma-safe", "mu0_schedule": "max"}
    elif name == "pg-ls":
        delta, fields = 0.0, {"beta_schedule": "zero", "mu0_schedule": "max"}
    else:
        raise ValueError(f"No line-search preset for {name!r}")
    fields.update(overrides)
    return SolverConfig(line_search=default_line_search(lipschitz, delta), budget=budget, **fields)


def run_algorithm(name: str, problem: CompositeProblem, x0, budget: Budget,
                  delta: float = 0.0, **overrides) -> RunTrace:
    """Dispatch by algorithm name; ``delta`` only matters for pgels and pge."""
    if name in ("pgels", "pge", "pg-ls"):
        return run_pgels(problem, make_config(name, problem.lipschitz, delta, budget, **overrides),
                         x0, name=name)
    if name == "npg":
        return run_npg(problem, make_config(name, problem.lipschitz, 0.0, budget, **overrides), x0)
    if name in ("pg", "fista", "refista"):
        return run_fista(problem, name, x0, budget, **overrides)
    if name == "pdcae":
        return run_pdcae(problem, x0, budget, **overrides)
    raise ValueError(f"Unknown algorithm: {name}. Choose from {', '.join(ALGORITHMS)}")

