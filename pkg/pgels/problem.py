"""
Composite problem model F = f + P.

A problem pairs a smooth term (value, gradient, Lipschitz bound of the
gradient) with a prox-capable term (value, proximal map, lower bound).
Values of the prox term may be +inf; membership in dom P is decided by
``value(x) < inf`` and nothing else.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional

import numpy as np

logger = logging.getLogger(__name__)

Vector = np.ndarray


@dataclass(frozen=True)
class SmoothTerm:
    """Smooth loss f with L-Lipschitz gradient."""
    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    lipschitz_bound: float
    name: str = "smooth"

    def __post_init__(self):
        if not self.lipschitz_bound >= 0:
            raise ValueError(f"Lipschitz bound must be nonnegative, got {self.lipschitz_bound}")


@dataclass(frozen=True)
class ProxTerm:
    """Possibly nonsmooth, nonconvex term P with an available proximal map.

    ``prox(y, nu)`` returns one element of argmin P(x) + ||x - y||^2 / (2 nu).
    ``regularizer`` keeps the parameter object the term was built from.
    """
    value: Callable[[Vector], float]
    prox: Callable[[Vector, float], Vector]
    lower_bound: float = 0.0
    name: str = "prox"
    regularizer: Optional[Any] = None


@dataclass(frozen=True)
class CompositeProblem:
    """F(x) = f(x) + P(x) over R^n."""
    smooth: SmoothTerm
    prox: ProxTerm
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"Dimension must be positive, got {self.dimension}")

    @property
    def lipschitz(self) -> float:
        return self.smooth.lipschitz_bound


def _check_dimension(problem: CompositeProblem, x: Vector) -> Vector:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dimension,):
        raise ValueError(f"Expected a vector of length {problem.dimension}, got shape {x.shape}")
    return x


def objective_value(problem: CompositeProblem, x: Vector) -> float:
    """F(x); +inf exactly when x lies outside dom P."""
    x = _check_dimension(problem, x)
    p_value = float(problem.prox.value(x))
    if p_value == np.inf:
        return np.inf
    return float(problem.smooth.value(x)) + p_value


def stationarity_residual(problem: CompositeProblem, x: Vector, mu: float) -> float:
    """mu * ||x - Prox_{P/mu}(x - grad f(x) / mu)||, zero at fixed points of the prox-gradient map."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    x = _check_dimension(problem, x)
    u = problem.prox.prox(x - problem.smooth.gradient(x) / mu, 1.0 / mu)
    return float(mu * np.linalg.norm(x - u))


# =============================================================================
# Contract checks for bundled terms
# =============================================================================

def gradient_check(term: SmoothTerm, points: Iterable[Vector]) -> float:
    """Largest relative disagreement between the gradient and central differences.

    Error at x is ||g_fd - g|| / max(1, ||g||) with step 1e-6 * (1 + ||x||).
    """
    worst = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        h = 1e-6 * (1.0 + np.linalg.norm(x))
        g = np.asarray(term.gradient(x), dtype=float)
        g_fd = np.empty_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = h
            g_fd[i] = (term.value(x + e) - term.value(x - e)) / (2.0 * h)
        err = np.linalg.norm(g_fd - g) / max(1.0, np.linalg.norm(g))
        worst = max(worst, float(err))
    return worst


def lipschitz_check(term: SmoothTerm, pairs: Iterable[tuple]) -> float:
    """Largest ||grad f(x) - grad f(y)|| / (L_f ||x - y||) over the sampled pairs."""
    worst = 0.0
    for x, y in pairs:
        dist = np.linalg.norm(x - y)
        if dist == 0:
            continue
        ratio = np.linalg.norm(term.gradient(x) - term.gradient(y)) / dist
        worst = max(worst, float(ratio / term.lipschitz_bound) if term.lipschitz_bound > 0 else np.inf)
    return worst


def prox_objective(value: Callable[[Vector], float], u: Vector, y: Vector, nu: float) -> float:
    """value(u) + ||u - y||^2 / (2 nu), the function Prox_{nu h}(y) minimizes."""
    v = float(value(u))
    if v == np.inf:
        return np.inf
    return v + float(np.dot(u - y, u - y)) / (2.0 * nu)


def prox_optimality_gap(term: ProxTerm, y: Vector, nu: float, probes: Iterable[Vector]) -> float:
    """Worst violation of prox-optimality against the probe points (<= 0 when satisfied)."""
    u = term.prox(y, nu)
    best = prox_objective(term.value, u, y, nu)
    worst = -np.inf
    for z in probes:
        candidate = prox_objective(term.value, z, y, nu)
        if candidate == np.inf:
            continue
        worst = max(worst, best - candidate)
    return float(worst)
