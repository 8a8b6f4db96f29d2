"""
Proximal maps and projections
=============================
Soft-thresholding (optionally leaving the intercept unpenalized), the
l1-2 proximal map, projections onto the nonnegative orthant and the
probability simplex, and a brute-force grid oracle the closed forms are
validated against.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .problem import ProxTerm, prox_objective

logger = logging.getLogger(__name__)

# Membership tolerance for the simplex indicator
SIMPLEX_TOL = 1e-9


# =============================================================================
# l1 norm
# =============================================================================

@dataclass(frozen=True)
class L1Term:
    """P(x) = lam ||x||_1, or lam ||x_tilde||_1 when the last coordinate is an intercept."""
    lam: float
    skip_last: bool = False

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if self.skip_last:
            x = x[:-1]
        return self.lam * float(np.abs(x).sum())

    def prox(self, y: np.ndarray, nu: float) -> np.ndarray:
        return prox_l1(y, nu, self)

    def as_prox_term(self) -> ProxTerm:
        return ProxTerm(value=self.value, prox=self.prox, lower_bound=0.0,
                        name="l1", regularizer=self)


def soft_threshold(y: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(y) * np.maximum(np.abs(y) - threshold, 0.0)


def prox_l1(y: np.ndarray, nu: float, term: L1Term) -> np.ndarray:
    """Componentwise sign(y_i) max(|y_i| - nu lam, 0); the intercept passes through."""
    y = np.asarray(y, dtype=float)
    u = soft_threshold(y, nu * term.lam)
    if term.skip_last:
        u[-1] = y[-1]
    return u


# =============================================================================
# l1 - l2 (difference of convex)
# =============================================================================

@dataclass(frozen=True)
class L1MinusL2Term:
    """P(x) = lam (||x||_1 - ||x||), nonnegative and nonconvex."""
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        # clamp rounding below zero: ||x||_1 >= ||x|| holds exactly
        return self.lam * max(float(np.abs(x).sum() - np.linalg.norm(x)), 0.0)

    def prox(self, y: np.ndarray, nu: float) -> np.ndarray:
        return prox_l1_minus_l2(y, nu, self)

    def as_prox_term(self) -> ProxTerm:
        return ProxTerm(value=self.value, prox=self.prox, lower_bound=0.0,
                        name="l1-l2", regularizer=self)


def prox_l1_minus_l2(y: np.ndarray, nu: float, term: L1MinusL2Term) -> np.ndarray:
    """One global minimizer of lam (||x||_1 - ||x||) + ||x - y||^2 / (2 nu).

    With a = nu * lam:
      ||y||_inf >  a : z = shrink(y, a), x = z (||z|| + a) / ||z||
      0 < ||y||_inf <= a : x is 1-sparse, x_i = y_i at the first index of largest |y_i|
      y = 0 : x = 0
    """
    y = np.asarray(y, dtype=float)
    a = nu * term.lam
    y_inf = float(np.max(np.abs(y))) if y.size else 0.0

    if y_inf > a:
        z = soft_threshold(y, a)
        z_norm = np.linalg.norm(z)
        return z * ((z_norm + a) / z_norm)

    x = np.zeros_like(y)
    if y_inf > 0.0:
        # np.argmax returns the earliest index among ties
        i = int(np.argmax(np.abs(y)))
        x[i] = y[i]
    return x


# =============================================================================
# Indicator regularizers
# =============================================================================

def project_nonneg(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0}."""
    return np.maximum(np.asarray(y, dtype=float), 0.0)


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} by descending sort and threshold."""
    y = np.asarray(y, dtype=float)
    if y.size < 1:
        raise ValueError("Simplex projection needs at least one coordinate")
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, y.size + 1)
    rho = int(np.nonzero(u - css / ks > 0)[0][-1])
    theta = css[rho] / (rho + 1)
    return np.maximum(y - theta, 0.0)


def nonneg_indicator() -> ProxTerm:
    def value(x):
        return 0.0 if np.all(np.asarray(x) >= 0) else np.inf
    return ProxTerm(value=value, prox=lambda y, nu: project_nonneg(y),
                    lower_bound=0.0, name="nonneg")


def simplex_indicator() -> ProxTerm:
    def value(x):
        x = np.asarray(x)
        if np.all(x >= 0) and abs(float(x.sum()) - 1.0) <= SIMPLEX_TOL:
            return 0.0
        return np.inf
    return ProxTerm(value=value, prox=lambda y, nu: project_simplex(y),
                    lower_bound=0.0, name="simplex")


# =============================================================================
# Brute-force oracle
# =============================================================================

def default_directions(n: int) -> np.ndarray:
    """All nonzero vectors of {-1, 0, 1}^n, normalized."""
    dirs = np.array([d for d in itertools.product((-1.0, 0.0, 1.0), repeat=n) if any(d)])
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def simplex_directions(n: int) -> np.ndarray:
    """Moves e_i - e_j, which keep the coordinate sum fixed."""
    dirs = []
    for i, j in itertools.permutations(range(n), 2):
        d = np.zeros(n)
        d[i], d[j] = 1.0, -1.0
        dirs.append(d / np.sqrt(2.0))
    return np.array(dirs) if dirs else np.zeros((0, n))


def prox_oracle(
    value: Callable[[np.ndarray], float],
    y: np.ndarray,
    nu: float,
    grid: np.ndarray,
    directions: Optional[np.ndarray] = None,
    starts: int = 3,
    step: Optional[float] = None,
    min_step: float = 1e-6,
) -> np.ndarray:
    """Brute-force Prox_{nu h}(y) for n <= 3.

    Evaluates value(z) + ||z - y||^2 / (2 nu) on every grid point, then
    refines the best ``starts`` points by pattern search with a shrinking
    step until the step drops below ``min_step``.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n > 3:
        raise ValueError(f"prox_oracle supports n <= 3, got n = {n}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 1:
        grid = grid.reshape(-1, n)
    if grid.shape[0] == 0 or grid.shape[1] != n:
        raise ValueError(f"Grid must be a nonempty (G, {n}) array, got shape {grid.shape}")
    if directions is None:
        directions = default_directions(n)
    if step is None:
        spread = float(np.max(grid.max(axis=0) - grid.min(axis=0))) if grid.shape[0] > 1 else 1.0
        step = max(spread / max(round(grid.shape[0] ** (1.0 / n)) - 1, 1), min_step)

    scores = np.array([prox_objective(value, z, y, nu) for z in grid])
    order = np.argsort(scores, kind="stable")[:max(starts, 1)]

    best_z, best_score = grid[order[0]].copy(), scores[order[0]]
    for idx in order:
        z, score = _pattern_search(value, y, nu, grid[idx].copy(), scores[idx],
                                   directions, step, min_step)
        if score < best_score:
            best_z, best_score = z, score
    return best_z


def _pattern_search(value, y, nu, z, score, directions, step, min_step):
    while step >= min_step:
        improved = False
        for d in directions:
            candidate = z + step * d
            cand_score = prox_objective(value, candidate, y, nu)
            if cand_score < score:
                z, score, improved = candidate, cand_score, True
                break
        if not improved:
            step *= 0.5
    return z, score


def cube_grid(n: int, radius: float, points: int) -> np.ndarray:
    """Uniform grid on [-radius, radius]^n."""
    axis = np.linspace(-radius, radius, points)
    return np.array(list(itertools.product(axis, repeat=n)))


def simplex_grid(n: int, points: int) -> np.ndarray:
    """Barycentric grid on the probability simplex."""
    steps = points - 1
    rows = [np.array(c, dtype=float) / steps
            for c in itertools.product(range(steps + 1), repeat=n) if sum(c) == steps]
    return np.array(rows)

