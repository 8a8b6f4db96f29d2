"""
Potential function and non-monotone line search
===============================================
H_delta(u, v, mu) = F(u) + (delta mu / 4) ||u - v||^2 is the merit
function. A step u from x^k is accepted when

    H_delta(u, x^k, mu_k) - max_{[k-N]+ <= i <= k} H_delta(x^i, x^{i-1}, mu_bar_{i-1})
        <= -(c / 2) ||u - x^k||^2

and otherwise mu grows by tau (capped at mu_max) while beta shrinks by eta.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import InvariantViolation
from .settings import LINE_SEARCH_DEFAULTS

logger = logging.getLogger(__name__)


class LineSearchParams(BaseModel):
    """Line-search constants shared by PGels, NPG and their variants."""
    model_config = ConfigDict(frozen=True)

    c: float = Field(LINE_SEARCH_DEFAULTS["c"], gt=0)
    tau: float = Field(LINE_SEARCH_DEFAULTS["tau"], gt=1)
    eta: float = Field(LINE_SEARCH_DEFAULTS["eta"], gt=0, lt=1)
    delta: float = Field(0.0, ge=0, lt=1)
    mu_min: float = Field(LINE_SEARCH_DEFAULTS["mu_min"], gt=0)
    mu_max: float = Field(1.0, gt=0)
    beta_max: float = Field(LINE_SEARCH_DEFAULTS["beta_max"], ge=0)

    @model_validator(mode="after")
    def _ordered_bounds(self):
        if self.mu_max < self.mu_min:
            raise ValueError(f"mu_max ({self.mu_max}) must be >= mu_min ({self.mu_min})")
        return self

    @classmethod
    def for_lipschitz(cls, lipschitz: float, delta: float = 0.0, **overrides) -> "LineSearchParams":
        """Default constants with mu_max = (L_f + 2c) / (1 - delta)."""
        c = overrides.get("c", LINE_SEARCH_DEFAULTS["c"])
        fields = {"c": c, "delta": delta, "mu_max": (lipschitz + 2 * c) / (1 - delta)}
        fields.update(overrides)
        return cls(**fields)

    def validate_for(self, lipschitz: float) -> "LineSearchParams":
        """Enforce mu_max >= (L_f + 2c) / (1 - delta) >= mu_min."""
        anchor = (lipschitz + 2 * self.c) / (1 - self.delta)
        if not self.mu_max >= anchor >= self.mu_min:
            raise ValueError(
                f"Need mu_max >= (L_f + 2c)/(1 - delta) >= mu_min, got "
                f"mu_max={self.mu_max:.6g}, anchor={anchor:.6g}, mu_min={self.mu_min:.6g}"
            )
        return self

    @property
    def beta_cap(self) -> float:
        """Upper end of the initial extrapolation range [0, delta * beta_max]."""
        return self.delta * self.beta_max


def default_line_search(lipschitz: float, delta: float, **overrides) -> LineSearchParams:
    """Line-search constants used by every benchmark run."""
    return LineSearchParams.for_lipschitz(lipschitz, delta, **overrides)


# =============================================================================
# Potential history
# =============================================================================

@dataclass(frozen=True)
class PotentialEntry:
    """H_delta(x^i, x^{i-1}, mu_bar_{i-1}) together with its ingredients."""
    index: int
    h_value: float
    f_value: float
    mu_bar: float
    beta_bar: float
    step_norm: float


class PotentialHistory:
    """Ring buffer of the last N + 1 potential entries (indices [k - N]+ .. k)."""

    def __init__(self, window: int):
        if window < 0:
            raise ValueError(f"Window must be nonnegative, got {window}")
        self.window = window
        self.entries = deque(maxlen=window + 1)

    @classmethod
    def seeded(cls, window: int, f0: float) -> "PotentialHistory":
        """Initial window: x^{-1} = x^0 and mu_bar_{-1} = 1, so the entry equals F(x^0)."""
        history = cls(window)
        history.push(PotentialEntry(index=0, h_value=f0, f_value=f0,
                                    mu_bar=1.0, beta_bar=0.0, step_norm=0.0))
        return history

    def push(self, entry: PotentialEntry):
        if self.entries and entry.index != self.entries[-1].index + 1:
            raise InvariantViolation(
                f"History expects index {self.entries[-1].index + 1}, got {entry.index}"
            )
        self.entries.append(entry)

    @property
    def latest(self) -> int:
        if not self.entries:
            raise InvariantViolation("Potential history is empty")
        return self.entries[-1].index

    def __len__(self):
        return len(self.entries)


def potential_value(f_value: float, u: np.ndarray, v: np.ndarray, mu: float, delta: float) -> float:
    """H_delta(u, v, mu) = F(u) + (delta mu / 4) ||u - v||^2."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if delta == 0.0:
        return f_value
    d = u - v
    return f_value + (delta * mu / 4.0) * float(d @ d)


def history_max(history: PotentialHistory, k: Optional[int] = None) -> tuple:
    """(max H over the window, l(k)); ties go to the most recent index."""
    if not history.entries:
        raise InvariantViolation("Potential history is empty")
    if k is not None and history.latest != k:
        raise InvariantViolation(f"History ends at index {history.latest}, expected {k}")

    best_value, best_index = -np.inf, -1
    for entry in history.entries:
        if entry.h_value >= best_value:
            best_value, best_index = entry.h_value, entry.index
    return best_value, best_index


def window_test(h: float, h_max: float, step_sq: float, c: float) -> bool:
    """H - max window H <= -(c/2) ||u - x^k||^2, exact comparison."""
    return h - h_max <= -(c / 2.0) * step_sq


def accept_step(candidate_f: float, u: np.ndarray, x_k: np.ndarray, mu_k: float,
                history: PotentialHistory, params: LineSearchParams) -> bool:
    """Non-monotone sufficient-decrease test, evaluated without slack."""
    d = u - x_k
    step_sq = float(d @ d)
    h = potential_value(candidate_f, u, x_k, mu_k, params.delta)
    h_max, _ = history_max(history)
    return window_test(h, h_max, step_sq, params.c)


def shrink_params(mu: float, beta: float, params: LineSearchParams) -> tuple:
    """Rejected candidate: mu <- min(tau mu, mu_max), beta <- eta beta."""
    return min(params.tau * mu, params.mu_max), params.eta * beta


# =============================================================================
# Sufficient descent and the inner-loop bound
# =============================================================================

def lemma_beta_threshold(mu: float, mu_bar_prev: float, lipschitz: float, delta: float) -> float:
    """Largest beta for which the sufficient-descent lemma applies at this mu."""
    if mu <= lipschitz:
        return 0.0
    return math.sqrt(delta * (mu - lipschitz) * mu_bar_prev / (4.0 * (mu + lipschitz) ** 2))


def sufficient_descent_holds(h_candidate: float, h_current: float, u: np.ndarray, x_k: np.ndarray,
                             mu: float, params: LineSearchParams, lipschitz: float) -> bool:
    """H(u, x^k, mu) - H(x^k, x^{k-1}, mu_bar) <= -((1 - delta) mu - L_f) / 4 ||u - x^k||^2."""
    d = u - x_k
    rhs = -((1.0 - params.delta) * mu - lipschitz) / 4.0 * float(d @ d)
    slack = 1e-10 * max(1.0, abs(h_current))
    return h_candidate - h_current <= rhs + slack


def mu_loop_bound(params: LineSearchParams) -> int:
    """floor((log mu_max - log mu_min) / log tau + 1)."""
    return int(math.floor((math.log(params.mu_max) - math.log(params.mu_min)) / math.log(params.tau) + 1))


def inner_loop_bound(params: LineSearchParams, beta0: float, mu_bar_prev: float, lipschitz: float) -> int:
    """max(n_k, n_hat_k) + 1 candidate evaluations.

    n_hat_k counts the eta-shrinks needed to push beta0 under the lemma
    threshold at mu_max (the beta allowance).
    """
    n_mu = mu_loop_bound(params)
    threshold = lemma_beta_threshold(params.mu_max, mu_bar_prev, lipschitz, params.delta)
    if beta0 <= threshold:
        n_beta = 0
    elif threshold <= 0.0:
        # delta = 0 with beta0 > 0: the lemma never applies, bound by the mu loop alone
        n_beta = 0
    else:
        n_beta = int(math.ceil(math.log(threshold / beta0) / math.log(params.eta)))
    return max(n_mu, n_beta) + 1
