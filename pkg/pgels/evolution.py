"""
Objective-value evolution E(t).

e(k) = (F(x^k) - F_min) / (F(x^0) - F_min), with F_min the smallest
objective any algorithm recorded in the trial, and
E(t) = min { e(k) : T(k) <= t }, averaged pointwise over trials.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping

import numpy as np

from .errors import DegenerateBenchmarkError
from .settings import BENCH
from .solvers import RunTrace

logger = logging.getLogger(__name__)


@dataclass
class EvolutionCurve:
    """Trial-averaged E(t) of one algorithm on a time grid."""
    algorithm: str
    grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    trial_count: int


def default_time_grid(t_max: float, points: int = BENCH["grid_points"]) -> np.ndarray:
    if not t_max > 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    return np.linspace(0.0, t_max, points)


def trial_f_min(traces: Iterable[RunTrace]) -> float:
    """Smallest objective value recorded by any algorithm in the trial."""
    return min(trace.best_value for trace in traces)


def relative_errors(trace: RunTrace, f_min: float, f0: float) -> np.ndarray:
    """e(k) for every accepted iterate."""
    return (trace.objective_values - f_min) / (f0 - f_min)


def trace_evolution(trace: RunTrace, f_min: float, f0: float, grid: np.ndarray) -> np.ndarray:
    """E(t) of one run evaluated on the grid."""
    best_so_far = np.minimum.accumulate(relative_errors(trace, f_min, f0))
    idx = np.searchsorted(trace.times, grid, side="right") - 1
    return best_so_far[np.maximum(idx, 0)]


def _shared_f0(trial: Mapping[str, RunTrace]) -> float:
    values = [trace.f0 for trace in trial.values()]
    f0 = values[0]
    if not np.allclose(values, f0, rtol=1e-12, atol=0.0):
        raise ValueError(f"Traces in a trial start from different objective values: {values}")
    return f0


def evolution_metric(trials: List[Mapping[str, RunTrace]], grid: np.ndarray,
                     algorithms: Iterable[str] = ()) -> Dict[str, EvolutionCurve]:
    """Per-algorithm E(t) averaged over trials.

    Each trial maps algorithm name to its trace on that trial's instance.
    Algorithms listed in ``algorithms`` but absent from every trial get a
    NaN curve with trial_count 0.
    """
    grid = np.asarray(grid, dtype=float)
    per_algo: Dict[str, list] = {name: [] for name in algorithms}

    for index, trial in enumerate(trials):
        if not trial:
            continue
        f0 = _shared_f0(trial)
        f_min = trial_f_min(trial.values())
        if f0 == f_min:
            raise DegenerateBenchmarkError(f"Trial {index}: every algorithm stayed at F(x0) = {f0:.9g}")
        for name, trace in trial.items():
            per_algo.setdefault(name, []).append(trace_evolution(trace, f_min, f0, grid))

    curves = {}
    for name, rows in per_algo.items():
        if not rows:
            nan = np.full(grid.shape, np.nan)
            curves[name] = EvolutionCurve(name, grid, nan, nan.copy(), 0)
            continue
        stacked = np.vstack(rows)
        mean = stacked.mean(axis=0)
        if len(rows) > 1:
            stderr = stacked.std(axis=0, ddof=1) / np.sqrt(len(rows))
        else:
            stderr = np.zeros(grid.shape)
        curves[name] = EvolutionCurve(name, grid, mean, stderr, len(rows))
    return curves


def prox_evals_to_reach(trace: RunTrace, f_min: float, threshold: float) -> float:
    """First T(k) with e(k) <= threshold, or inf if the run never gets there."""
    e = relative_errors(trace, f_min, trace.f0)
    hits = np.flatnonzero(e <= threshold)
    if hits.size == 0:
        return np.inf
    return float(trace.times[hits[0]])
