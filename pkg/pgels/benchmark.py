"""
Benchmark runner
================
Runs every algorithm of a suite on the same seeded instances from x0 = 0,
averages E(t) over trials and writes:

    evolution.csv   family,j,lambda,algo,trial_count,t,E_mean,E_stderr
    manifest.yaml   suite config, seeds, version, termination reasons, failures
    summary.txt     human-readable table rendered from templates/summary.txt.j2

Usage:
    from pgels.benchmark import SuiteConfig, run_benchmark, write_outputs
    suite = SuiteConfig.from_yaml("suites/smoke.yaml")
    result = run_benchmark(suite, workers=4)
    write_outputs(result, "results/smoke")
"""

import csv
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import yaml
from jinja2 import Environment, PackageLoader
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import __version__
from .errors import DegenerateBenchmarkError
from .evolution import EvolutionCurve, default_time_grid, evolution_metric, trial_f_min
from .instances import InstanceSpec, build_problem
from .settings import BENCH, family_defaults
from .solvers import ALGORITHMS, Budget, RunTrace, run_algorithm

logger = logging.getLogger(__name__)

CSV_HEADER = ["family", "j", "lambda", "algo", "trial_count", "t", "E_mean", "E_stderr"]


class SuiteConfig(BaseModel):
    """One benchmark suite: a family, its (j, lambda) grid, algorithms and budget."""
    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    family: Literal["logistic-l1", "ls-l1l2"]
    j_values: List[int] = Field(default_factory=lambda: [1])
    lambdas: List[float]
    algorithms: List[str]
    trials: int = Field(BENCH["trials"], ge=1)
    seed: int = Field(BENCH["seed"], ge=0)
    delta: Optional[float] = Field(None, ge=0, lt=1)
    t_max: Optional[float] = Field(None, gt=0)
    iters: Optional[int] = Field(None, ge=1)
    shape: Optional[Tuple[int, int, int]] = None
    grid_points: int = Field(BENCH["grid_points"], ge=2)

    @field_validator("algorithms")
    @classmethod
    def _known_algorithms(cls, algorithms):
        unknown = [a for a in algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"Unknown algorithms {unknown}; choose from {', '.join(ALGORITHMS)}")
        if not algorithms:
            raise ValueError("At least one algorithm is required")
        return algorithms

    @field_validator("lambdas")
    @classmethod
    def _positive_lambdas(cls, lambdas):
        if not lambdas or any(lam <= 0 for lam in lambdas):
            raise ValueError(f"lambdas must be a nonempty list of positive values, got {lambdas}")
        return lambdas

    @model_validator(mode="after")
    def _one_budget(self):
        if (self.t_max is None) == (self.iters is None):
            raise ValueError("Give exactly one of t_max (seconds) or iters (prox evaluations)")
        return self

    @classmethod
    def from_yaml(cls, path, **overrides) -> "SuiteConfig":
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        data.update({k: v for k, v in overrides.items() if v is not None})
        if "t_max" in overrides and overrides["t_max"] is not None:
            data.pop("iters", None)
        if "iters" in overrides and overrides["iters"] is not None:
            data.pop("t_max", None)
        return cls(**data)

    @property
    def deterministic(self) -> bool:
        return self.iters is not None

    @property
    def resolved_delta(self) -> float:
        return self.delta if self.delta is not None else family_defaults(self.family)["delta"]

    def budget(self) -> Budget:
        if self.deterministic:
            return Budget(max_prox_evals=self.iters, clock="prox-evals")
        return Budget(max_time=self.t_max)

    def time_grid(self) -> np.ndarray:
        return default_time_grid(float(self.iters if self.deterministic else self.t_max), self.grid_points)

    def cells(self) -> List[Tuple[int, float]]:
        return list(itertools.product(self.j_values, self.lambdas))


@dataclass
class TrialOutcome:
    index: int
    seed: int
    traces: Dict[str, RunTrace] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)


@dataclass
class CellResult:
    """Averaged curves and bookkeeping for one (j, lambda) cell."""
    family: str
    j: int
    lam: float
    seeds: List[int]
    curves: Dict[str, EvolutionCurve]
    terminations: Dict[str, List[str]]
    failures: List[str] = field(default_factory=list)
    f_min: List[float] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.failures)


@dataclass
class BenchmarkResult:
    suite: SuiteConfig
    cells: List[CellResult]
    started: str
    finished: str = ""

    @property
    def flagged(self) -> bool:
        return any(cell.flagged for cell in self.cells)


# =============================================================================
# Running
# =============================================================================

def run_trial(spec: InstanceSpec, algorithms: List[str], budget: Budget, delta: float,
              index: int = 0) -> TrialOutcome:
    """All algorithms on one instance from the origin; failures are captured per algorithm."""
    outcome = TrialOutcome(index=index, seed=spec.seed)
    try:
        problem, _ = build_problem(spec)
    except Exception as e:
        logger.error(f"Trial {index} (seed {spec.seed}): instance generation failed: {e}")
        outcome.failures.append(f"trial {index}: instance: {e}")
        return outcome

    x0 = np.zeros(problem.dimension)
    for name in algorithms:
        try:
            outcome.traces[name] = run_algorithm(name, problem, x0, budget, delta=delta)
        except Exception as e:
            logger.error(f"Trial {index} (seed {spec.seed}): {name} failed: {e}")
            outcome.failures.append(f"trial {index}: {name}: {type(e).__name__}: {e}")
    return outcome


def run_cell(suite: SuiteConfig, j: int, lam: float, workers: int = 1) -> CellResult:
    """Every trial of one (j, lambda) cell, merged in trial order."""
    base = InstanceSpec(family=suite.family, j=j, lam=lam, seed=suite.seed, shape=suite.shape)
    seeds = [suite.seed + t for t in range(suite.trials)]
    budget = suite.budget()
    delta = suite.resolved_delta
    m, n, s = base.dims
    logger.info(f"Cell {suite.family} j={j} lambda={lam}: (m, n, s)=({m}, {n}, {s}), "
                f"{suite.trials} trials, {len(suite.algorithms)} algorithms")

    outcomes: List[Optional[TrialOutcome]] = [None] * suite.trials
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as executor:
        futures = {
            executor.submit(run_trial, base.with_seed(seed), suite.algorithms, budget, delta, t): t
            for t, seed in enumerate(seeds)
        }
        for future in as_completed(futures):
            t = futures[future]
            outcomes[t] = future.result()

    failures = [failure for outcome in outcomes for failure in outcome.failures]
    terminations = {name: [] for name in suite.algorithms}
    for outcome in outcomes:
        for name in suite.algorithms:
            trace = outcome.traces.get(name)
            terminations[name].append(trace.termination if trace is not None else "failed")

    grid = suite.time_grid()
    trials = [outcome.traces for outcome in outcomes]
    try:
        curves = evolution_metric(trials, grid, suite.algorithms)
    except DegenerateBenchmarkError as e:
        logger.error(f"Cell {suite.family} j={j} lambda={lam}: {e}")
        failures.append(f"degenerate: {e}")
        curves = evolution_metric([], grid, suite.algorithms)

    f_min = [trial_f_min(traces.values()) if traces else float("nan") for traces in trials]
    return CellResult(family=suite.family, j=j, lam=lam, seeds=seeds, curves=curves,
                      terminations=terminations, failures=failures, f_min=f_min)


def run_benchmark(suite: SuiteConfig, workers: int = BENCH["workers"]) -> BenchmarkResult:
    result = BenchmarkResult(suite=suite, cells=[], started=datetime.now().isoformat(timespec="seconds"))
    for j, lam in suite.cells():
        cell = run_cell(suite, j, lam, workers)
        if cell.flagged:
            logger.warning(f"Cell j={j} lambda={lam} flagged with {len(cell.failures)} failures")
        result.cells.append(cell)
    result.finished = datetime.now().isoformat(timespec="seconds")
    return result


# =============================================================================
# Output
# =============================================================================

def _fmt(value: float) -> str:
    return f"{value:.9g}"


def csv_rows(result: BenchmarkResult):
    for cell in result.cells:
        for name in result.suite.algorithms:
            curve = cell.curves[name]
            for t, e_mean, e_stderr in zip(curve.grid, curve.mean, curve.stderr):
                yield [cell.family, str(cell.j), _fmt(cell.lam), name, str(curve.trial_count),
                       _fmt(t), _fmt(e_mean), _fmt(e_stderr)]


def write_csv(result: BenchmarkResult, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(csv_rows(result))
    return path


def manifest(result: BenchmarkResult) -> dict:
    suite = result.suite
    return {
        "version": __version__,
        "started": result.started,
        "finished": result.finished,
        "suite": suite.model_dump(mode="json"),
        "delta": suite.resolved_delta,
        "clock": "prox-evals" if suite.deterministic else "wall",
        "cells": [
            {
                "family": cell.family,
                "j": cell.j,
                "lambda": cell.lam,
                "seeds": cell.seeds,
                "f_min": [float(v) for v in cell.f_min],
                "flagged": cell.flagged,
                "terminations": cell.terminations,
                "failures": cell.failures,
            }
            for cell in result.cells
        ],
    }


def render_summary(result: BenchmarkResult) -> str:
    env = Environment(loader=PackageLoader("pgels", "templates"), trim_blocks=True, lstrip_blocks=True)
    template = env.get_template("summary.txt.j2")
    suite = result.suite
    cells = []
    for cell in result.cells:
        rows = []
        for name in suite.algorithms:
            curve = cell.curves[name]
            mid = curve.grid.size // 2
            rows.append({
                "algo": name,
                "trials": curve.trial_count,
                "e_mid": _fmt(curve.mean[mid]),
                "e_final": _fmt(curve.mean[-1]),
                "stderr_final": _fmt(curve.stderr[-1]),
                "terminations": ", ".join(sorted(set(cell.terminations[name]))),
            })
        cells.append({"family": cell.family, "j": cell.j, "lam": _fmt(cell.lam),
                      "flagged": cell.flagged, "failures": cell.failures, "rows": rows})
    unit = "prox evaluations" if suite.deterministic else "seconds"
    grid = suite.time_grid()
    return template.render(suite=suite, cells=cells, unit=unit, version=__version__,
                           t_mid=_fmt(grid[grid.size // 2]), t_max=_fmt(grid[-1]),
                           started=result.started, finished=result.finished)


def write_outputs(result: BenchmarkResult, out_dir) -> Dict[str, Path]:
    """evolution.csv, manifest.yaml and summary.txt under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"csv": write_csv(result, out_dir / "evolution.csv"),
             "manifest": out_dir / "manifest.yaml",
             "summary": out_dir / "summary.txt"}
    with open(paths["manifest"], "w", encoding="utf-8") as f:
        yaml.safe_dump(manifest(result), f, sort_keys=False)
    paths["summary"].write_text(render_summary(result), encoding="utf-8")
    logger.info(f"Wrote {paths['csv']}, {paths['manifest']} and {paths['summary']}")
    return paths
