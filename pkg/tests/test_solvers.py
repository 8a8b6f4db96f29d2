"""
Solver tests
============
Building blocks, the PGels loop, the reductions to NPG and PG, and the
fixed-step baselines.

Usage:
    pytest tests/test_solvers.py -v
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from pgels.diagnostics import assert_trace, check_trace
from pgels.errors import InvariantViolation
from pgels.instances import InstanceSpec, build_problem, lasso_problem
from pgels.linesearch import LineSearchParams
from pgels.problem import CompositeProblem, stationarity_residual
from pgels.prox import L1Term, nonneg_indicator, soft_threshold
from pgels.solvers import (
    ALGORITHMS,
    Budget,
    NesterovState,
    SolverConfig,
    l1_minus_l2_subgradient,
    make_config,
    nesterov_beta,
    prox_grad_step,
    run_algorithm,
    run_fista,
    run_npg,
    run_pdcae,
    run_pgels,
    spectral_mu0,
)


# =============================================================================
# BUILDING BLOCKS
# =============================================================================

class TestBuildingBlocks:

    def test_gradient_step_without_regularizer(self, quadratic):
        prox = quadratic(np.zeros(2)).prox
        y, g = np.array([1.0, 2.0]), np.array([4.0, -2.0])
        np.testing.assert_allclose(prox_grad_step(y, g, 2.0, prox), [-1.0, 3.0])

    def test_zero_gradient_soft_thresholds(self):
        y = np.array([1.0, -0.2, 0.5])
        u = prox_grad_step(y, np.zeros(3), 4.0, L1Term(1.0).as_prox_term())
        np.testing.assert_allclose(u, soft_threshold(y, 0.25))

    def test_nonpositive_mu_rejected(self):
        with pytest.raises(ValueError):
            prox_grad_step(np.zeros(2), np.zeros(2), 0.0, L1Term(1.0).as_prox_term())

    def test_nesterov_sequence(self):
        beta0, state = nesterov_beta(NesterovState())
        assert beta0 == 0.0
        beta1, state = nesterov_beta(state)
        assert beta1 == 0.0
        beta2, state = nesterov_beta(state)
        t1 = (1.0 + math.sqrt(5.0)) / 2.0
        t2 = (1.0 + math.sqrt(1.0 + 4.0 * t1 ** 2)) / 2.0
        assert beta2 == pytest.approx((t1 - 1.0) / t2)
        assert beta2 == pytest.approx(0.28175, abs=1e-4)

    def test_spectral_degenerate_keeps_previous(self):
        y = np.ones(2)
        assert spectral_mu0(y, y, np.zeros(2), np.ones(2), 3.0, (1e-6, 10.0)) == 3.0

    def test_spectral_floor(self):
        mu = spectral_mu0(np.array([1.0, 0.0]), np.zeros(2), np.array([0.1, 0.0]), np.zeros(2),
                          4.0, (1e-6, 100.0))
        assert mu == 2.0

    def test_spectral_cap(self):
        mu = spectral_mu0(np.array([1.0, 0.0]), np.zeros(2), np.array([1000.0, 0.0]), np.zeros(2),
                          4.0, (1e-6, 100.0))
        assert mu == 100.0

    def test_spectral_quotient(self):
        mu = spectral_mu0(np.array([2.0, 0.0]), np.zeros(2), np.array([14.0, 3.0]), np.zeros(2),
                          1.0, (1e-6, 100.0))
        assert mu == pytest.approx(7.0)

    def test_budget_needs_a_limit(self):
        with pytest.raises(ValidationError):
            Budget()


# =============================================================================
# PGELS
# =============================================================================

class TestPgels:

    def test_monotone_on_one_dimensional_quadratic(self, quadratic):
        problem = quadratic(np.zeros(1))
        config = SolverConfig(line_search=LineSearchParams.for_lipschitz(1.0, 0.0), beta_schedule="zero",
                              mu0_schedule="constant", mu0=1.0, budget=Budget(max_iterations=5))
        trace = run_pgels(problem, config, np.array([1.0]))
        values = trace.objective_values
        assert values[0] == 0.5
        assert np.all(np.diff(values) <= 0)
        assert trace.final_value == 0.0
        assert trace.termination == "max-iterations"

    def test_invariants_hold(self, small_logistic):
        trace = run_algorithm("pgels", small_logistic, np.zeros(small_logistic.dimension),
                              Budget(max_iterations=200), delta=0.1)
        assert_trace(trace)
        assert trace.final_value < trace.f0

    def test_extrapolation_used(self, small_l12):
        trace = run_algorithm("pgels", small_l12, np.zeros(small_l12.dimension),
                              Budget(max_iterations=100), delta=0.9)
        beta = trace.column("beta_bar")
        assert beta.max() > 0.0
        assert beta.max() <= 0.9 * 10.0

    def test_line_search_failure_raises(self, quadratic):
        config = SolverConfig(line_search=LineSearchParams.for_lipschitz(1.0, 0.0), beta_schedule="zero",
                              mu0_schedule="constant", mu0=1e-6, inner_cap=1,
                              budget=Budget(max_iterations=3))
        with pytest.raises(InvariantViolation):
            run_pgels(quadratic(np.zeros(1)), config, np.array([1.0]))

    def test_start_outside_domain_rejected(self, quadratic):
        base = quadratic(np.zeros(2))
        problem = CompositeProblem(smooth=base.smooth, prox=nonneg_indicator(), dimension=2)
        config = make_config("pgels", 1.0, 0.1, Budget(max_iterations=5))
        with pytest.raises(ValueError):
            run_pgels(problem, config, np.array([-1.0, 0.0]))

    def test_prox_eval_budget_and_clock(self, lasso):
        trace = run_algorithm("pgels", lasso, np.zeros(lasso.dimension),
                              Budget(max_prox_evals=120, clock="prox-evals"), delta=0.1)
        assert trace.termination == "max-prox-evals"
        assert trace.prox_evals >= 120
        np.testing.assert_array_equal(trace.times, trace.column("prox_evals"))

    def test_prox_eval_clock_is_deterministic(self, small_logistic):
        budget = Budget(max_prox_evals=150, clock="prox-evals")
        x0 = np.zeros(small_logistic.dimension)
        first = run_algorithm("pgels", small_logistic, x0, budget, delta=0.1)
        second = run_algorithm("pgels", small_logistic, x0, budget, delta=0.1)
        np.testing.assert_array_equal(first.objective_values, second.objective_values)
        np.testing.assert_array_equal(first.times, second.times)

    def test_residual_stop(self, lasso):
        trace = run_algorithm("pgels", lasso, np.zeros(lasso.dimension),
                              Budget(max_iterations=5000, residual_tol=1e-3), delta=0.1)
        assert trace.termination == "residual"
        assert trace.records[-1].residual <= 1e-3

    def test_restart_variant_records_restarts(self, lasso):
        trace = run_algorithm("pgels", lasso, np.zeros(lasso.dimension), Budget(max_iterations=450),
                              delta=0.1, beta_schedule="nesterov-restart", restart_interval=200)
        restarted = [r.k for r in trace.records if r.restarted]
        assert restarted
        assert_trace(trace)

    @pytest.mark.parametrize("name, delta", [("pgels", 0.9), ("npg", 0.0)])
    def test_long_run_ends_in_numerical_stall(self, small_l12, name, delta):
        trace = run_algorithm(name, small_l12, np.zeros(small_l12.dimension),
                              Budget(max_iterations=800), delta=delta)
        assert trace.termination == "numerical-stall"
        assert trace.iterations < 800
        assert np.isfinite(trace.final_value) and trace.final_value < trace.f0
        np.testing.assert_array_equal(trace.x_final.shape, (small_l12.dimension,))
        failed = [c.name for c in check_trace(trace) if not c.passed]
        assert not failed, f"Failed checks: {failed}"


# =============================================================================
# REDUCTIONS
# =============================================================================

class TestReductions:

    def test_delta_zero_matches_npg(self):
        problem, _ = lasso_problem(seed=3)
        x0 = np.zeros(problem.dimension)
        config = make_config("pgels", problem.lipschitz, 0.0, Budget(max_iterations=150), record_iterates=True)
        pgels = run_pgels(problem, config, x0)
        npg = run_npg(problem, config, x0)
        assert len(pgels.iterates) == len(npg.iterates) > 1
        for a, b in zip(pgels.iterates, npg.iterates):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(pgels.column("inner_count"), npg.column("inner_count"))

    def test_mu_max_never_shrinks(self, small_logistic):
        trace = run_algorithm("pg-ls", small_logistic, np.zeros(small_logistic.dimension),
                              Budget(max_iterations=50))
        assert np.all(trace.column("inner_count")[1:] == 1)

    def test_lemma_safe_never_shrinks(self, small_logistic):
        trace = run_algorithm("pge", small_logistic, np.zeros(small_logistic.dimension),
                              Budget(max_iterations=50), delta=0.1)
        assert np.all(trace.column("inner_count")[1:] == 1)

    def test_presets(self):
        budget = Budget(max_iterations=1)
        assert make_config("npg", 2.0, 0.5, budget).line_search.delta == 0.0
        assert make_config("pgels", 2.0, 0.5, budget).line_search.delta == 0.5
        assert make_config("pge", 2.0, 0.5, budget).mu0_schedule == "max"
        with pytest.raises(ValueError):
            make_config("fista", 2.0, 0.5, budget)


# =============================================================================
# FIXED-STEP BASELINES
# =============================================================================

class TestBaselines:

    def test_pg_one_step_to_minimizer(self, quadratic):
        trace = run_fista(quadratic(np.zeros(1)), "pg", np.array([1.0]), Budget(max_iterations=1))
        np.testing.assert_array_equal(trace.x_final, [0.0])

    def test_fista_gap_decay(self, lasso):
        x0 = np.zeros(lasso.dimension)
        trace = run_algorithm("fista", lasso, x0, Budget(max_iterations=100))
        reference = run_algorithm("fista", lasso, x0, Budget(max_iterations=3000)).best_value
        best = np.minimum.accumulate(trace.objective_values) - reference
        assert best[10] >= 50 * best[100]

    def test_refista_matches_fista_until_restart(self, lasso):
        x0 = np.zeros(lasso.dimension)
        budget = Budget(max_iterations=300)
        fista = run_fista(lasso, "fista", x0, budget, record_iterates=True)
        refista = run_fista(lasso, "refista", x0, budget, record_iterates=True)
        flags = [r.restarted for r in refista.records]
        first = flags.index(True) if True in flags else len(flags) - 1
        for k in range(first + 1):
            np.testing.assert_array_equal(fista.iterates[k], refista.iterates[k])

    def test_refista_periodic_restart(self, lasso):
        trace = run_fista(lasso, "refista", np.zeros(lasso.dimension), Budget(max_iterations=401),
                          restart_interval=200)
        assert trace.records[201].restarted
        assert trace.records[401].restarted

    def test_pg_is_monotone(self, lasso):
        trace = run_algorithm("pg", lasso, np.zeros(lasso.dimension), Budget(max_iterations=200))
        values = trace.objective_values
        assert np.all(np.diff(values) <= 1e-12 * np.abs(values[1:]).max())

    def test_unknown_variant(self, lasso):
        with pytest.raises(ValueError):
            run_fista(lasso, "ista", np.zeros(lasso.dimension), Budget(max_iterations=1))


class TestPdcae:

    def test_subgradient_at_origin(self):
        np.testing.assert_array_equal(l1_minus_l2_subgradient(np.zeros(3), 0.5), np.zeros(3))

    def test_subgradient_scaled_unit(self):
        xi = l1_minus_l2_subgradient(np.array([3.0, 4.0]), 0.5)
        np.testing.assert_allclose(xi, [0.3, 0.4])

    def test_first_step_is_l1_prox_gradient(self, small_l12):
        lasso, _ = lasso_problem(shape=(30, 60, 4), lam=0.1, seed=0)
        x0 = np.zeros(small_l12.dimension)
        pdcae = run_pdcae(small_l12, x0, Budget(max_iterations=1), record_iterates=True)
        pg = run_fista(lasso, "pg", x0, Budget(max_iterations=1), record_iterates=True)
        # lam / L against (1 / L) * lam: equal up to rounding
        np.testing.assert_allclose(pdcae.iterates[1], pg.iterates[1], rtol=1e-12, atol=1e-15)

    def test_decreases_objective(self, small_l12):
        trace = run_pdcae(small_l12, np.zeros(small_l12.dimension), Budget(max_iterations=300))
        assert trace.best_value < trace.f0

    def test_converges_to_stationary_point(self, small_l12):
        trace = run_pdcae(small_l12, np.zeros(small_l12.dimension), Budget(max_iterations=5000))
        assert stationarity_residual(small_l12, trace.x_final, small_l12.lipschitz) <= 1e-3

    @pytest.mark.slow
    def test_converges_on_unit_scale_instance(self):
        problem, _ = build_problem(InstanceSpec(family="ls-l1l2", j=1, lam=0.1, seed=0))
        trace = run_pdcae(problem, np.zeros(problem.dimension), Budget(max_iterations=10000))
        assert stationarity_residual(problem, trace.x_final, problem.lipschitz) <= 1e-3

    def test_needs_l1_minus_l2(self, lasso):
        with pytest.raises(ValueError):
            run_pdcae(lasso, np.zeros(lasso.dimension), Budget(max_iterations=1))


class TestRegistry:

    @pytest.mark.parametrize("name", [a for a in ALGORITHMS if a != "pdcae"])
    def test_every_algorithm_runs_on_lasso(self, lasso, name):
        trace = run_algorithm(name, lasso, np.zeros(lasso.dimension), Budget(max_iterations=20), delta=0.1)
        assert trace.algorithm == name
        assert trace.iterations == 20
        assert trace.best_value < trace.f0

    def test_unknown_algorithm(self, lasso):
        with pytest.raises(ValueError):
            run_algorithm("nmapg", lasso, np.zeros(lasso.dimension), Budget(max_iterations=1))
