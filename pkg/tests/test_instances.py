"""
Synthetic instance generator tests.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from pgels.instances import (
    InstanceSpec,
    build_problem,
    gen_l12_instance,
    gen_logistic_instance,
    lasso_problem,
)
from pgels.prox import L1MinusL2Term, L1Term


class TestInstanceSpec:

    @pytest.mark.parametrize("j, dims", [(1, (100, 1000, 20)), (3, (300, 3000, 60)), (5, (500, 5000, 100))])
    def test_size_rule(self, j, dims):
        assert InstanceSpec(family="ls-l1l2", j=j, lam=0.1).dims == dims

    def test_shape_override(self):
        assert InstanceSpec(family="ls-l1l2", j=3, lam=0.1, shape=(50, 200, 10)).dims == (50, 200, 10)

    def test_sparsity_above_n_rejected(self):
        with pytest.raises(ValidationError):
            InstanceSpec(family="ls-l1l2", lam=0.1, shape=(5, 4, 6))

    def test_seed_range(self):
        with pytest.raises(ValidationError):
            InstanceSpec(family="ls-l1l2", lam=0.1, seed=2 ** 64)

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            InstanceSpec(family="ls-l0", lam=0.1)

    def test_with_seed(self):
        spec = InstanceSpec(family="logistic-l1", lam=1.0, seed=3)
        assert spec.with_seed(9).seed == 9 and spec.seed == 3


class TestLeastSquaresInstances:

    @pytest.fixture
    def spec(self):
        return InstanceSpec(family="ls-l1l2", lam=0.1, seed=4, shape=(40, 100, 7))

    def test_unit_columns(self, spec):
        data, _ = gen_l12_instance(spec)
        np.testing.assert_allclose(np.linalg.norm(data.A, axis=0), 1.0, atol=1e-12)

    def test_sparse_truth(self, spec):
        _, x_hat = gen_l12_instance(spec)
        assert np.count_nonzero(x_hat) == 7

    def test_noise_level(self, spec):
        data, x_hat = gen_l12_instance(spec)
        residual = data.b - data.A @ x_hat
        assert np.linalg.norm(residual) < 0.1 * np.sqrt(40)

    def test_reproducible(self, spec):
        first, x1 = gen_l12_instance(spec)
        second, x2 = gen_l12_instance(spec)
        assert first.A.tobytes() == second.A.tobytes()
        assert first.b.tobytes() == second.b.tobytes()
        np.testing.assert_array_equal(x1, x2)

    def test_seeds_differ(self, spec):
        first, _ = gen_l12_instance(spec)
        second, _ = gen_l12_instance(spec.with_seed(5))
        assert not np.array_equal(first.A, second.A)

    def test_wrong_family(self, spec):
        with pytest.raises(ValueError):
            gen_logistic_instance(spec)

    def test_problem_uses_l1_minus_l2(self, spec):
        problem, _ = build_problem(spec)
        assert isinstance(problem.prox.regularizer, L1MinusL2Term)
        assert problem.dimension == 100

    def test_lasso_shares_data(self, spec):
        problem, x_hat = lasso_problem(spec.shape, 0.1, spec.seed)
        _, expected = gen_l12_instance(spec)
        np.testing.assert_array_equal(x_hat, expected)
        assert isinstance(problem.prox.regularizer, L1Term)


class TestLogisticInstances:

    @pytest.fixture
    def spec(self):
        return InstanceSpec(family="logistic-l1", lam=1.0, seed=2, shape=(40, 100, 7))

    def test_labels(self, spec):
        data, _ = gen_logistic_instance(spec)
        assert set(np.unique(data.b)) == {-1.0, 1.0}

    def test_intercept_column(self, spec):
        data, _ = gen_logistic_instance(spec)
        assert data.C.shape == (40, 101)
        np.testing.assert_array_equal(data.C[:, -1], np.ones(40))

    def test_sparse_truth(self, spec):
        _, x_hat = gen_logistic_instance(spec)
        assert np.count_nonzero(x_hat) == 7

    def test_reproducible(self, spec):
        first, _ = gen_logistic_instance(spec)
        second, _ = gen_logistic_instance(spec)
        assert first.C.tobytes() == second.C.tobytes()
        assert first.b.tobytes() == second.b.tobytes()

    def test_problem_leaves_intercept_unpenalized(self, spec):
        problem, _ = build_problem(spec)
        assert problem.prox.regularizer.skip_last
        assert problem.dimension == 101
        x = np.zeros(101)
        x[-1] = 5.0
        assert problem.prox.value(x) == 0.0
