"""
Synthetic benchmark instances
=============================
logistic-l1 : Gaussian features, s-sparse Gaussian truth, labels sign(A x_hat + eps 1)
ls-l1l2     : unit-norm Gaussian columns, b = A x_hat + 0.01 z

Random numbers come from numpy's Generator over the counter-based Philox
bit generator; Gaussians use numpy's ziggurat transform. Draw order:
A, support S, x_hat on S, then eps (logistic) or z (least squares).
"""

import logging
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DataError
from .losses import LeastSquaresData, LogisticData, least_squares_term, logistic_term
from .problem import CompositeProblem
from .prox import L1MinusL2Term, L1Term

logger = logging.getLogger(__name__)

FAMILIES = ("logistic-l1", "ls-l1l2")
LABEL_REDRAWS = 100


class InstanceSpec(BaseModel):
    """One trial of one benchmark cell: (m, n, s) = (100j, 1000j, 20j) unless shape is given."""
    model_config = ConfigDict(frozen=True)

    family: Literal["logistic-l1", "ls-l1l2"]
    j: int = Field(1, ge=1)
    lam: float = Field(gt=0)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    shape: Optional[Tuple[int, int, int]] = None

    @model_validator(mode="after")
    def _valid_shape(self):
        if self.shape is not None:
            m, n, s = self.shape
            if m < 1 or n < 1 or not 0 <= s <= n:
                raise ValueError(f"Shape (m, n, s) must satisfy m, n >= 1 and 0 <= s <= n, got {self.shape}")
        return self

    @property
    def dims(self) -> Tuple[int, int, int]:
        if self.shape is not None:
            return self.shape
        return 100 * self.j, 1000 * self.j, 20 * self.j

    def with_seed(self, seed: int) -> "InstanceSpec":
        return self.model_copy(update={"seed": seed})


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _sparse_truth(rng: np.random.Generator, n: int, s: int) -> np.ndarray:
    x_hat = np.zeros(n)
    support = rng.choice(n, size=s, replace=False)
    x_hat[support] = rng.standard_normal(s)
    return x_hat


def gen_logistic_instance(spec: InstanceSpec) -> Tuple[LogisticData, np.ndarray]:
    """Labels b = sign(A x_hat + eps 1) with eps ~ U[0, 1]; a zero product counts as +1."""
    if spec.family != "logistic-l1":
        raise ValueError(f"Expected a logistic-l1 spec, got {spec.family}")
    m, n, s = spec.dims
    rng = make_rng(spec.seed)
    A = rng.standard_normal((m, n))
    x_hat = _sparse_truth(rng, n, s)
    margin = A @ x_hat

    for attempt in range(LABEL_REDRAWS):
        eps = rng.uniform(0.0, 1.0)
        b = np.where(margin + eps >= 0.0, 1.0, -1.0)
        if m == 1 or not np.all(b == b[0]):
            break
        logger.debug(f"Seed {spec.seed}: all labels equal, redrawing eps (attempt {attempt + 1})")
    else:
        raise DataError(f"Seed {spec.seed}: labels stayed identical after {LABEL_REDRAWS} redraws")

    return LogisticData.from_features(A, b), x_hat


def gen_l12_instance(spec: InstanceSpec) -> Tuple[LeastSquaresData, np.ndarray]:
    """Unit-norm Gaussian columns and b = A x_hat + 0.01 z."""
    if spec.family != "ls-l1l2":
        raise ValueError(f"Expected an ls-l1l2 spec, got {spec.family}")
    m, n, s = spec.dims
    rng = make_rng(spec.seed)
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=0)
    x_hat = _sparse_truth(rng, n, s)
    z = rng.standard_normal(m)
    return LeastSquaresData(A=A, b=A @ x_hat + 0.01 * z), x_hat


def build_problem(spec: InstanceSpec) -> Tuple[CompositeProblem, np.ndarray]:
    """Composite problem and ground truth for one instance spec."""
    if spec.family == "logistic-l1":
        data, x_hat = gen_logistic_instance(spec)
        problem = CompositeProblem(smooth=logistic_term(data),
                                   prox=L1Term(spec.lam, skip_last=True).as_prox_term(),
                                   dimension=data.C.shape[1])
    else:
        data, x_hat = gen_l12_instance(spec)
        if data.zero_columns().size:
            raise DataError(f"A has zero columns {data.zero_columns()[:5].tolist()}; F is not level-bounded")
        problem = CompositeProblem(smooth=least_squares_term(data),
                                   prox=L1MinusL2Term(spec.lam).as_prox_term(),
                                   dimension=data.A.shape[1])
    logger.debug(f"Built {spec.family} instance {spec.dims} seed={spec.seed}, L_f={problem.lipschitz:.6g}")
    return problem, x_hat


def lasso_problem(shape: Tuple[int, int, int] = (50, 200, 10), lam: float = 0.1,
                  seed: int = 0) -> Tuple[CompositeProblem, np.ndarray]:
    """Convex l1 least squares on the ls-l1l2 data: 0.5||Ax - b||^2 + lam ||x||_1."""
    data, x_hat = gen_l12_instance(InstanceSpec(family="ls-l1l2", lam=lam, seed=seed, shape=shape))
    problem = CompositeProblem(smooth=least_squares_term(data), prox=L1Term(lam).as_prox_term(),
                               dimension=data.A.shape[1])
    return problem, x_hat
