"""
Smooth losses: least squares and logistic regression.

Both terms report L_f through spectral_norm_sq, a seeded power iteration
on M^T M, so the solvers can place mu_max without a dense SVD.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DataError
from .problem import SmoothTerm

logger = logging.getLogger(__name__)

POWER_ITER_TOL = 1e-9
POWER_ITER_MAX = 5000
POWER_ITER_SEED = 0


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


def spectral_norm_sq(M: np.ndarray) -> float:
    """||M||^2 (largest singular value squared) by power iteration on M^T M.

    Starts from a fixed seeded vector and stops when successive Rayleigh
    quotients agree to 1e-9 relative, or after 5000 iterations.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise DataError(f"Spectral norm needs a nonempty matrix, got shape {M.shape}")

    rng = np.random.Generator(np.random.Philox(POWER_ITER_SEED))
    v = rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)

    quotient = 0.0
    for it in range(POWER_ITER_MAX):
        w = M.T @ (M @ v)
        new_quotient = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if abs(new_quotient - quotient) <= POWER_ITER_TOL * new_quotient:
            quotient = new_quotient
            logger.debug(f"Power iteration converged after {it + 1} iterations: {quotient:.9g}")
            break
        quotient = new_quotient
    else:
        logger.warning(f"Power iteration hit {POWER_ITER_MAX} iterations without converging")
    return quotient


# =============================================================================
# Least squares
# =============================================================================

@dataclass(frozen=True)
class LeastSquaresData:
    """f(x) = 0.5 ||Ax - b||^2."""
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = _frozen(self.A)
        b = _frozen(self.b)
        if A.ndim != 2 or A.size == 0:
            raise DataError(f"A must be a nonempty matrix, got shape {A.shape}")
        if b.shape != (A.shape[0],):
            raise DataError(f"b must have length {A.shape[0]}, got shape {b.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def zero_columns(self) -> np.ndarray:
        """Indices of all-zero columns of A."""
        return np.flatnonzero(~self.A.any(axis=0))


def least_squares_term(data: LeastSquaresData) -> SmoothTerm:
    """Smooth term 0.5 ||Ax - b||^2 with gradient A^T (Ax - b) and L_f = ||A||^2."""
    A, b = data.A, data.b

    def value(x):
        r = A @ x - b
        return 0.5 * float(r @ r)

    def gradient(x):
        return A.T @ (A @ x - b)

    return SmoothTerm(value=value, gradient=gradient,
                      lipschitz_bound=spectral_norm_sq(A), name="least-squares")


# =============================================================================
# Logistic loss
# =============================================================================

@dataclass(frozen=True)
class LogisticData:
    """f(x) = sum_i log(1 + exp(-b_i (Cx)_i)) with the i-th row of C equal to (a_i^T, 1)."""
    C: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        C = _frozen(self.C)
        b = _frozen(self.b)
        if C.ndim != 2 or C.size == 0:
            raise DataError(f"C must be a nonempty matrix, got shape {C.shape}")
        if b.shape != (C.shape[0],):
            raise DataError(f"b must have length {C.shape[0]}, got shape {b.shape}")
        if not np.all(np.isin(b, (-1.0, 1.0))):
            bad = b[~np.isin(b, (-1.0, 1.0))]
            raise DataError(f"Labels must be -1 or +1, found {bad[:5].tolist()}")
        if C.shape[0] > 1 and np.all(b == b[0]):
            raise DataError("Labels are all identical")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_features(cls, A: np.ndarray, b: np.ndarray) -> "LogisticData":
        """Append the intercept column so x = (x_tilde, x0)."""
        A = np.asarray(A, dtype=float)
        return cls(C=np.hstack([A, np.ones((A.shape[0], 1))]), b=b)


def logistic_term(data: LogisticData) -> SmoothTerm:
    """Logistic loss over the augmented variable with L_f = 0.25 ||C||^2."""
    C, b = data.C, data.b

    def value(x):
        z = -b * (C @ x)
        # logaddexp(0, z) evaluates z + log(1 + exp(-z)) for z > 0
        return float(np.logaddexp(0.0, z).sum())

    def gradient(x):
        z = -b * (C @ x)
        return -(C.T @ (b * expit(z)))

    return SmoothTerm(value=value, gradient=gradient,
                      lipschitz_bound=0.25 * spectral_norm_sq(C), name="logistic")
