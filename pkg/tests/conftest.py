"""
Pytest configuration for PGels tests.
"""

import numpy as np
import pytest

from pgels.instances import InstanceSpec, build_problem, lasso_problem
from pgels.problem import CompositeProblem, ProxTerm, SmoothTerm
from pgels.prox import L1Term


def pytest_addoption(parser):
    """Add command-line options for test selection."""
    parser.addoption(
        "--full-scale",
        action="store_true",
        default=False,
        help="Run the (300, 3000, 60) benchmark trend tests (several minutes)",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full-scale"):
        return
    skip_slow = pytest.mark.skip(reason="needs --full-scale")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.hookimpl(optionalhook=True)
def pytest_html_report_title(report):
    """Title of the pytest-html report (pytest tests/ --html=report.html)."""
    report.title = "PGels Bench Test Report"


# =============================================================================
# SHARED FIXTURES
# =============================================================================

@pytest.fixture(scope="session")
def lasso():
    """Seeded (50, 200, 10) l1 least-squares problem."""
    problem, _ = lasso_problem(seed=3)
    return problem


@pytest.fixture(scope="session")
def small_logistic():
    problem, _ = build_problem(InstanceSpec(family="logistic-l1", lam=0.1, seed=0, shape=(30, 20, 4)))
    return problem


@pytest.fixture(scope="session")
def small_l12():
    problem, _ = build_problem(InstanceSpec(family="ls-l1l2", lam=0.1, seed=0, shape=(30, 60, 4)))
    return problem


@pytest.fixture
def quadratic():
    """Factory for f = 0.5 ||x - center||^2 (L_f = 1) plus P = 0 or lam ||x||_1."""
    def make(center, lam=None):
        center = np.asarray(center, dtype=float)
        smooth = SmoothTerm(
            value=lambda x: 0.5 * float((x - center) @ (x - center)),
            gradient=lambda x: x - center,
            lipschitz_bound=1.0,
            name="quadratic",
        )
        if lam is None:
            prox = ProxTerm(value=lambda x: 0.0, prox=lambda y, nu: np.array(y, dtype=float), name="zero")
        else:
            prox = L1Term(lam).as_prox_term()
        return CompositeProblem(smooth=smooth, prox=prox, dimension=center.size)
    return make
