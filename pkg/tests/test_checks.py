"""
Invariant check suite tests: report bookkeeping and the quick categories.
"""

import json
from types import SimpleNamespace

import pytest

from pgels.checks import (
    CATEGORIES,
    SOUNDNESS_CHECKS,
    BenchChecker,
    CheckCategory,
    CheckResult,
    tiny_l12,
    tiny_logistic,
)


class TestReportContainers:

    def test_category_status(self):
        category = CheckCategory("demo", [CheckResult("a", "PASS", ""), CheckResult("b", "SKIP", "")])
        assert category.status == "PASS"
        assert (category.passed, category.skipped, category.total) == (1, 1, 2)
        category.checks.append(CheckResult("c", "FAIL", ""))
        assert category.status == "FAIL"


class TestChecker:

    @pytest.mark.parametrize("category", ["gradients", "prox", "linesearch", "reductions", "theory"])
    def test_quick_category_passes(self, category):
        report = BenchChecker(quick=True).run_category(category)
        assert report.overall_status == "PASS", [
            (c.name, c.message) for cat in report.categories.values() for c in cat.checks if c.status != "PASS"
        ]

    @pytest.mark.slow
    @pytest.mark.parametrize("category, expected", [("prox", 12), ("linesearch", 50)])
    def test_full_category_passes(self, category, expected):
        report = BenchChecker(quick=False).run_category(category)
        assert report.categories[category].total == expected
        assert report.overall_status == "PASS", [
            (c.name, c.message) for cat in report.categories.values() for c in cat.checks if c.status != "PASS"
        ]

    def test_soundness_checks_cover_recomputed_values(self):
        assert {"potential-consistency", "window-max-consistency"} <= set(SOUNDNESS_CHECKS)

    def test_exceptions_become_failures(self):
        checker = BenchChecker(quick=True)
        category = CheckCategory("demo")

        def broken():
            raise RuntimeError("boom")

        checker._run(category, "broken", broken)
        assert category.checks[0].status == "FAIL"
        assert "RuntimeError" in category.checks[0].message

    def test_unknown_category(self):
        with pytest.raises(ValueError):
            BenchChecker().run_category("speed")

    def test_export_json(self, tmp_path):
        checker = BenchChecker(quick=True)
        checker.run_category("gradients")
        path = tmp_path / "report.json"
        checker.export_json(str(path))
        data = json.loads(path.read_text())
        assert data["summary"]["failed"] == 0
        assert "gradients" in data["categories"]

    def test_categories_listed(self):
        assert set(CATEGORIES) == {"gradients", "prox", "linesearch", "reductions", "theory", "rates"}


class TestTinyProblems:

    def test_shapes(self):
        assert tiny_logistic().dimension == 21
        assert tiny_l12().dimension == 60


class TestHtmlReport:

    def test_report_title(self):
        import conftest

        report = SimpleNamespace(title="")
        conftest.pytest_html_report_title(report)
        assert report.title == "PGels Bench Test Report"
