"""
Benchmark runner tests
======================
Suite validation, deterministic CSV output, manifest and summary, and
failure capture.
"""

from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from pgels.benchmark import (
    CSV_HEADER,
    SuiteConfig,
    render_summary,
    run_benchmark,
    run_cell,
    write_outputs,
)

SUITES = Path(__file__).resolve().parents[1] / "suites"


@pytest.fixture
def tiny_suite():
    return SuiteConfig(name="tiny", family="logistic-l1", j_values=[1], lambdas=[1.0, 0.1],
                       algorithms=["pgels", "npg", "pg", "fista", "refista"], trials=2,
                       iters=60, shape=(30, 20, 4), grid_points=25)


class TestSuiteConfig:

    def test_needs_exactly_one_budget(self):
        with pytest.raises(ValidationError):
            SuiteConfig(family="ls-l1l2", lambdas=[0.1], algorithms=["npg"])
        with pytest.raises(ValidationError):
            SuiteConfig(family="ls-l1l2", lambdas=[0.1], algorithms=["npg"], t_max=1.0, iters=10)

    def test_unknown_algorithm(self):
        with pytest.raises(ValidationError):
            SuiteConfig(family="ls-l1l2", lambdas=[0.1], algorithms=["nmapg"], iters=10)

    def test_nonpositive_lambda(self):
        with pytest.raises(ValidationError):
            SuiteConfig(family="ls-l1l2", lambdas=[0.0], algorithms=["npg"], iters=10)

    def test_family_delta(self):
        suite = SuiteConfig(family="ls-l1l2", lambdas=[0.1], algorithms=["npg"], iters=10)
        assert suite.resolved_delta == 0.9
        assert suite.model_copy(update={"delta": 0.3}).resolved_delta == 0.3

    def test_budget_modes(self, tiny_suite):
        assert tiny_suite.deterministic
        budget = tiny_suite.budget()
        assert budget.max_prox_evals == 60 and budget.clock == "prox-evals"
        grid = tiny_suite.time_grid()
        assert grid.size == 25 and grid[-1] == 60.0

    def test_cells(self, tiny_suite):
        assert tiny_suite.cells() == [(1, 1.0), (1, 0.1)]

    def test_smoke_suite_file(self):
        suite = SuiteConfig.from_yaml(SUITES / "smoke.yaml")
        assert suite.family == "logistic-l1"
        assert suite.shape == (50, 200, 10)
        assert suite.trials == 2 and suite.deterministic

    def test_cli_override_switches_budget(self):
        suite = SuiteConfig.from_yaml(SUITES / "smoke.yaml", t_max=2.0, trials=None)
        assert suite.t_max == 2.0 and suite.iters is None
        assert suite.trials == 2

    @pytest.mark.parametrize("name", ["logistic_full.yaml", "l12_full.yaml"])
    def test_full_suites_load(self, name):
        suite = SuiteConfig.from_yaml(SUITES / name)
        assert suite.j_values == [3, 5, 10]
        assert suite.trials == 10


class TestRun:

    def test_deterministic_csv(self, tiny_suite, tmp_path):
        first = write_outputs(run_benchmark(tiny_suite, workers=1), tmp_path / "first")
        second = write_outputs(run_benchmark(tiny_suite, workers=2), tmp_path / "second")
        assert first["csv"].read_bytes() == second["csv"].read_bytes()

    def test_csv_layout(self, tiny_suite, tmp_path):
        paths = write_outputs(run_benchmark(tiny_suite), tmp_path)
        raw = paths["csv"].read_bytes()
        assert b"\r\n" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) - 1 == 2 * 5 * 25
        family, j, lam, algo, count, t, e_mean, e_stderr = lines[1].split(",")
        assert (family, j, lam, algo, count, t, e_mean) == ("logistic-l1", "1", "1", "pgels", "2", "0", "1")

    def test_manifest_and_summary(self, tiny_suite, tmp_path):
        result = run_benchmark(tiny_suite)
        paths = write_outputs(result, tmp_path)
        manifest = yaml.safe_load(paths["manifest"].read_text(encoding="utf-8"))
        assert manifest["clock"] == "prox-evals"
        assert manifest["cells"][0]["seeds"] == [0, 1]
        assert not manifest["cells"][0]["flagged"]
        assert manifest["cells"][0]["terminations"]["pg"] == ["max-prox-evals", "max-prox-evals"]
        summary = paths["summary"].read_text(encoding="utf-8")
        assert "BENCHMARK SUMMARY - tiny" in summary
        assert "refista" in summary
        assert summary == render_summary(result)

    def test_curves_start_at_one_and_decrease(self, tiny_suite):
        cell = run_cell(tiny_suite, 1, 1.0)
        for curve in cell.curves.values():
            assert curve.mean[0] == 1.0
            assert curve.mean[-1] < 1.0
            assert curve.trial_count == 2

    def test_failures_flag_the_cell(self, tiny_suite):
        suite = tiny_suite.model_copy(update={"algorithms": ["pgels", "pdcae"], "lambdas": [1.0]})
        result = run_benchmark(suite)
        cell = result.cells[0]
        assert cell.flagged and result.flagged
        assert len(cell.failures) == 2
        assert cell.curves["pdcae"].trial_count == 0
        assert cell.curves["pgels"].trial_count == 2
        assert cell.terminations["pdcae"] == ["failed", "failed"]
