"""Tests for the validation harness."""

import csv
import io
import json
import math

import numpy as np
import pytest

from numrad.bounds import BoundId
from numrad.config import PROPERTY_CHECKS, SuiteConfig
from numrad.harness import (
    CSV_HEADER,
    PROPERTY_RUNNERS,
    BoundSummary,
    SuiteReport,
    TrialOutcome,
    emit_report,
    load_report,
    regenerate_trial,
    run_bound_trial,
    run_suite,
    sample_lemma_exponents,
    sharpness_suite,
    write_report,
)
from numrad.matrix import operator_norm

# Young bound with r min(p, q) = 1 < 2; square-zero inputs violate it
NEGATIVE_CONTROL = {"single_young": {"p": 2, "r": 0.5, "alpha": 0.5}}


def small_config(**overrides):
    settings = dict(trials=4, property_trials=0, dim_min=1, dim_max=3, master_seed=11)
    settings.update(overrides)
    return SuiteConfig(**settings)


class TestRunSuite:
    def test_small_suite_passes(self):
        """Test a handful of bounds hold on every trial."""
        report = run_suite(small_config(bounds=["abs_sum_upper", "offdiag_gauge", "diag_power"]))
        assert report.ok
        assert [r.bound_id for r in report.results] == ["abs_sum_upper", "offdiag_gauge", "diag_power"]
        for summary in report.results:
            assert summary.trials == 4
            assert summary.passes + summary.skipped == 4

    def test_full_catalog_passes(self):
        """Test every catalog bound holds on a couple of sampled trials."""
        report = run_suite(small_config(trials=2))
        assert report.total_failures == 0, [r.to_dict() for r in report.results if r.failures]
        assert len(report.results) == 32

    def test_digest_is_reproducible(self):
        """Test two runs with the same seed produce the same digest."""
        config = small_config(bounds=["single_power", "offdiag_holder"])
        assert run_suite(config).digest() == run_suite(config).digest()

    def test_digest_independent_of_jobs(self):
        """Test the report does not depend on the worker count."""
        serial = run_suite(small_config(bounds=["sum_difference_power"], jobs=1))
        threaded = run_suite(small_config(bounds=["sum_difference_power"], jobs=3))
        assert serial.digest() == threaded.digest()

    def test_seed_changes_digest(self):
        """Test a different master seed changes the trials."""
        first = run_suite(small_config(bounds=["single_power"]))
        second = run_suite(small_config(bounds=["single_power"], master_seed=12))
        assert first.digest() != second.digest()

    def test_negative_control_fails(self):
        """Test the harness reports violations when a hypothesis is broken on purpose."""
        config = small_config(bounds=["single_young"], ensembles=["nilpotent"], dim_min=2,
                              params=NEGATIVE_CONTROL, gate_hypotheses=False)
        report = run_suite(config)
        summary = report.result("single_young")
        assert summary.failures == 4
        assert summary.worst_slack < 0
        assert not report.ok

    def test_negative_control_gated(self):
        """Test gating skips the same trials instead of failing them."""
        config = small_config(bounds=["single_young"], ensembles=["nilpotent"], dim_min=2,
                              params=NEGATIVE_CONTROL)
        summary = run_suite(config).result("single_young")
        assert summary.skipped == 4
        assert summary.failures == 0
        assert summary.worst_slack is None

    def test_respect_hypotheses_draws_psd_blocks(self):
        """Test the spectral identity bound gets PSD blocks when hypotheses are respected."""
        summary = run_suite(small_config(bounds=["psd_product_spectral"], ensembles=["ginibre"])).result(
            "psd_product_spectral")
        assert summary.skipped == 0
        assert summary.passes == 4

    def test_ignoring_hypotheses_skips_indefinite_blocks(self):
        """Test Ginibre blocks fail the PSD hypothesis and are skipped."""
        config = small_config(bounds=["psd_product_spectral"], ensembles=["ginibre"], respect_hypotheses=False)
        assert run_suite(config).result("psd_product_spectral").skipped == 4

    def test_property_checks(self):
        """Test every lemma, identity and oracle check passes."""
        report = run_suite(small_config(bounds=["norm_sandwich_upper"], trials=1, property_trials=3))
        names = [r.bound_id for r in report.results]
        assert names == ["norm_sandwich_upper", *PROPERTY_CHECKS]
        assert report.ok, [r.to_dict() for r in report.results if r.failures]

    def test_every_property_has_a_runner(self):
        """Test the property registry covers every configurable check."""
        assert set(PROPERTY_RUNNERS) == set(PROPERTY_CHECKS)

    def test_settings_recorded(self):
        """Test the report records the sampling settings."""
        report = run_suite(small_config(bounds=["single_power"]))
        assert report.settings["master_seed"] == 11
        assert report.settings["grid"] == 512


class TestLemmaChecks:
    def test_exponents_cover_full_domain(self):
        """Test lemma exponents reach both ends of p in (1, 8] and r in [1, 4]."""
        rng = np.random.default_rng(0)
        draws = [sample_lemma_exponents(rng) for _ in range(5000)]
        ps = np.array([holder.p for holder, _ in draws])
        rs = np.array([r for _, r in draws])
        assert ps.min() > 1.0 and ps.max() <= 8.0
        assert ps.min() < 1.05 and ps.max() > 7.9
        assert rs.min() >= 1.0 and rs.max() <= 4.0
        assert rs.min() < 1.01 and rs.max() > 3.99
        for holder, _ in draws[:50]:
            assert 1.0 / holder.p + 1.0 / holder.q == pytest.approx(1.0)

    def test_scalar_lemmas_pass_on_full_domain(self):
        """Test Young and Hölder hold without overflow across the whole exponent range."""
        config = small_config(bounds=["norm_sandwich_upper"], trials=1, property_trials=3000,
                              properties=["lemma:young", "lemma:holder"])
        report = run_suite(config)
        for name in ("lemma:young", "lemma:holder"):
            summary = report.result(name)
            assert summary.trials == 3000
            assert summary.failures == 0, summary.to_dict()

    def test_default_trial_counts(self):
        """Test each property check runs its own default count when none is configured."""
        config = SuiteConfig(property_trials=None)
        assert config.trials_for("lemma:young") == 10000
        assert config.trials_for("lemma:holder") == 10000
        assert config.trials_for("oracle:rayleigh") == 500
        assert small_config(property_trials=7).trials_for("lemma:young") == 7


class TestTrials:
    def test_regenerate_is_deterministic(self):
        """Test a trial can be rebuilt exactly from its index."""
        config = small_config()
        first = regenerate_trial(config, "full_gauge", 3)
        second = regenerate_trial(config, "full_gauge", 3)
        assert first.seed == second.seed and first.dim == second.dim
        np.testing.assert_array_equal(first.blocks.embed(), second.blocks.embed())
        assert first.params == second.params

    def test_single_shape_fills_one_block(self):
        """Test single-operator trials leave the other blocks zero."""
        instance = regenerate_trial(small_config(), BoundId.SINGLE_POWER, 0)
        assert operator_norm(instance.blocks.b) == 0.0
        assert operator_norm(instance.blocks.d) == 0.0

    def test_gauge_bounds_use_gauge_rescale(self):
        """Test gauge-taking bounds draw operands at the gauge scale."""
        instance = regenerate_trial(small_config(ensembles=["ginibre"], gauge_rescale=0.5), "offdiag_gauge", 1)
        assert operator_norm(instance.blocks.b) == pytest.approx(0.5)

    def test_config_params_override_samples(self):
        """Test configured parameters win over sampled ones."""
        instance = regenerate_trial(small_config(params={"single_abs_power": {"r": 3}}), "single_abs_power", 2)
        assert instance.params.r == 3.0

    def test_default_params_without_sampling(self):
        """Test sample_params=False keeps the catalog defaults."""
        instance = regenerate_trial(small_config(sample_params=False), "offdiag_power", 0)
        assert instance.params.r == 1.0 and instance.params.alpha == 0.5

    def test_violation_is_logged(self, caplog):
        """Test a failing trial logs a warning with its seed."""
        config = small_config(bounds=["single_young"], ensembles=["nilpotent"], dim_min=2,
                              params=NEGATIVE_CONTROL, gate_hypotheses=False)
        with caplog.at_level("WARNING", logger="numrad"):
            outcome = run_bound_trial(config, "single_young", 0)
        assert outcome.status == "fail"
        assert f"seed {outcome.seed}" in caplog.text


class TestBoundSummary:
    def test_worst_by_score(self):
        """Test the worst outcome is the lowest score, ties broken by index."""
        outcomes = [
            TrialOutcome(2, 30, "pass", 0.1, 0.1),
            TrialOutcome(0, 10, "pass", 0.5, 0.5),
            TrialOutcome(1, 20, "fail", -0.2, -0.2),
            TrialOutcome(3, 40, "skip"),
        ]
        summary = BoundSummary.from_outcomes("x", outcomes)
        assert (summary.trials, summary.passes, summary.failures, summary.skipped) == (4, 2, 1, 1)
        assert summary.worst_slack == -0.2
        assert summary.worst_seed == 20


class TestSharpness:
    def test_equality_cases(self):
        """Test every equality construction is met within tolerance."""
        report = sharpness_suite(master_seed=5, trials=3)
        assert [r.bound_id for r in report.results] == [
            "sharp:offdiag_gauge",
            "sharp:offdiag_holder",
            "sharp:normal_norm",
            "sharp:square_zero_half_norm",
            "sharp:square_zero_abs_square",
        ]
        assert report.ok, [r.to_dict() for r in report.results if r.failures]


class TestReports:
    @pytest.fixture
    def report(self):
        return SuiteReport(
            results=[
                BoundSummary("abs_sum_upper", 3, 3, 0, 0, 0.25, 99, 1),
                BoundSummary("single_young", 2, 0, 0, 2),
            ],
            settings={"master_seed": 1},
            wall_time=1.5,
        )

    def test_json_schema(self, report):
        """Test the JSON report holds results, settings, summary and timing."""
        data = json.loads(emit_report(report, "json"))
        assert set(data) == {"results", "settings", "summary", "timing"}
        assert data["results"][0]["worst_seed"] == 99
        assert data["results"][1]["worst_slack"] is None
        assert data["summary"] == {"total_trials": 5, "total_failures": 0, "ok": True}

    def test_empty_report(self):
        """Test an empty report still has a results array."""
        assert json.loads(emit_report(SuiteReport(), "json"))["results"] == []

    def test_digest_ignores_timing(self, report):
        """Test wall time does not affect the digest."""
        other = SuiteReport(results=report.results, settings=report.settings, wall_time=99.0)
        assert report.digest() == other.digest()

    def test_non_finite_becomes_null(self):
        """Test non-finite slack serializes as null."""
        report = SuiteReport(results=[BoundSummary("x", 1, 0, 1, 0, math.nan, 1, 0)])
        assert json.loads(emit_report(report, "json"))["results"][0]["worst_slack"] is None

    def test_csv(self, report):
        """Test the CSV has the fixed header and one row per check."""
        rows = list(csv.reader(io.StringIO(emit_report(report, "csv").decode())))
        assert rows[0] == CSV_HEADER
        assert rows[1] == ["abs_sum_upper", "3", "3", "0.25", "99"]
        assert rows[2] == ["single_young", "2", "0", "", ""]

    def test_text(self, report):
        """Test the text report renders the table and the status line."""
        text = emit_report(report, "text").decode()
        assert "Validation suite" in text
        assert "abs_sum_upper" in text
        assert "OK" in text

    def test_unknown_format(self, report):
        """Test an unknown format lists the valid ones."""
        with pytest.raises(ValueError, match="Must be one of"):
            emit_report(report, "xml")

    def test_round_trip(self, report, tmp_path):
        """Test a written JSON report loads back with the same digest."""
        path = write_report(report, tmp_path / "report.json")
        assert load_report(path).digest() == report.digest()
        assert load_report(path.read_bytes()).wall_time == 1.5

    def test_write_picks_format_from_suffix(self, report, tmp_path):
        """Test a .csv path gets CSV output."""
        path = write_report(report, tmp_path / "report.csv")
        assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
