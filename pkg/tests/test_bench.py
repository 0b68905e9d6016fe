import json
import math
import os

import numpy as np
import pytest
from pydantic import ValidationError

from optilik.bench import (
    BetaBinomialConfig,
    ClassificationConfig,
    ConsistencyConfig,
    CurveConfig,
    ExperimentReport,
    MethodConfig,
    best_by_sample_size,
    beta_pdf,
    binomial_pmf,
    likelihood_curve,
    load_config,
    load_labeled_csv,
    load_samples_csv,
    make_two_moons,
    nominal_measure,
    run_beta_binomial,
    run_classification,
    run_consistency,
    run_curve,
    write_report,
    x_grid,
)
from optilik.bench.beta_binomial import discretized_posterior, discretized_prior, parameter_grid
from optilik.exceptions import ConfigurationError, DatasetError, InvalidInputError
from optilik.inference import AmbiguitySpec
from optilik.kernel_baseline import KernelSpec
from optilik.measures import GroundMetric


class TestDistributions:
    def test_beta_pdf(self):
        assert beta_pdf(0.5, 1, 1) == pytest.approx(1.0, abs=1e-12)
        assert beta_pdf(0.5, 2, 2) == pytest.approx(1.5, abs=1e-12)
        assert beta_pdf(0.25, 2, 1) == pytest.approx(0.5, abs=1e-12)
        with pytest.raises(InvalidInputError):
            beta_pdf(1.0, 2, 2)

    def test_binomial_pmf(self):
        assert binomial_pmf(1, 2, 0.5) == pytest.approx(0.5, abs=1e-15)
        assert binomial_pmf(0, 7, 0.0) == 1.0
        assert binomial_pmf(7, 7, 1.0) == 1.0
        assert binomial_pmf(3, 7, 0.0) == 0.0
        direct = math.comb(20, 12) * 0.6**12 * 0.4**8
        assert binomial_pmf(12, 20, 0.6) == pytest.approx(direct, abs=1e-12)
        with pytest.raises(InvalidInputError):
            binomial_pmf(3, 2, 0.5)

    def test_discretized_distributions_are_normalized(self):
        config = BetaBinomialConfig(alpha=2.0, beta=3.0)
        grid = parameter_grid(config.grid_size)
        assert grid[0] == pytest.approx(1 / 21)
        assert grid[-1] == pytest.approx(20 / 21)
        assert discretized_prior(grid, config).sum() == pytest.approx(1.0)
        posterior = discretized_posterior(grid, 12, config)
        assert posterior.sum() == pytest.approx(1.0)
        assert grid[np.argmax(posterior)] == pytest.approx(0.6, abs=0.05)


def small_beta_binomial(**overrides):
    values = dict(
        grid_size=4, trials=5, sample_sizes=[1, 3], radii=[0.1, 1.0], repetitions=2, seed=3
    )
    values.update(overrides)
    return BetaBinomialConfig(**values)


class TestBetaBinomial:
    def test_rows_and_columns(self, single_thread):
        report = run_beta_binomial(small_beta_binomial())
        assert report.columns == ("method", "eps_or_h", "n_i", "mean_kl")
        assert len(report.rows) == 3 * 2 * 2
        assert all(row["mean_kl"] >= 0 for row in report.rows)
        assert {row["method"] for row in report.rows} == {"kl", "wasserstein", "kernel-exp"}

    def test_single_method(self, single_thread):
        report = run_beta_binomial(small_beta_binomial(), method="wasserstein")
        assert {row["method"] for row in report.rows} == {"wasserstein"}

    def test_separate_kernel_widths(self, single_thread):
        config = small_beta_binomial(methods=["kernel-exp"], widths=[0.5, 1.0, 2.0])
        report = run_beta_binomial(config)
        assert sorted({row["eps_or_h"] for row in report.rows}) == [0.5, 1.0, 2.0]

    def test_deterministic(self):
        a = run_beta_binomial(small_beta_binomial(repetitions=1))
        b = run_beta_binomial(small_beta_binomial(repetitions=1))
        assert a.rows == b.rows

    def test_best_by_sample_size(self):
        report = ExperimentReport("beta-binomial", ("method", "eps_or_h", "n_i", "mean_kl"), {}, 0)
        report.add(method="kl", eps_or_h=0.1, n_i=1, mean_kl=0.5)
        report.add(method="kl", eps_or_h=0.2, n_i=1, mean_kl=0.3)
        report.add(method="kl", eps_or_h=0.5, n_i=1, mean_kl=0.3)
        assert best_by_sample_size(report) == {"kl": {1: (0.2, 0.3)}}

    def test_default_radii_span_several_decades(self):
        radii = BetaBinomialConfig().radii
        assert radii == sorted(radii)
        assert radii[0] <= 1e-5
        assert radii[-1] >= 1.0

    @pytest.mark.slow
    def test_tuned_radius_and_error_shrink_with_sample_size(self):
        config = BetaBinomialConfig()
        best = best_by_sample_size(run_beta_binomial(config))
        for method in ("kl", "wasserstein"):
            assert best[method][10][0] <= best[method][1][0]
            # the single-sample optimum is not pinned to the bottom of the grid
            assert best[method][1][0] > config.radii[0]
        for method in ("kl", "wasserstein", "kernel-exp"):
            assert best[method][10][1] < best[method][1][1]


class TestCurves:
    def test_grid(self):
        xs = x_grid(-3.0, 3.0, 0.01)
        assert xs.size == 601
        assert xs[0] == -3.0
        assert xs[-1] == pytest.approx(3.0, abs=1e-12)

    def test_default_curves(self):
        report = run_curve(CurveConfig())
        assert len(report.rows) == 4 * 601
        wasserstein = report.where(method="wasserstein")
        xs = np.array([row["x"] for row in wasserstein])
        values = np.array([row["value"] for row in wasserstein])
        assert values[np.argmin(np.abs(xs))] == pytest.approx(0.2, abs=1e-12)
        assert np.all(values > 0)
        right = xs > 1.0 + 1e-9
        assert np.all(np.diff(values[right]) < 0)
        exponential = np.array([row["value"] for row in report.where(method="kernel-exp")])
        assert np.all(np.diff(exponential[right]) < 0)
        for method in ("kernel-uni", "kernel-epa"):
            for row in report.where(method=method):
                if abs(row["x"]) > 2.0 + 1e-9:
                    assert row["value"] == 0.0

    def test_moment_curves_depend_on_moments_only(self, two_atoms, spread_atoms):
        xs = x_grid(-3.0, 3.0, 0.25)
        moment = [MethodConfig(method="moment")]
        a = likelihood_curve(two_atoms, moment, xs).column("value")
        b = likelihood_curve(spread_atoms, moment, xs).column("value")
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_wasserstein_has_fatter_tail_for_wider_support(self, two_atoms, spread_atoms):
        method = [MethodConfig(method="wasserstein", radius=0.2, metric=GroundMetric.L1)]
        a = likelihood_curve(two_atoms, method, [3.0]).column("value")[0]
        b = likelihood_curve(spread_atoms, method, [3.0]).column("value")[0]
        assert a == pytest.approx(0.1)
        assert b == pytest.approx(0.14)

    def test_nominal_measure_merges_repeated_points(self):
        center = nominal_measure([0.0, 1.0, 0.0])
        np.testing.assert_allclose(center.weights, [2 / 3, 1 / 3])

    def test_curves_need_one_dimension(self):
        center = nominal_measure([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(InvalidInputError, match="1-D"):
            likelihood_curve(center, [MethodConfig(method="moment")], [0.0])


class TestConfigs:
    def test_method_config_specs(self):
        assert isinstance(MethodConfig(method="kernel-uni", width=1.0).to_spec(), KernelSpec)
        spec = MethodConfig(method="wasserstein", radius=0.3).to_spec(hyperparameter=0.7)
        assert isinstance(spec, AmbiguitySpec) and spec.radius == 0.7
        with pytest.raises(ConfigurationError, match="radius is required"):
            MethodConfig(method="kl").to_spec()
        with pytest.raises(ConfigurationError, match="width is required"):
            MethodConfig(method="kernel-exp").to_spec()

    def test_per_class_radii(self):
        method = MethodConfig(method="wasserstein", class_radii=[0.1, 0.3])
        assert isinstance(method.to_spec(), AmbiguitySpec)
        for bad in (
            {"method": "kernel-exp", "width": 1.0, "class_radii": [0.1, 0.2]},
            {"method": "moment", "class_radii": [0.1, 0.2]},
            {"method": "kl", "class_radii": [0.1, -0.2]},
        ):
            with pytest.raises(ValidationError):
                MethodConfig(**bad)

    def test_per_class_radii_reach_the_classifier(self, single_thread):
        config = ClassificationConfig(
            synthetic={"kind": "blobs", "n_samples": 40, "noise": 1.0, "seed": 1},
            methods=[MethodConfig(method="wasserstein", class_radii=[0.1, 0.3])],
            trials=2,
        )
        (row,) = run_classification(config).rows
        assert row["mean_hyperparameter"] == pytest.approx(0.2)
        assert 0.0 <= row["mean_auprc"] <= 100.0

    def test_load_defaults(self):
        config = load_config(BetaBinomialConfig, None)
        assert config.sample_sizes == [1, 2, 4, 8, 10]
        assert config.grid_size == 20

    def test_invalid_field_is_named(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"methods": [{"method": "wasserstein", "width": 1.0}]}))
        with pytest.raises(ConfigurationError, match="methods.0"):
            load_config(CurveConfig, path)

    def test_unknown_field_is_rejected(self, tmp_path):
        path = tmp_path / "typo.json"
        path.write_text(json.dumps({"repetition": 3}))
        with pytest.raises(ConfigurationError, match="repetition"):
            load_config(BetaBinomialConfig, path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        with pytest.raises(ConfigurationError, match="invalid JSON"):
            load_config(CurveConfig, path)

    def test_classification_needs_one_source(self):
        with pytest.raises(ConfigurationError, match="exactly one"):
            load_config(ClassificationConfig, None)

    def test_consistency_shapes(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"class_pmfs": [[0.5, 0.5], [0.2, 0.8]]}))
        with pytest.raises(ConfigurationError, match="one entry per outcome"):
            load_config(ConsistencyConfig, path)


class TestDatasets:
    def test_labeled_csv(self, toy_csv):
        data = load_labeled_csv(toy_csv)
        assert data.class_names == ("a", "b")
        assert len(data) == 8
        np.testing.assert_array_equal(data.class_counts(), [4, 4])

    def test_bad_cell_is_located(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,label\n1,2,a\n3,oops,b\n")
        with pytest.raises(DatasetError, match="row 3, column 2"):
            load_labeled_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError, match="not found"):
            load_labeled_csv(tmp_path / "nope.csv")

    def test_single_class(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("x,label\n1,a\n2,a\n")
        with pytest.raises(DatasetError, match="two classes"):
            load_labeled_csv(path)

    def test_samples_with_and_without_header(self, tmp_path):
        plain = tmp_path / "plain.csv"
        plain.write_text("-1\n1\n")
        headed = tmp_path / "headed.csv"
        headed.write_text("x\n-1\n1\n")
        np.testing.assert_array_equal(load_samples_csv(plain), [[-1.0], [1.0]])
        np.testing.assert_array_equal(load_samples_csv(headed), [[-1.0], [1.0]])

    def test_two_moons(self):
        data = make_two_moons(n=50, seed=1)
        assert len(data) == 50
        assert data.dimension == 2
        assert data.n_classes == 2


class TestReports:
    def make_report(self):
        report = ExperimentReport("curve", ("method", "x", "value"), {"x_step": 0.5}, 7)
        report.add(method="moment", x=0.0, value=1.0)
        report.add(method="moment", x=0.5, value=1 / 1.25)
        report.add(method="kernel-uni", x=9.0, value=float("nan"))
        return report

    def test_missing_column(self):
        with pytest.raises(KeyError):
            self.make_report().add(method="moment", x=1.0)

    def test_csv(self, tmp_path):
        (path,) = write_report(self.make_report(), tmp_path / "out.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "method,x,value"
        assert lines[2] == "moment,0.5,0.8"
        assert len(lines) == 4

    def test_json(self, tmp_path):
        (path,) = write_report(self.make_report(), tmp_path / "out.json")
        records = json.loads(path.read_text())
        assert records[0] == {
            "method": "moment",
            "x": 0.0,
            "value": 1.0,
            "seed": 7,
            "config": {"x_step": 0.5},
        }
        assert records[2]["value"] is None

    def test_both(self, tmp_path):
        paths = write_report(self.make_report(), tmp_path / "nested" / "out")
        assert sorted(p.suffix for p in paths) == [".csv", ".json"]
        assert all(p.exists() for p in paths)


@pytest.mark.slow
def test_two_moons_classification():
    config = ClassificationConfig(
        synthetic={"kind": "moons", "n_samples": 200, "noise": 0.1, "seed": 0},
        methods=[MethodConfig(method="wasserstein", radius=0.1)],
        trials=2,
    )
    report = run_classification(config)
    (row,) = report.rows
    assert row["mean_auprc"] >= 95.0
    assert row["mean_hyperparameter"] > 0


@pytest.mark.slow
def test_separable_blobs_all_methods():
    config = ClassificationConfig(
        synthetic={"kind": "blobs", "n_samples": 200, "noise": 1.0, "seed": 0},
        trials=2,
    )
    report = run_classification(config)
    assert [row["method"] for row in report.rows] == ["wasserstein", "moment", "kernel-exp"]
    for row in report.rows:
        assert row["mean_auprc"] >= 95.0


@pytest.mark.slow
def test_moment_classification_runs_untuned():
    config = ClassificationConfig(
        synthetic={"kind": "blobs", "n_samples": 60, "noise": 1.0},
        methods=[MethodConfig(method="moment")],
        trials=2,
    )
    (row,) = run_classification(config).rows
    assert math.isnan(row["mean_hyperparameter"])
    assert row["mean_auprc"] > 90.0


@pytest.mark.slow
def test_consistency_gap_shrinks():
    config = ConsistencyConfig()
    assert config.seeds == 50
    report = run_consistency(config)
    assert report.column("n") == [10, 100, 1000]
    gaps = report.column("mean_abs_gap")
    radii = report.column("radius")
    assert radii == sorted(radii, reverse=True)
    assert gaps[0] > gaps[1] > gaps[2]


@pytest.mark.slow
@pytest.mark.skipif(
    "OPTILIK_BANKNOTE_CSV" not in os.environ, reason="set OPTILIK_BANKNOTE_CSV to the data file"
)
def test_banknote_wasserstein():
    config = ClassificationConfig(
        dataset=os.environ["OPTILIK_BANKNOTE_CSV"],
        methods=[MethodConfig(method="wasserstein", radius=0.1)],
        trials=3,
    )
    (row,) = run_classification(config).rows
    assert row["mean_auprc"] >= 99.0
