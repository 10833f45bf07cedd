"""Statistics and table arithmetic against independent oracles."""

import random

import numpy as np
import pytest

from sefeval.analytics import (
    AblationReport,
    AccuracyTable,
    CorrelationReport,
    ablation_table,
    accuracy_table,
    correlate,
    correlate_records,
    emit_report,
    p_value,
    pearson,
    render_ablation,
    render_accuracy,
    render_correlations,
)
from sefeval.errors import AnalyticsError
from sefeval.harness.runner import RunArtifact
from sefeval.prompts import Task

from oracles import ref_t_two_sided_p
from synthetic import artifact_with_accuracy, correlated_pool, make_config, make_record

# Published reference grid: per-task accuracy of each strategy, averaged
# over the four evaluated models.
MAIN_GRID = {
    "direct": (94.3, 93.9, 49.5, 86.1, 80.9),
    "cot": (92.7, 91.5, 49.7, 80.5, 78.6),
    "tot": (93.6, 89.8, 45.0, 82.4, 77.7),
    "cove": (88.9, 90.2, 54.5, 83.9, 79.4),
    "vrag": (95.3, 86.6, 45.0, 81.0, 76.9),
    "selfrag": (76.5, 88.0, 48.1, 76.9, 72.4),
    "sef": (95.5, 96.1, 54.5, 89.5, 83.9),
}

ABLATION_GRID = {
    "sef": (95.5, 96.1, 54.5, 89.5, 83.9, None),
    "sef_wo_afl": (94.5, 92.3, 41.3, 86.9, 78.8, -5.1),
    "sef_wo_ac": (90.5, 91.0, 47.8, 85.0, 78.6, -5.3),
    "sef_wo_ci": (70.9, 68.9, 49.3, 56.7, 61.4, -22.5),
    "sef_wo_dtc": (94.0, 91.4, 48.3, 84.8, 79.6, -4.3),
    "sef_wo_cea": (90.5, 90.5, 54.7, 84.5, 80.0, -3.9),
    "sef_wo_fs": (90.8, 91.6, 50.4, 84.8, 79.4, -4.5),
    "sef_wo_presentation": (35.1, 67.5, 53.8, 47.8, 51.0, -32.9),
    "sef_wo_domain": (92.3, 90.5, 50.9, 84.5, 79.6, -4.3),
}

REFERENCE_CORRELATIONS = {  # metric -> published pooled r at n = 90,608
    "afl": 0.36, "ac": 0.42, "ci": 0.31, "dtc": 0.20, "cea": 0.23, "fs": 0.36,
}

TASKS = (Task.FPB, Task.CONSUMER_QA, Task.HEARSAY, Task.PUBMED_QA)


def grid_artifacts(grid):
    artifacts = []
    for method, values in grid.items():
        for task, acc in zip(TASKS, values[:4]):
            artifacts.append(artifact_with_accuracy(method, task, acc))
    return artifacts


# --- pearson ---------------------------------------------------------------


def test_pearson_trivial_cases():
    assert pearson([0.2, 0.5, 1.0, 0.8], [0.2, 0.5, 1.0, 0.8]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert pearson([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-15)


def test_pearson_errors():
    with pytest.raises(AnalyticsError):
        pearson([1.0, 1.0, 1.0], [0, 1, 2])
    with pytest.raises(AnalyticsError):
        pearson([1, 2], [1, 2])
    with pytest.raises(AnalyticsError):
        pearson([1, 2, 3], [1, 2])


def test_pearson_against_numpy_on_100_seeded_vectors():
    rng = random.Random(99)
    for _ in range(100):
        n = rng.randint(3, 400)
        x = [rng.uniform(-50, 50) for _ in range(n)]
        y = [rng.uniform(-50, 50) + 0.3 * xi for xi in x]
        expected = float(np.corrcoef(x, y)[0, 1])
        assert pearson(x, y) == pytest.approx(expected, abs=1e-10)


def test_pearson_scale_invariance_and_symmetry():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(3, 100)
        x = [rng.uniform(-10, 10) for _ in range(n)]
        y = [rng.uniform(-10, 10) + 0.5 * xi for xi in x]
        r = pearson(x, y)
        assert pearson([3.7 * v + 2 for v in x], y) == pytest.approx(r, abs=1e-12)
        assert pearson([-2.0 * v + 1 for v in x], y) == pytest.approx(-r, abs=1e-12)
        assert pearson(y, x) == pytest.approx(r, abs=1e-12)


# --- p_value ---------------------------------------------------------------


def test_p_value_null_is_one():
    assert p_value(0.0, 100) == pytest.approx(1.0)


def test_p_value_reference_pairs_are_significant():
    for r in REFERENCE_CORRELATIONS.values():
        assert p_value(r, 90_608) < 0.001


def test_p_value_small_sample_oracle():
    # two-sided p for r=0.9, n=5 via independent quadrature
    import math
    t_stat = 0.9 * math.sqrt(3 / (1 - 0.81))
    expected = ref_t_two_sided_p(t_stat, 3)
    assert p_value(0.9, 5) == pytest.approx(expected, rel=1e-6)
    assert p_value(0.9, 5) == pytest.approx(0.037, abs=0.002)


def test_p_value_against_quadrature_oracle_grid():
    import math
    for r in (0.05, 0.2, 0.5, 0.8, 0.95):
        for n in (5, 30, 200):
            t_stat = r * math.sqrt((n - 2) / (1 - r * r))
            expected = ref_t_two_sided_p(t_stat, n - 2)
            assert p_value(r, n) == pytest.approx(expected, rel=1e-8)


def test_p_value_monotonicity():
    assert p_value(0.5, 30) < p_value(0.3, 30)
    assert p_value(0.3, 300) < p_value(0.3, 30)
    with pytest.raises(AnalyticsError):
        p_value(1.0, 30)
    with pytest.raises(AnalyticsError):
        p_value(0.5, 2)


# --- correlate -------------------------------------------------------------


HI_VECTOR = None  # set lazily to avoid importing MetricVector at module load


def _hi_lo_vectors():
    from sefeval.metrics import MetricVector

    hi = MetricVector(afl=1.0, ac=1.0, ci=1.0, dtc=1.0, cea=1.0, fs=1.0)
    lo = MetricVector(afl=0.0, ac=0.0, ci=0.0, dtc=0.2, cea=0.0, fs=0.2)
    return hi, lo


def test_correlate_perfectly_aligned_metrics():
    hi, lo = _hi_lo_vectors()
    records = [
        make_record(f"r{i}", Task.FPB, "direct", correct=i % 2 == 0,
                    metrics=hi if i % 2 == 0 else lo)
        for i in range(100)
    ]
    report = correlate_records(records)
    for name in ("afl", "ac", "ci", "dtc", "cea", "fs"):
        r, p, n = report.per_metric[name]
        assert r == pytest.approx(1.0)
        assert p == 0.0
        assert n == 100


def test_correlate_excludes_unparsed_and_failed():
    hi, lo = _hi_lo_vectors()
    records = [make_record(f"r{i}", Task.FPB, "direct", correct=i % 2 == 0,
                           metrics=hi if i % 2 == 0 else lo)
               for i in range(10)]
    records[2].status = "unparsed"
    records[3].status = "failed"
    report = correlate_records(records)
    assert report.excluded_unparsed == 1
    assert report.excluded_failed == 1
    assert report.per_metric["afl"][2] == 8


def test_correlate_constant_metric_is_an_error():
    from sefeval.metrics import MetricVector

    constant = MetricVector(afl=0.0, ac=0.0, ci=0.0, dtc=0.5, cea=0.0, fs=0.2)
    records = [make_record(f"r{i}", Task.FPB, "direct", correct=i % 2 == 0, metrics=constant)
               for i in range(10)]
    with pytest.raises(AnalyticsError):
        correlate_records(records)


def test_correlate_independent_metric_near_zero():
    rng = random.Random(123)
    from sefeval.metrics import ALLOWED_VALUES, MetricVector

    records = []
    for i in range(10_000):
        correct = rng.random() < 0.5
        metrics = MetricVector(**{name: rng.choice(ALLOWED_VALUES[name])
                                  for name in ALLOWED_VALUES})
        records.append(make_record(f"r{i}", Task.FPB, "direct", correct=correct, metrics=metrics))
    report = correlate_records(records)
    for name in ALLOWED_VALUES:
        r, _, _ = report.per_metric[name]
        assert abs(r) < 0.05


def test_correlate_empty_pool_errors():
    with pytest.raises(AnalyticsError):
        correlate([])


def test_correlate_constructed_pool_all_positive_significant():
    records = correlated_pool(n=10_000)
    report = correlate_records(records)
    for name, (r, p, n) in report.per_metric.items():
        assert r > 0, f"{name} should correlate positively"
        assert p < 0.001, f"{name} should be significant"
        assert n == 10_000
    assert report.footnote


def test_correlate_include_sef_flag():
    pool = correlated_pool(n=200)
    sef_config = make_config("sef", "hearsay")
    direct_config = make_config("direct", "hearsay")
    artifacts = [
        RunArtifact(run_id="a", config=direct_config, records=pool[:100]),
        RunArtifact(run_id="b", config=sef_config,
                    records=[make_record(f"s{i}", Task.HEARSAY, "sef", correct=True)
                             for i in range(100)]),
    ]
    full = correlate(artifacts)
    without = correlate(artifacts, include_sef=False)
    assert full.per_metric["afl"][2] == 200
    assert without.per_metric["afl"][2] == 100


# --- accuracy / ablation tables --------------------------------------------


def test_accuracy_cells_and_average():
    artifacts = [artifact_with_accuracy("direct", Task.FPB, 50.0, total=100)]
    table = accuracy_table(artifacts)
    assert table.rows["direct"]["fpb"] == pytest.approx(50.0)
    assert table.rows["direct"]["avg"] == pytest.approx(50.0)
    assert ("direct", "consumerqa") in table.missing


def test_accuracy_multi_model_cell_averaging():
    a = artifact_with_accuracy("direct", Task.FPB, 80.0, total=100, model="model-a")
    b = artifact_with_accuracy("direct", Task.FPB, 90.0, total=100, model="model-b")
    table = accuracy_table([a, b])
    assert table.rows["direct"]["fpb"] == pytest.approx(85.0)


def test_main_grid_averages_match_published_values():
    table = accuracy_table(grid_artifacts(MAIN_GRID))
    for method, values in MAIN_GRID.items():
        assert table.rows[method]["avg"] == pytest.approx(values[4], abs=0.05 + 1e-9)
    assert not table.missing


def test_ablation_grid_deltas_match_published_values():
    report = ablation_table(grid_artifacts(ABLATION_GRID))
    assert report.row_order[0] == "sef"
    for method, values in ABLATION_GRID.items():
        assert report.rows[method]["avg"] == pytest.approx(values[4], abs=0.05 + 1e-9)
        if values[5] is not None:
            assert report.rows[method]["delta"] == pytest.approx(values[5], abs=0.05 + 1e-9)
    assert report.rows["sef"]["delta"] is None


def test_ablation_requires_full_sef():
    artifacts = [artifact_with_accuracy("sef_wo_afl", Task.FPB, 50.0, total=10)]
    with pytest.raises(AnalyticsError):
        ablation_table(artifacts)


def test_accuracy_bounds_and_avg_between_min_max():
    table = accuracy_table(grid_artifacts(MAIN_GRID))
    for method in table.row_order:
        cells = [table.rows[method][k] for k in ("fpb", "cqa", "hearsay", "pmq")]
        avg = table.rows[method]["avg"]
        assert all(0.0 <= c <= 100.0 for c in cells)
        assert min(cells) <= avg <= max(cells)


# --- rendering -------------------------------------------------------------


def test_accuracy_csv_header_and_determinism():
    table = accuracy_table(grid_artifacts(MAIN_GRID))
    csv_text = render_accuracy(table, "csv")
    assert csv_text.splitlines()[0] == "method,fpb,cqa,hearsay,pmq,avg"
    assert "sef,95.5,96.1,54.5,89.5,83.9" in csv_text
    assert render_accuracy(table, "csv") == csv_text
    table_text = render_accuracy(table, "table")
    assert render_accuracy(table, "table") == table_text


def test_ablation_csv_delta_column():
    report = ablation_table(grid_artifacts(ABLATION_GRID))
    csv_text = render_ablation(report, "csv")
    assert csv_text.splitlines()[0] == "variant,fpb,cqa,hearsay,pmq,avg,delta"
    assert "sef_wo_presentation,35.1,67.5,53.8,47.8,51.0,-32.9" in csv_text.replace("+", "")


def test_correlations_render_has_six_rows_and_footnote():
    report = correlate_records(correlated_pool(n=500))
    csv_text = render_correlations(report, "csv")
    lines = csv_text.splitlines()
    assert lines[0] == "metric,r,p,n"
    assert len([l for l in lines if l and not l.startswith("#")]) == 7  # header + 6 metrics
    assert any(report.footnote in l for l in lines)
    with pytest.raises(AnalyticsError):
        render_correlations(report, "yaml")


def test_emit_report_writes_deterministic_files(tmp_path):
    table = accuracy_table(grid_artifacts(MAIN_GRID))
    out = tmp_path / "accuracy.csv"
    first = emit_report(table, "csv", out)
    assert out.read_text(encoding="utf-8") == first
    second = emit_report(table, "csv", out)
    assert first == second
