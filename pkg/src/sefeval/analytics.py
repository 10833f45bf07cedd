"""Run-artifact analytics: metric-correctness correlations, accuracy
tables, and ablation deltas, with deterministic CSV/table rendering."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from scipy.stats import t as t_dist

from .errors import AnalyticsError
from .harness.runner import ExplanationRecord, RunArtifact
from .metrics import METRIC_NAMES
from .prompts import Method, Task

logger = logging.getLogger(__name__)

# Fixed column order for the four tasks plus the unweighted average.
TASK_COLUMNS = (Task.FPB, Task.CONSUMER_QA, Task.HEARSAY, Task.PUBMED_QA)
COLUMN_KEYS = {Task.FPB: "fpb", Task.CONSUMER_QA: "cqa", Task.HEARSAY: "hearsay", Task.PUBMED_QA: "pmq"}

ABLATION_ROWS = (
    Method.SEF_WO_AFL,
    Method.SEF_WO_AC,
    Method.SEF_WO_CI,
    Method.SEF_WO_DTC,
    Method.SEF_WO_CEA,
    Method.SEF_WO_FS,
    Method.SEF_WO_PRESENTATION,
    Method.SEF_WO_DOMAIN,
)

CORRELATION_FOOTNOTE = (
    "note: records pooled across methods, models, and tasks share prompts and "
    "datasets; treat correlations as descriptive association, not causal or "
    "independent-sample estimates."
)


def pearson(x: list[float], y: list[float]) -> float:
    """Sample Pearson r with fixed-order compensated summation."""
    if len(x) != len(y):
        raise AnalyticsError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise AnalyticsError(f"need at least 3 points, got {n}")
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    cov = math.fsum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    var_x = math.fsum((a - mean_x) ** 2 for a in x)
    var_y = math.fsum((b - mean_y) ** 2 for b in y)
    if var_x == 0.0 or var_y == 0.0:
        raise AnalyticsError("constant vector has no defined correlation")
    r = cov / math.sqrt(var_x * var_y)
    if abs(r) > 1.0 + 1e-12:
        raise AnalyticsError(f"numerically impossible r={r}")
    return max(-1.0, min(1.0, r))


def p_value(r: float, n: int) -> float:
    """Two-sided p for a Pearson r via the t transform with n-2 df."""
    if n < 3:
        raise AnalyticsError(f"need n >= 3, got {n}")
    if not -1.0 < r < 1.0:
        raise AnalyticsError(f"|r| must be < 1 for a t-based p-value, got {r}")
    t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * t_dist.sf(abs(t_stat), n - 2))


@dataclass
class CorrelationReport:
    per_metric: dict[str, tuple[float, float, int]]  # metric -> (r, p, n)
    excluded_unparsed: int
    excluded_failed: int
    footnote: str = CORRELATION_FOOTNOTE


def _pool_records(artifacts: list[RunArtifact]) -> list[ExplanationRecord]:
    records: list[ExplanationRecord] = []
    for artifact in artifacts:
        records.extend(artifact.records)
    return records


def correlate(artifacts: list[RunArtifact], include_sef: bool = True) -> CorrelationReport:
    """Pearson r between each metric and the correctness indicator over the
    pooled parsed records of all given runs."""
    if not artifacts:
        raise AnalyticsError("no artifacts to correlate")
    records = _pool_records(artifacts)
    if not include_sef:
        records = [r for r in records if not r.method.startswith("sef")]
    return correlate_records(records)


def correlate_records(records: list[ExplanationRecord]) -> CorrelationReport:
    unparsed = sum(1 for r in records if r.status == "unparsed")
    failed = sum(1 for r in records if r.status == "failed")
    usable = [r for r in records if r.status == "ok"]
    if len(usable) < 3:
        raise AnalyticsError(f"not enough parsed records to correlate (got {len(usable)})")
    correctness = [1.0 if r.correct else 0.0 for r in usable]
    per_metric = {}
    for name in METRIC_NAMES:
        scores = [getattr(r.metrics, name) for r in usable]
        r_val = pearson(scores, correctness)
        # |r| = 1 is the degenerate limit of the t transform
        p_val = 0.0 if abs(r_val) >= 1.0 else p_value(r_val, len(usable))
        per_metric[name] = (r_val, p_val, len(usable))
    return CorrelationReport(per_metric=per_metric, excluded_unparsed=unparsed, excluded_failed=failed)


@dataclass
class AccuracyTable:
    rows: dict[str, dict[str, float | None]]  # method -> column key -> accuracy %
    row_order: list[str]
    missing: list[tuple[str, str]]


@dataclass
class AblationReport:
    rows: dict[str, dict[str, float | None]]  # variant -> column key (incl. delta)
    row_order: list[str]
    missing: list[tuple[str, str]]


def _cell_accuracies(artifacts: list[RunArtifact]) -> dict[tuple[str, str], float]:
    """(method, task) -> accuracy %, averaging per-model accuracy when runs
    from several models cover the same cell."""
    by_cell_model: dict[tuple[str, str], dict[str, list[int]]] = {}
    for artifact in artifacts:
        cell = (artifact.config.method, artifact.config.task)
        counts = by_cell_model.setdefault(cell, {}).setdefault(artifact.config.model, [0, 0])
        counts[0] += sum(1 for r in artifact.records if r.correct)
        counts[1] += len(artifact.records)
    cells = {}
    for cell, models in by_cell_model.items():
        per_model = [100.0 * c / t for c, t in models.values() if t]
        if per_model:
            cells[cell] = math.fsum(per_model) / len(per_model)
    return cells


def _row_average(cells: dict[str, float | None]) -> float | None:
    present = [v for v in cells.values() if v is not None]
    return math.fsum(present) / len(present) if present else None


def accuracy_table(artifacts: list[RunArtifact]) -> AccuracyTable:
    if not artifacts:
        raise AnalyticsError("no artifacts for accuracy table")
    cells = _cell_accuracies(artifacts)
    methods = []
    for artifact in artifacts:
        if artifact.config.method not in methods:
            methods.append(artifact.config.method)
    rows: dict[str, dict[str, float | None]] = {}
    missing = []
    for method in methods:
        row: dict[str, float | None] = {}
        for task in TASK_COLUMNS:
            value = cells.get((method, task.value))
            row[COLUMN_KEYS[task]] = value
            if value is None:
                missing.append((method, task.value))
        row["avg"] = _row_average({k: row[k] for k in (COLUMN_KEYS[t] for t in TASK_COLUMNS)})
        rows[method] = row
    if missing:
        logger.warning("accuracy grid incomplete: %d empty cells", len(missing))
    return AccuracyTable(rows=rows, row_order=methods, missing=missing)


def ablation_table(artifacts: list[RunArtifact]) -> AblationReport:
    """Per-variant accuracy plus delta of the variant average vs the full
    structured-prompt average."""
    table = accuracy_table([a for a in artifacts if a.config.method.startswith("sef")])
    if Method.SEF.value not in table.rows:
        raise AnalyticsError("ablation table requires runs for the full 'sef' method")
    full_avg = table.rows[Method.SEF.value]["avg"]
    if full_avg is None:
        raise AnalyticsError("full 'sef' rows have no task cells")
    row_order = [Method.SEF.value] + [m.value for m in ABLATION_ROWS if m.value in table.rows]
    rows = {}
    for method in row_order:
        row = dict(table.rows[method])
        if method == Method.SEF.value:
            row["delta"] = None
        else:
            row["delta"] = (row["avg"] - full_avg) if row["avg"] is not None else None
        rows[method] = row
    return AblationReport(rows=rows, row_order=row_order, missing=table.missing)


# ---------------------------------------------------------------------------
# Rendering: deterministic CSV and aligned plain-text tables.
# ---------------------------------------------------------------------------


def _fmt(value: float | None, spec: str = "{:.1f}", empty: str = "") -> str:
    return empty if value is None else spec.format(value)


def _fmt_p(p: float) -> str:
    return "{:.3g}".format(p)


def render_correlations(report: CorrelationReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        lines = ["metric,r,p,n"]
        for name in METRIC_NAMES:
            r, p, n = report.per_metric[name]
            lines.append(f"{name},{r:.4f},{_fmt_p(p)},{n}")
        lines.append(f"# excluded: {report.excluded_unparsed} unparsed, {report.excluded_failed} failed")
        lines.append(f"# {report.footnote}")
        return "\n".join(lines) + "\n"
    if fmt == "table":
        header = f"{'metric':<8}{'r':>9}{'p':>12}{'n':>10}"
        lines = [header, "-" * len(header)]
        for name in METRIC_NAMES:
            r, p, n = report.per_metric[name]
            lines.append(f"{name:<8}{r:>9.4f}{_fmt_p(p):>12}{n:>10}")
        lines.append(f"excluded: {report.excluded_unparsed} unparsed, {report.excluded_failed} failed")
        lines.append(report.footnote)
        return "\n".join(lines) + "\n"
    raise AnalyticsError(f"unknown format: {fmt!r}")


_ACCURACY_COLUMNS = ("fpb", "cqa", "hearsay", "pmq", "avg")


def render_accuracy(table: AccuracyTable, fmt: str = "csv") -> str:
    if fmt == "csv":
        lines = ["method," + ",".join(_ACCURACY_COLUMNS)]
        for method in table.row_order:
            row = table.rows[method]
            lines.append(method + "," + ",".join(_fmt(row[c]) for c in _ACCURACY_COLUMNS))
        return "\n".join(lines) + "\n"
    if fmt == "table":
        width = max(len("method"), *(len(m) for m in table.row_order)) + 2
        header = f"{'method':<{width}}" + "".join(f"{c:>9}" for c in _ACCURACY_COLUMNS)
        lines = [header, "-" * len(header)]
        for method in table.row_order:
            row = table.rows[method]
            lines.append(f"{method:<{width}}" + "".join(f"{_fmt(row[c], empty='--'):>9}" for c in _ACCURACY_COLUMNS))
        return "\n".join(lines) + "\n"
    raise AnalyticsError(f"unknown format: {fmt!r}")


def render_ablation(report: AblationReport, fmt: str = "csv") -> str:
    columns = _ACCURACY_COLUMNS + ("delta",)
    if fmt == "csv":
        lines = ["variant," + ",".join(columns)]
        for method in report.row_order:
            row = report.rows[method]
            cells = [_fmt(row[c]) for c in _ACCURACY_COLUMNS]
            cells.append(_fmt(row["delta"], spec="{:+.1f}"))
            lines.append(method + "," + ",".join(cells))
        return "\n".join(lines) + "\n"
    if fmt == "table":
        width = max(len("variant"), *(len(m) for m in report.row_order)) + 2
        header = f"{'variant':<{width}}" + "".join(f"{c:>9}" for c in columns)
        lines = [header, "-" * len(header)]
        for method in report.row_order:
            row = report.rows[method]
            cells = "".join(f"{_fmt(row[c], empty='--'):>9}" for c in _ACCURACY_COLUMNS)
            cells += f"{_fmt(row['delta'], spec='{:+.1f}', empty='--'):>9}"
            lines.append(f"{method:<{width}}" + cells)
        return "\n".join(lines) + "\n"
    raise AnalyticsError(f"unknown format: {fmt!r}")


def emit_report(report, fmt: str, out_path) -> str:
    """Render a report and write it; returns the rendered text."""
    from pathlib import Path

    if isinstance(report, CorrelationReport):
        text = render_correlations(report, fmt)
    elif isinstance(report, AccuracyTable):
        text = render_accuracy(report, fmt)
    elif isinstance(report, AblationReport):
        text = render_ablation(report, fmt)
    else:
        raise AnalyticsError(f"unknown report type: {type(report).__name__}")
    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return text
