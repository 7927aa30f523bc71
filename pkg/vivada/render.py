"""Plain-text tables for dataset statistics and evaluation reports."""

from typing import Any, Iterable, Mapping, Optional, Sequence

from vivada.evaluation.metrics import METRIC_NAMES
from vivada.evaluation.report import EvalReport, ModelReport

METRIC_HEADERS = {"precision": "Precision", "recall": "Recall", "f1": "F1", "auc": "AUC"}
STATS_HEADERS = ("Split", "Seeds", "Total", "Controversial (%)", "General Web (%)")
AGREEMENT_HEADERS = ("Model", "n", "Mean annotation", "Certainty", "Disagreement")

# ---------------------------------------------------------------------------
# Cells
# ---------------------------------------------------------------------------


def fmt_value(value: Optional[float], digits: int = 3) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def fmt_interval(interval: Optional[Mapping[str, Any]]) -> str:
    if not interval:
        return ""
    return f"[{interval['low']:.3f}, {interval['high']:.3f}]"


def fmt_delta(change: Optional[float]) -> str:
    """Percentage change with a direction marker, e.g. ▼15% or ▲3%."""
    if change is None:
        return "-"
    pct = round(change * 100)
    if pct == 0:
        return "0%"
    return f"{'▲' if pct > 0 else '▼'}{abs(pct)}%"


def fmt_metric_cell(m: ModelReport, name: str, intervals: bool) -> str:
    cell = fmt_value(m.metrics.get(name))
    if intervals and name in m.intervals:
        cell += " " + fmt_interval(m.intervals[name])
    return cell


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def fmt_table(headers: Sequence[str], rows: Iterable[Sequence[Any]], title: Optional[str] = None) -> str:
    """Left-aligned first column, right-aligned others, one space-padded rule under the header."""
    rows = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def line(cells: Sequence[str]) -> str:
        out = [cells[0].ljust(widths[0])]
        out += [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join(out).rstrip()

    lines = [title] if title else []
    lines.append(line(list(headers)))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend(line(row) for row in rows)
    return "\n".join(lines) + "\n"


def fmt_dataset_stats(rows: Iterable[Sequence[Any]]) -> str:
    return fmt_table(STATS_HEADERS, rows)


def fmt_metrics(report: EvalReport, intervals: bool = True) -> str:
    headers = ["Model", *(METRIC_HEADERS[n] for n in METRIC_NAMES)]
    rows = [[m.model, *(fmt_metric_cell(m, n, intervals) for n in METRIC_NAMES)] for m in report.models]
    return fmt_table(headers, rows)


def fmt_significance(report: EvalReport, metric: str) -> str:
    matrix = report.significance.get(metric, {})
    names = list(matrix)
    rows = [[a, *("*" if matrix[a][b] else "" for b in names)] for a in names]
    return fmt_table(["", *names], rows, title=f"Significant differences ({METRIC_HEADERS[metric]})")


def fmt_pooled(pooled: Mapping[str, Mapping[str, Optional[float]]]) -> str:
    rows = [
        [group.capitalize(), int(entry["models"]), fmt_value(entry.get("f1")), fmt_value(entry.get("auc"))]
        for group, entry in pooled.items()
    ]
    return fmt_table(["Group", "Models", "F1", "AUC"], rows, title="Pooled")


def fmt_temporal(report: EvalReport) -> str:
    """Within-year, between-year and percentage change columns per model."""
    within = {m["model"]: m["metrics"] for m in report.tables.get("within", [])}
    deltas = report.tables.get("delta", {})
    short = [METRIC_HEADERS[n] for n in METRIC_NAMES]
    headers = ["Model", *(f"{h} (within)" for h in short), *(f"{h} (between)" for h in short), *(f"Δ {h}" for h in short)]
    rows = []
    for m in report.models:
        rows.append(
            [
                m.model,
                *(fmt_value(within.get(m.model, {}).get(n)) for n in METRIC_NAMES),
                *(fmt_value(m.metrics.get(n)) for n in METRIC_NAMES),
                *(fmt_delta(deltas.get(m.model, {}).get(n)) for n in METRIC_NAMES),
            ]
        )
    return fmt_table(headers, rows)


def fmt_folds(report: EvalReport) -> str:
    rows = []
    for fold in report.tables.get("folds", []):
        for m in fold["models"]:
            rows.append([fold["topic"], m["model"], m["n"], *(fmt_value(m["metrics"].get(n)) for n in METRIC_NAMES)])
    return fmt_table(["Topic", "Model", "n", *(METRIC_HEADERS[n] for n in METRIC_NAMES)], rows, title="Folds")


def fmt_agreement(records: Iterable[Mapping[str, Any]]) -> str:
    rows = [
        [
            r["model"],
            r["n"],
            fmt_value(r["mean_annotation"]),
            fmt_value(r["certainty"]),
            fmt_value(r["disagreement"]),
        ]
        for r in records
    ]
    return fmt_table(AGREEMENT_HEADERS, rows)


def fmt_report(report: EvalReport) -> str:
    sections = [f"== {report.experiment} (seed {report.seed}, {report.resamples} resamples) =="]
    if report.experiment == "temporal":
        sections.append(fmt_temporal(report))
    elif report.models:
        sections.append(fmt_metrics(report))
    if report.tables.get("folds"):
        sections.append(fmt_folds(report))
    if report.tables.get("agreement"):
        sections.append(fmt_agreement(report.tables["agreement"]))
    if report.tables.get("stats"):
        sections.append(fmt_dataset_stats(report.tables["stats"]))
    if len(report.models) > 1:
        sections.extend(fmt_significance(report, metric) for metric in ("f1", "auc"))
    if report.tables.get("pooled"):
        sections.append(fmt_pooled(report.tables["pooled"]))
    if report.notes:
        sections.append("\n".join(f"{k}: {v}" for k, v in sorted(report.notes.items())) + "\n")
    return "\n".join(sections)
