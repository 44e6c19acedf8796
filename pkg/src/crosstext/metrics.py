"""Evaluation metrics: weighted F1, micro F1, exact accuracy, per-label P/R/F1.

Conventions: support is counted on gold labels; precision, recall and F1
are all defined as 0 when their denominator vanishes. Reports print
percentages with two decimals, internal values keep full precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass
class PredictionSet:
    pairs: list[tuple[str, str]]  # (gold, predicted)
    language: str = ""


@dataclass
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class MetricsReport:
    weighted_f1: float
    micro_f1: float
    exact_accuracy: float
    per_label: dict[str, LabelMetrics]
    language: str = ""
    n_pairs: int = 0


@dataclass
class MacroAverage:
    weighted_f1: float
    micro_f1: float
    exact_accuracy: float


def _require_pairs(preds: PredictionSet) -> None:
    if not preds.pairs:
        raise ValueError("cannot compute metrics on an empty prediction set")


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _f1(precision: float, recall: float) -> float:
    return _safe_div(2.0 * precision * recall, precision + recall)


def per_label_prf(preds: PredictionSet) -> dict[str, LabelMetrics]:
    """One-vs-rest precision/recall/F1/support per label in gold or pred."""
    _require_pairs(preds)
    labels = sorted({g for g, _ in preds.pairs} | {p for _, p in preds.pairs})
    out: dict[str, LabelMetrics] = {}
    for label in labels:
        tp = sum(1 for g, p in preds.pairs if g == label and p == label)
        fp = sum(1 for g, p in preds.pairs if g != label and p == label)
        fn = sum(1 for g, p in preds.pairs if g == label and p != label)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        out[label] = LabelMetrics(
            precision=precision,
            recall=recall,
            f1=_f1(precision, recall),
            support=tp + fn,
        )
    return out


def weighted_f1(preds: PredictionSet) -> float:
    """Per-label F1 averaged with gold-support weights."""
    per_label = per_label_prf(preds)
    total = sum(m.support for m in per_label.values())
    return sum(m.f1 * m.support for m in per_label.values()) / total


def micro_f1(preds: PredictionSet) -> float:
    """F1 over label-pooled TP/FP/FN; equals accuracy in single-label data."""
    _require_pairs(preds)
    labels = sorted({g for g, _ in preds.pairs} | {p for _, p in preds.pairs})
    tp = fp = fn = 0
    for label in labels:
        tp += sum(1 for g, p in preds.pairs if g == label and p == label)
        fp += sum(1 for g, p in preds.pairs if g != label and p == label)
        fn += sum(1 for g, p in preds.pairs if g == label and p != label)
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    return _f1(precision, recall)


def exact_accuracy(preds: PredictionSet) -> float:
    _require_pairs(preds)
    return sum(1 for g, p in preds.pairs if g == p) / len(preds.pairs)


def compute_report(preds: PredictionSet) -> MetricsReport:
    return MetricsReport(
        weighted_f1=weighted_f1(preds),
        micro_f1=micro_f1(preds),
        exact_accuracy=exact_accuracy(preds),
        per_label=per_label_prf(preds),
        language=preds.language,
        n_pairs=len(preds.pairs),
    )


def macro_average(reports: list[MetricsReport]) -> MacroAverage:
    """Unweighted arithmetic mean of each scalar metric across reports."""
    if not reports:
        raise ValueError("cannot average an empty report list")
    n = len(reports)
    return MacroAverage(
        weighted_f1=sum(r.weighted_f1 for r in reports) / n,
        micro_f1=sum(r.micro_f1 for r in reports) / n,
        exact_accuracy=sum(r.exact_accuracy for r in reports) / n,
    )


def format_report(report: MetricsReport) -> str:
    """Human-readable report table, percentages with two decimals."""
    lines = []
    title = f"results ({report.language})" if report.language else "results"
    lines.append(f"{title}: {report.n_pairs} instances")
    lines.append(f"  weighted F1    : {100.0 * report.weighted_f1:6.2f}")
    lines.append(f"  micro F1       : {100.0 * report.micro_f1:6.2f}")
    lines.append(f"  exact accuracy : {100.0 * report.exact_accuracy:6.2f}")
    lines.append(f"  {'label':<12} {'prec':>7} {'rec':>7} {'f1':>7} {'support':>8}")
    for label, m in report.per_label.items():
        lines.append(
            f"  {label:<12} {100.0 * m.precision:7.2f} {100.0 * m.recall:7.2f} "
            f"{100.0 * m.f1:7.2f} {m.support:8d}"
        )
    return "\n".join(lines)


def report_to_dict(report: MetricsReport) -> dict:
    return {
        "language": report.language,
        "n_pairs": report.n_pairs,
        "weighted_f1": report.weighted_f1,
        "micro_f1": report.micro_f1,
        "exact_accuracy": report.exact_accuracy,
        "per_label": {
            label: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for label, m in report.per_label.items()
        },
    }


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False)
