"""Evaluation: confusion metrics for the unclear (positive) class, ROC AUC,
micro/macro summaries across communities, approximate randomization tests,
and the coefficient report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .models import LogRegModel


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predictions, labels) -> ConfusionCounts:
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.size == 0:
        raise ValueError("cannot evaluate an empty prediction set")
    if predictions.shape != labels.shape:
        raise ValueError("predictions and labels differ in length")
    return ConfusionCounts(
        tp=int(((predictions == 1) & (labels == 1)).sum()),
        fp=int(((predictions == 1) & (labels == 0)).sum()),
        tn=int(((predictions == 0) & (labels == 0)).sum()),
        fn=int(((predictions == 0) & (labels == 1)).sum()),
    )


def prf(counts: ConfusionCounts) -> tuple[float, float, float, float]:
    """(precision, recall, f1, accuracy); 0/0 is defined as 0."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (counts.tp + counts.tn) / counts.total
    return precision, recall, f1, accuracy


def roc_auc(scores, labels) -> float:
    """(concordant + 0.5*tied) / (positives * negatives), via midranks."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC AUC requires both classes to be present")
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    ranks = np.empty(len(scores), dtype=np.float64)
    i = 0
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


# Metric callables with the (values, labels) -> float signature used by the
# randomization test.


def accuracy_metric(predictions, labels) -> float:
    return prf(confusion(predictions, labels))[3]


def f1_metric(predictions, labels) -> float:
    return prf(confusion(predictions, labels))[2]


def auc_metric(scores, labels) -> float:
    return roc_auc(scores, labels)


def metrics_dict(predictions, labels, scores=None) -> dict[str, float]:
    precision, recall, f1, accuracy = prf(confusion(predictions, labels))
    out = {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1}
    if scores is not None:
        out["roc_auc"] = roc_auc(scores, labels)
    return out


@dataclass
class MetricReport:
    per_community: dict[str, dict[str, float]]
    micro: dict[str, float]
    macro: dict[str, float]


def summarize(per_community: dict[str, tuple]) -> MetricReport:
    """per_community maps name -> (predictions, labels[, scores]).

    Micro metrics pool all predictions; macro metrics are unweighted means of
    the per-community values.
    """
    if not per_community:
        raise ValueError("need at least one community")
    community_metrics: dict[str, dict[str, float]] = {}
    pooled_preds: list[np.ndarray] = []
    pooled_labels: list[np.ndarray] = []
    pooled_scores: list[np.ndarray] = []
    with_scores = True
    for name, parts in per_community.items():
        predictions, labels = parts[0], parts[1]
        scores = parts[2] if len(parts) > 2 else None
        community_metrics[name] = metrics_dict(predictions, labels, scores)
        pooled_preds.append(np.asarray(predictions))
        pooled_labels.append(np.asarray(labels))
        if scores is None:
            with_scores = False
        else:
            pooled_scores.append(np.asarray(scores, dtype=np.float64))
    micro = metrics_dict(
        np.concatenate(pooled_preds),
        np.concatenate(pooled_labels),
        np.concatenate(pooled_scores) if with_scores else None,
    )
    metric_names = next(iter(community_metrics.values())).keys()
    macro = {
        metric: float(np.mean([m[metric] for m in community_metrics.values()]))
        for metric in metric_names
    }
    return MetricReport(per_community=community_metrics, micro=micro, macro=macro)


def approx_randomization(pred_a, pred_b, labels,
                         metric: Callable[[np.ndarray, np.ndarray], float],
                         rounds: int = 10000, seed: int = 0) -> float:
    """Approximate randomization test p-value with the add-one estimator.

    Each round swaps the two systems' outputs per item with probability 0.5 and
    recomputes the absolute metric difference. Deterministic given the seed.
    """
    pred_a = np.asarray(pred_a)
    pred_b = np.asarray(pred_b)
    labels = np.asarray(labels)
    if pred_a.shape != pred_b.shape or pred_a.shape != labels.shape:
        raise ValueError("prediction/label arrays differ in length")
    if rounds < 100:
        raise ValueError(f"need at least 100 rounds, got {rounds}")
    observed = abs(metric(pred_a, labels) - metric(pred_b, labels))
    rng = np.random.default_rng(seed)
    at_least = 0
    for _ in range(rounds):
        mask = rng.random(pred_a.shape[0]) < 0.5
        swapped_a = np.where(mask, pred_b, pred_a)
        swapped_b = np.where(mask, pred_a, pred_b)
        delta = abs(metric(swapped_a, labels) - metric(swapped_b, labels))
        if delta >= observed:
            at_least += 1
    return (1 + at_least) / (1 + rounds)


def significance_marker(p_value: float, improved: bool) -> str:
    """ASCII rendering of the marker scheme: ^ / ^^ up, v / vv down, o neither."""
    if p_value < 0.01:
        return "^^" if improved else "vv"
    if p_value < 0.05:
        return "^" if improved else "v"
    return "o"


def coefficient_report(model: LogRegModel) -> list[tuple[str, float]]:
    """(feature, weight) sorted by weight descending; positive weights indicate
    the unclear class."""
    names = model.feature_names or tuple(f"f{i}" for i in range(len(model.weights)))
    pairs = list(zip(names, (float(w) for w in model.weights)))
    pairs.sort(key=lambda item: (-item[1], item[0]))
    return pairs


def render_results_table(rows: list[dict], metric_names: Sequence[str] = ("accuracy", "roc_auc", "f1"),
                         header_labels: dict[str, str] | None = None) -> str:
    """Aligned text table; each row dict has name, metrics, and optional markers."""
    labels = {"accuracy": "Acc.", "roc_auc": "AUC", "f1": "F1",
              "precision": "Prec.", "recall": "Rec."}
    if header_labels:
        labels.update(header_labels)
    header = ["Method"] + [labels.get(m, m) for m in metric_names]
    table_rows = [header]
    for row in rows:
        cells = [row["name"]]
        for metric in metric_names:
            value = row["metrics"].get(metric)
            cell = "-" if value is None else f"{value:.3f}"
            marker = row.get("markers", {}).get(metric)
            if marker:
                cell += marker
            cells.append(cell)
        table_rows.append(cells)
    widths = [max(len(r[i]) for r in table_rows) for i in range(len(header))]
    lines = []
    for i, cells in enumerate(table_rows):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"
