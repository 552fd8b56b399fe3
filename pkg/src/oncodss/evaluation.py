"""Classifier evaluation: seeded k-fold splits, similarity-weighted
nearest-neighbor classification over a case base, confusion metrics,
ROC curves and AUC.

The classifier is the retrieval engine itself: the posterior for the
positive class is the similarity-weighted vote of the top-k neighbors,
thresholded strictly at 0.5 (exactly 0.5 classifies negative).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

from .casebase import CaseBase, ClinicalCase
from .ontology import Ontology
from .similarity import SimilarityWeights, retrieve_top_k


class EvaluationError(Exception):
    pass


class EmptySample(EvaluationError):
    pass


class DatasetTooSmall(EvaluationError):
    pass


class InsufficientNeighbors(EvaluationError):
    pass


class DegenerateLabels(EvaluationError):
    pass


class Label(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class LabeledCase:
    case: ClinicalCase
    label: Label

    def to_dict(self) -> dict:
        return {"case": self.case.to_dict(), "label": self.label.value}

    @classmethod
    def from_dict(cls, d: Mapping) -> "LabeledCase":
        return cls(case=ClinicalCase.from_dict(d["case"]), label=Label(d["label"]))


def load_labeled_cases(path) -> list[LabeledCase]:
    """JSONL, one {case, label} object per line."""
    out: list[LabeledCase] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(LabeledCase.from_dict(json.loads(line)))
    return out


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class MetricValues:
    """Accuracy plus the two rates; a rate is None when its denominator is 0."""

    accuracy: float
    fpr: Optional[float]
    tpr: Optional[float]

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "fpr": self.fpr, "tpr": self.tpr}


def metrics(c: ConfusionCounts) -> MetricValues:
    if c.total == 0:
        raise EmptySample("confusion counts sum to zero")
    return MetricValues(
        accuracy=(c.tp + c.tn) / c.total,
        fpr=c.fp / (c.fp + c.tn) if (c.fp + c.tn) > 0 else None,
        tpr=c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else None,
    )


def five_fold_split(n: int, seed: int, n_folds: int = 5) -> list[list[int]]:
    """Seeded random partition into n_folds disjoint index lists whose sizes
    differ by at most one (larger folds first)."""
    if n < n_folds:
        raise DatasetTooSmall(f"need at least {n_folds} samples, got {n}")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    base, extra = divmod(n, n_folds)
    folds: list[list[int]] = []
    start = 0
    for i in range(n_folds):
        size = base + (1 if i < extra else 0)
        folds.append(sorted(indices[start : start + size]))
        start += size
    return folds


@dataclass(frozen=True)
class Classification:
    posterior: float
    label: Label


def classify(
    query: ClinicalCase,
    casebase: CaseBase,
    labels: Mapping[str, Label],
    weights: SimilarityWeights,
    ontology: Ontology,
    k: int = 5,
    use_ontology: bool = True,
) -> Classification:
    """Similarity-weighted vote over the top-k neighbors.

    posterior = sum of positive-neighbor similarities / sum of all top-k
    similarities (0 when every neighbor scored 0); positive iff > 0.5.
    """
    if len(casebase) < k:
        raise InsufficientNeighbors(f"case base holds {len(casebase)} cases, need {k}")
    neighbors = retrieve_top_k(casebase, query, k, weights, ontology, use_ontology)
    total = sum(r.score for r in neighbors)
    positive = sum(r.score for r in neighbors if labels[r.case_id] is Label.POSITIVE)
    posterior = positive / total if total > 0 else 0.0
    label = Label.POSITIVE if posterior > 0.5 else Label.NEGATIVE
    return Classification(posterior=posterior, label=label)


@dataclass(frozen=True)
class CvResult:
    fold_counts: tuple[ConfusionCounts, ...]
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    scored: tuple[tuple[float, Label], ...]  # pooled (posterior, true label)

    def to_dict(self) -> dict:
        return {
            "fold_counts": [c.to_dict() for c in self.fold_counts],
            "fold_accuracies": list(self.fold_accuracies),
            "mean_accuracy": self.mean_accuracy,
        }


def run_cv(
    data: Sequence[LabeledCase],
    k_neighbors: int,
    weights: SimilarityWeights,
    ontology: Ontology,
    use_ontology: bool = True,
    seed: int = 0,
    n_folds: int = 5,
) -> CvResult:
    """Cross-validate: each fold is the test set once, the rest the case base;
    mean accuracy is the unweighted mean of the fold accuracies."""
    if len(data) < 10:
        raise DatasetTooSmall(f"need at least 10 labeled cases, got {len(data)}")
    ids = [lc.case.case_id for lc in data]
    if len(set(ids)) != len(ids):
        raise EvaluationError("case ids must be unique across the dataset")
    folds = five_fold_split(len(data), seed, n_folds)
    fold_counts: list[ConfusionCounts] = []
    accuracies: list[float] = []
    scored: list[tuple[float, Label]] = []
    for test_idx in folds:
        test_set = set(test_idx)
        train_cb = CaseBase(ontology=ontology)
        labels: dict[str, Label] = {}
        for i, lc in enumerate(data):
            if i not in test_set:
                train_cb.add_case(lc.case)
                labels[lc.case.case_id] = lc.label
        tp = fp = tn = fn = 0
        for i in sorted(test_set):
            lc = data[i]
            result = classify(lc.case, train_cb, labels, weights, ontology, k_neighbors, use_ontology)
            scored.append((result.posterior, lc.label))
            if lc.label is Label.POSITIVE:
                if result.label is Label.POSITIVE:
                    tp += 1
                else:
                    fn += 1
            else:
                if result.label is Label.POSITIVE:
                    fp += 1
                else:
                    tn += 1
        counts = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
        fold_counts.append(counts)
        accuracies.append(metrics(counts).accuracy)
    return CvResult(
        fold_counts=tuple(fold_counts),
        fold_accuracies=tuple(accuracies),
        mean_accuracy=sum(accuracies) / len(accuracies),
        scored=tuple(scored),
    )


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]  # (fpr, tpr), (0,0) .. (1,1)
    auc: float

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points], "auc": self.auc}


def roc(scored: Sequence[tuple[float, Label]]) -> RocCurve:
    """Threshold sweep over distinct scores descending; equal scores are one
    step, AUC by the trapezoid rule."""
    n_pos = sum(1 for _, label in scored if label is Label.POSITIVE)
    n_neg = len(scored) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("need at least one positive and one negative label")
    ordered = sorted(scored, key=lambda st: -st[0])
    points: list[tuple[float, float]] = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(ordered):
        threshold = ordered[i][0]
        while i < len(ordered) and ordered[i][0] == threshold:
            if ordered[i][1] is Label.POSITIVE:
                tp += 1
            else:
                fp += 1
            i += 1
        point = (fp / n_neg, tp / n_pos)
        if point != points[-1]:
            points.append(point)
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    auc = 0.0
    for (x1, y1), (x2, y2) in zip(points, points[1:]):
        auc += (x2 - x1) * (y1 + y2) / 2.0
    return RocCurve(points=tuple(points), auc=auc)


REPORT_COLUMNS = (
    "No. of test samples",
    "TP",
    "FP",
    "TN",
    "FN",
    "FP / (FP + TN)",
    "TP / (TP + FN)",
    "Accuracy",
)


def render_report(fold_counts: Sequence[ConfusionCounts]) -> str:
    """Plain-text per-fold table in the conventional column order, with an
    average-accuracy footer."""
    rows = []
    accuracies = []
    for c in fold_counts:
        m = metrics(c)
        accuracies.append(m.accuracy)
        rows.append(
            (
                str(c.total),
                str(c.tp),
                str(c.fp),
                str(c.tn),
                str(c.fn),
                "-" if m.fpr is None else f"{m.fpr:.2f}",
                "-" if m.tpr is None else f"{m.tpr:.2f}",
                f"{m.accuracy * 100:.2f}%",
            )
        )
    widths = [
        max(len(REPORT_COLUMNS[i]), *(len(r[i]) for r in rows)) if rows else len(REPORT_COLUMNS[i])
        for i in range(len(REPORT_COLUMNS))
    ]
    def fmt(row):
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    lines = [fmt(REPORT_COLUMNS)]
    lines.extend(fmt(r) for r in rows)
    mean = sum(accuracies) / len(accuracies) if accuracies else 0.0
    lines.append(f"Average Accuracy  {mean * 100:.2f}%")
    return "\n".join(lines)


def roc_csv(curve: RocCurve) -> str:
    lines = ["fpr,tpr"]
    lines.extend(f"{x:.6f},{y:.6f}" for x, y in curve.points)
    return "\n".join(lines) + "\n"
