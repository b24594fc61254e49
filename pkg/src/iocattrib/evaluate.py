"""Stratified k-fold cross-validation, effectiveness metrics, and the
per-actor failure analysis.

Metrics follow the support-weighted convention: weighted recall equals
accuracy on full-coverage evaluations, and the headline F-measure is the
harmonic mean of weighted precision and weighted recall.  Macro averages
are reported alongside, computed only over classes present in the truth.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, ValidationError
from .featurize import Dataset
from .folds import plain_assignment, stratified_assignment
from .models import ModelSpec, fit
from .streams import keyed_stream


@dataclass(frozen=True)
class CvConfig:
    k: int = 10
    seed: int = 0
    stratified: bool = True

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValidationError("cross-validation needs k >= 2")


@dataclass(frozen=True)
class MetricsReport:
    model: str
    classes: tuple[str, ...]
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    precision_macro: float
    recall_macro: float
    f_measure: float
    confusion: np.ndarray  # rows = truth, columns = predicted
    per_class_recall: dict[str, float]
    fold_accuracies: tuple[float, ...] = ()
    wall_time_s: float = 0.0
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "classes": list(self.classes),
            "accuracy": self.accuracy,
            "precision_weighted": self.precision_weighted,
            "recall_weighted": self.recall_weighted,
            "precision_macro": self.precision_macro,
            "recall_macro": self.recall_macro,
            "f_measure": self.f_measure,
            "confusion": self.confusion.tolist(),
            "per_class_recall": dict(self.per_class_recall),
            "fold_accuracies": list(self.fold_accuracies),
            "wall_time_s": self.wall_time_s,
            "warnings": list(self.warnings),
        }

    @staticmethod
    def from_dict(data: dict) -> "MetricsReport":
        return MetricsReport(
            model=data["model"],
            classes=tuple(data["classes"]),
            accuracy=data["accuracy"],
            precision_weighted=data["precision_weighted"],
            recall_weighted=data["recall_weighted"],
            precision_macro=data["precision_macro"],
            recall_macro=data["recall_macro"],
            f_measure=data["f_measure"],
            confusion=np.array(data["confusion"], dtype=np.int64),
            per_class_recall=dict(data["per_class_recall"]),
            fold_accuracies=tuple(data["fold_accuracies"]),
            wall_time_s=data["wall_time_s"],
            warnings=tuple(data.get("warnings", [])),
        )


def kfold_split(dataset: Dataset, cv: CvConfig) -> np.ndarray:
    """Fold index per instance; sizes differ by at most one.

    Stratified mode deals each class's instances round-robin across
    folds after a seeded shuffle, so a class with m <= k members covers
    exactly m distinct folds.
    """
    n = len(dataset)
    if cv.k > n:
        raise ValidationError(f"k={cv.k} exceeds the instance count {n}")
    stream = keyed_stream(cv.seed, "kfold", cv.k)
    if cv.stratified:
        _, y, _ = dataset.to_arrays()
        return stratified_assignment(y, cv.k, stream)
    return plain_assignment(n, cv.k, stream)


def compute_metrics(
    truth: list[str], predicted: list[str], classes: tuple[str, ...]
) -> MetricsReport:
    """Confusion matrix and averaged metrics for one prediction batch."""
    if len(truth) != len(predicted):
        raise ValidationError("truth and prediction lists differ in length")
    index = {c: i for i, c in enumerate(classes)}
    for label in truth:
        if label not in index:
            raise ValidationError(f"truth label {label!r} not in class list")
    for label in predicted:
        if label not in index:
            raise ValidationError(f"predicted label {label!r} not in class list")
    n_classes = len(classes)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(truth, predicted):
        confusion[index[t], index[p]] += 1

    support = confusion.sum(axis=1)
    predicted_count = confusion.sum(axis=0)
    diag = np.diag(confusion).astype(float)
    total = confusion.sum()
    accuracy = float(diag.sum() / total) if total else 0.0

    with np.errstate(invalid="ignore", divide="ignore"):
        recall_c = np.where(support > 0, diag / support, 0.0)
        precision_c = np.where(predicted_count > 0, diag / predicted_count, 0.0)

    present = support > 0
    weights = support / support.sum()
    precision_weighted = float((weights * precision_c).sum())
    recall_weighted = float((weights * recall_c).sum())
    precision_macro = float(precision_c[present].mean()) if present.any() else 0.0
    recall_macro = float(recall_c[present].mean()) if present.any() else 0.0
    if precision_weighted + recall_weighted > 0:
        f_measure = 2.0 * precision_weighted * recall_weighted / (precision_weighted + recall_weighted)
    else:
        f_measure = 0.0

    return MetricsReport(
        model="",
        classes=classes,
        accuracy=accuracy,
        precision_weighted=precision_weighted,
        recall_weighted=recall_weighted,
        precision_macro=precision_macro,
        recall_macro=recall_macro,
        f_measure=f_measure,
        confusion=confusion,
        per_class_recall={c: float(recall_c[i]) for i, c in enumerate(classes) if present[i]},
    )


def cross_validate(spec: ModelSpec, dataset: Dataset, cv: CvConfig) -> MetricsReport:
    """Fit on k-1 folds, predict the held-out fold, pool all predictions."""
    fold = kfold_split(dataset, cv)
    classes = dataset.classes
    X, _, _ = dataset.to_arrays()
    labels = list(dataset.labels)

    truth: list[str] = []
    predicted: list[str] = []
    fold_accuracies: list[float] = []
    warnings: list[str] = []
    started = time.perf_counter()
    for f in range(cv.k):
        test_idx = np.flatnonzero(fold == f)
        train_idx = np.flatnonzero(fold != f)
        if len(test_idx) == 0:
            continue
        train_set = dataset.subset(train_idx)
        if len(set(train_set.labels)) < 2:
            raise ModelError(f"training split for fold {f} has fewer than 2 classes")
        model = fit(spec, train_set)
        warnings.extend(model.warnings)
        scores = model.predict_scores_matrix(X[test_idx])
        fold_pred = [model.classes[i] for i in np.argmax(scores, axis=1)]
        fold_truth = [labels[i] for i in test_idx]
        fold_accuracies.append(
            sum(t == p for t, p in zip(fold_truth, fold_pred)) / len(fold_truth)
        )
        truth.extend(fold_truth)
        predicted.extend(fold_pred)
    wall_time = time.perf_counter() - started

    core = compute_metrics(truth, predicted, classes)
    return MetricsReport(
        model=spec.label,
        classes=classes,
        accuracy=core.accuracy,
        precision_weighted=core.precision_weighted,
        recall_weighted=core.recall_weighted,
        precision_macro=core.precision_macro,
        recall_macro=core.recall_macro,
        f_measure=core.f_measure,
        confusion=core.confusion,
        per_class_recall=core.per_class_recall,
        fold_accuracies=tuple(fold_accuracies),
        wall_time_s=wall_time,
        warnings=tuple(dict.fromkeys(warnings)),
    )


@dataclass(frozen=True)
class LevelGap:
    best_high: tuple[str, float]
    best_low: tuple[str, float]
    gap: float
    rows: tuple[tuple[str, float | None, float | None], ...]

    def to_dict(self) -> dict:
        return {
            "best_high": list(self.best_high),
            "best_low": list(self.best_low),
            "gap": self.gap,
            "rows": [list(r) for r in self.rows],
        }


def compare_levels(high: list[MetricsReport], low: list[MetricsReport]) -> LevelGap:
    """Best accuracy per level, their gap, and a side-by-side table."""
    if not high or not low:
        raise ValidationError("both report lists must be non-empty")
    best_high = max(high, key=lambda r: r.accuracy)
    best_low = max(low, key=lambda r: r.accuracy)
    names = list(dict.fromkeys([r.model for r in high] + [r.model for r in low]))
    high_by = {r.model: r.accuracy for r in high}
    low_by = {r.model: r.accuracy for r in low}
    rows = tuple((name, high_by.get(name), low_by.get(name)) for name in names)
    return LevelGap(
        best_high=(best_high.model, best_high.accuracy),
        best_low=(best_low.model, best_low.accuracy),
        gap=best_high.accuracy - best_low.accuracy,
        rows=rows,
    )


@dataclass(frozen=True)
class PerClassReport:
    """Classes by ascending recall, annotated with original profile size."""

    rows: tuple[tuple[str, float, int], ...]  # (class, recall, n1)
    failing: tuple[str, ...]  # recall exactly zero
    overall_mean_recall: float
    sparse_mean_recall: float | None  # mean recall where n1 <= 2
    sparse_threshold: int = 2

    def to_dict(self) -> dict:
        return {
            "rows": [list(r) for r in self.rows],
            "failing": list(self.failing),
            "overall_mean_recall": self.overall_mean_recall,
            "sparse_mean_recall": self.sparse_mean_recall,
            "sparse_threshold": self.sparse_threshold,
        }


def per_class_report(report: MetricsReport, dataset: Dataset, sparse_threshold: int = 2) -> PerClassReport:
    """Relate per-class recall to the class's original profile size n1."""
    n1_by_class: dict[str, int] = {}
    for inst in dataset.originals():
        n1_by_class[inst.label] = inst.vector.positive_count
    rows = []
    for cls, recall in report.per_class_recall.items():
        rows.append((cls, recall, n1_by_class.get(cls, 0)))
    rows.sort(key=lambda r: (r[1], r[0]))
    recalls = [r[1] for r in rows]
    sparse = [r[1] for r in rows if r[2] <= sparse_threshold]
    return PerClassReport(
        rows=tuple(rows),
        failing=tuple(r[0] for r in rows if r[1] == 0.0),
        overall_mean_recall=float(np.mean(recalls)) if recalls else 0.0,
        sparse_mean_recall=float(np.mean(sparse)) if sparse else None,
        sparse_threshold=sparse_threshold,
    )
