"""Accuracy-matrix bookkeeping over an incremental task sequence.

Reports use 1-based task indices; internally rows and columns are
0-based.  R[t][i] is the accuracy on task i's test set after training
task t, defined only for i <= t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EvaluationError, ProtocolError


@dataclass
class AccuracyMatrix:
    """Lower-triangular accuracy records; missing cells stay absent."""

    T: int
    entries: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.T < 1:
            raise ConfigurationError("task count must be positive")

    def record(self, after_task: int, eval_task: int, accuracy: float) -> None:
        if not 0 <= eval_task <= after_task < self.T:
            raise ProtocolError(
                f"cell ({after_task}, {eval_task}) is outside the lower triangle"
            )
        if not 0.0 <= accuracy <= 1.0:
            raise EvaluationError(f"accuracy {accuracy} outside [0, 1]")
        self.entries[(after_task, eval_task)] = float(accuracy)

    def get(self, after_task: int, eval_task: int) -> float:
        key = (after_task, eval_task)
        if key not in self.entries:
            raise ProtocolError(f"cell {key} has not been recorded")
        return self.entries[key]

    def row(self, after_task: int) -> list[float]:
        return [self.get(after_task, i) for i in range(after_task + 1)]

    def row_complete(self, after_task: int) -> bool:
        return all(
            (after_task, i) in self.entries for i in range(after_task + 1)
        )


def evaluate_task(predict_fn, features, labels) -> float:
    """Fraction of samples whose predicted class equals the label.

    predict_fn maps a feature batch to predicted class ids and must
    range over every class seen so far (task-agnostic evaluation).
    """
    X = np.asarray(features)
    y = np.asarray(labels)
    if X.shape[0] == 0:
        raise EvaluationError("empty test set")
    predicted = np.asarray(predict_fn(X))
    if predicted.shape != y.shape:
        raise EvaluationError("prediction count does not match label count")
    return float(np.mean(predicted == y))


def average_accuracy(matrix: AccuracyMatrix, after_task: int) -> float:
    """A_t: mean of row t over tasks 0..t (1-based t in reports)."""
    if not matrix.row_complete(after_task):
        raise ProtocolError(f"row {after_task} is incomplete")
    row = matrix.row(after_task)
    return float(sum(row) / len(row))


def final_average_accuracy(matrix: AccuracyMatrix) -> float:
    return average_accuracy(matrix, matrix.T - 1)


def balanced_accuracy(predictions, labels) -> float:
    """Unweighted mean of per-class recall."""
    y = np.asarray(labels)
    p = np.asarray(predictions)
    if y.size == 0:
        raise EvaluationError("empty label set")
    if p.shape != y.shape:
        raise EvaluationError("prediction count does not match label count")
    recalls = []
    for c in np.unique(y):
        mask = y == c
        recalls.append(float(np.mean(p[mask] == c)))
    return float(np.mean(recalls))
