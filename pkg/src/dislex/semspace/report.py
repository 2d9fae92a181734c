import json
from dataclasses import dataclass, field

import numpy as np

from .stats import majority_baseline, proportions_test

MIN_CLASS_SIZE = 10


@dataclass
class ClassificationReport:
    """Confusion matrix with rows = actual class, columns = predicted class."""

    classes: list
    confusion: np.ndarray
    accuracy: float
    per_class_accuracy: dict
    majority_baseline: float
    p_value: float
    n: int
    small_classes: list = field(default_factory=list)
    predictions: np.ndarray = field(default=None, repr=False)
    posteriors: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_predictions(cls, classes, y_true, y_pred, min_class_size=MIN_CLASS_SIZE, posteriors=None):
        k = len(classes)
        y_true = np.asarray(y_true, dtype=np.intp)
        y_pred = np.asarray(y_pred, dtype=np.intp)
        confusion = np.zeros((k, k), dtype=np.int64)
        np.add.at(confusion, (y_true, y_pred), 1)
        n = int(y_true.shape[0])
        correct = int(np.trace(confusion))
        row_sums = confusion.sum(axis=1)
        per_class = {
            str(c): (float(confusion[i, i] / row_sums[i]) if row_sums[i] else float("nan"))
            for i, c in enumerate(classes)
        }
        baseline = majority_baseline(y_true.tolist())
        p = proportions_test(correct, n, int(round(baseline * n)), n)
        small = [str(c) for i, c in enumerate(classes) if row_sums[i] < min_class_size]
        return cls(
            classes=[str(c) for c in classes], confusion=confusion, accuracy=correct / n,
            per_class_accuracy=per_class, majority_baseline=baseline, p_value=p, n=n,
            small_classes=small, predictions=y_pred, posteriors=posteriors,
        )

    def to_tsv(self, stream):
        stream.write("actual\\predicted\t" + "\t".join(self.classes) + "\n")
        for c, row in zip(self.classes, self.confusion):
            stream.write(c + "\t" + "\t".join(str(int(v)) for v in row) + "\n")

    def summary(self):
        return {
            "accuracy": self.accuracy,
            "majority_baseline": self.majority_baseline,
            "p_value": self.p_value,
            "N": self.n,
            "classes": self.classes,
            "per_class_accuracy": self.per_class_accuracy,
            "small_classes": self.small_classes,
        }

    def to_json(self, stream):
        json.dump(self.summary(), stream, indent=2, sort_keys=True)
        stream.write("\n")
