"""Confusion matrices, accuracy / precision / recall / F1, and plot-ready
CSV exports."""

import csv
from dataclasses import dataclass

from .corpus import Label
from .errors import InvalidInputError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed by (true label, predicted label)."""

    bn_bn: int = 0
    bn_en: int = 0
    en_bn: int = 0
    en_en: int = 0

    def __post_init__(self):
        if min(self.cells()) < 0:
            raise InvalidInputError("confusion matrix cells must be non-negative")

    def cells(self):
        return (self.bn_bn, self.bn_en, self.en_bn, self.en_en)

    @property
    def total(self):
        return sum(self.cells())

    @classmethod
    def parse(cls, text):
        """From ``"bn_bn,bn_en,en_bn,en_en"``."""
        try:
            vals = [int(v) for v in text.split(",")]
        except ValueError:
            raise InvalidInputError(f"bad confusion matrix {text!r}") from None
        if len(vals) != 4:
            raise InvalidInputError(f"confusion matrix needs 4 counts, got {len(vals)}")
        return cls(*vals)

    def transposed(self):
        return ConfusionMatrix(self.bn_bn, self.en_bn, self.bn_en, self.en_en)


def confusion(predictions, truths):
    if len(predictions) != len(truths):
        raise InvalidInputError(f"{len(predictions)} predictions for {len(truths)} truths")
    counts = {(t, p): 0 for t in Label for p in Label}
    for p, t in zip(predictions, truths):
        counts[Label.parse(t), Label.parse(p)] += 1
    return ConfusionMatrix(counts[Label.BN, Label.BN], counts[Label.BN, Label.EN],
                           counts[Label.EN, Label.BN], counts[Label.EN, Label.EN])


@dataclass(frozen=True)
class MetricsReport:
    """All values in percent."""

    accuracy: float
    precision: float
    recall: float
    f1: float
    macro_f1: float
    positive: Label


def _ratio(num, den):
    return num / den if den else 0.0


def _prf(cm, positive):
    if positive is Label.EN:
        tp, fp, fn = cm.en_en, cm.bn_en, cm.en_bn
    else:
        tp, fp, fn = cm.bn_bn, cm.en_bn, cm.bn_en
    p = _ratio(tp, tp + fp)
    r = _ratio(tp, tp + fn)
    return p, r, _ratio(2 * p * r, p + r)


def compute_metrics(cm, positive_class=Label.EN):
    positive = Label.parse(positive_class)
    if cm.total == 0:
        raise InvalidInputError("cannot score an empty confusion matrix")
    p, r, f1 = _prf(cm, positive)
    other = Label.BN if positive is Label.EN else Label.EN
    f1_other = _prf(cm, other)[2]
    acc = (cm.bn_bn + cm.en_en) / cm.total
    return MetricsReport(100 * acc, 100 * p, 100 * r, 100 * f1, 100 * (f1 + f1_other) / 2, positive)


def export_scatter(scores, labels, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["index", "score", "label"])
        for k, (s, lab) in enumerate(zip(scores, labels)):
            out.writerow([k, f"{float(s):.12f}", Label.parse(lab).value])


def read_scatter(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["score"]) for r in rows], [Label.parse(r["label"]) for r in rows]


COLUMNS = ("Acc", "Prec", "Rec", "F1", "MacroF1")


def results_table(rows):
    """Fixed-width text table: one line per ``(name, MetricsReport)``."""
    width = max([len("Model")] + [len(name) for name, _ in rows])
    lines = ["  ".join([f"{'Model':<{width}}"] + [f"{c:>7}" for c in COLUMNS])]
    for name, r in rows:
        vals = (r.accuracy, r.precision, r.recall, r.f1, r.macro_f1)
        lines.append("  ".join([f"{name:<{width}}"] + [f"{v:>7.2f}" for v in vals]))
    return "\n".join(lines) + "\n"


def report_dict(report):
    return {
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "macro_f1": report.macro_f1,
        "positive_class": report.positive.value,
    }
