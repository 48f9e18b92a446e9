"""Decision rules that turn fuzzy scores into BN/EN labels."""

from dataclasses import dataclass

import numpy as np

from .corpus import Label
from .errors import DegenerateInputError, InvalidInputError

GRID_STEPS = 100  # theta grid 0.00, 0.01, ..., 1.00


def _check_score(score):
    if not 0.0 <= score <= 1.0:
        raise InvalidInputError(f"score {score!r} is outside [0, 1]")


def round_predict(score):
    _check_score(score)
    return Label.EN if score >= 0.5 else Label.BN


@dataclass(frozen=True)
class ThresholdRule:
    """``score <= theta`` is BN, anything above is EN."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidInputError(f"theta {self.theta!r} is outside [0, 1]")


def apply_threshold(rule, score):
    return Label.BN if score <= rule.theta else Label.EN


def threshold_grid(steps=GRID_STEPS):
    return [k / steps for k in range(steps + 1)]


def _targets(labels):
    y = np.array([Label.parse(lab).target for lab in labels])
    if len(y) == 0 or y.min() == y.max():
        raise DegenerateInputError("need scores for both BN and EN words")
    return y


def fit_threshold(scores, labels, steps=GRID_STEPS):
    """Brute-force the accuracy-maximizing theta on a 1/steps grid.

    Returns ``(ThresholdRule, accuracy)``; ties go to the smallest theta.
    """
    s = np.asarray(scores, dtype=float)
    y = _targets(labels)
    if len(s) != len(y):
        raise InvalidInputError("scores and labels differ in length")
    grid = np.array(threshold_grid(steps))
    pred_en = s[None, :] > grid[:, None]
    acc = (pred_en == (y[None, :] == 1)).mean(axis=1)
    k = int(np.argmax(acc))  # first maximum = smallest theta
    return ThresholdRule(float(grid[k])), float(acc[k])


@dataclass(frozen=True)
class StackerModel:
    w1: float
    w2: float
    b: float

    def linear(self, s_char, s_phon):
        return self.w1 * s_char + self.w2 * s_phon + self.b


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_stacker(pairs, labels, lr=1.0, epochs=3000, seed=0):
    """Logistic regression on (char score, phonetic score) pairs.

    Full-batch gradient descent on mean cross-entropy from a zero start,
    so the fit is fully deterministic; ``seed`` is accepted for interface
    parity with the other trainers and does not change the result.
    """
    X = np.asarray(pairs, dtype=float).reshape(-1, 2)
    y = _targets(labels).astype(float)
    if len(X) != len(y):
        raise InvalidInputError("pairs and labels differ in length")
    w = np.zeros(2)
    b = 0.0
    n = len(y)
    for _ in range(epochs):
        p = _sigmoid(X @ w + b)
        err = p - y
        w -= lr * (X.T @ err) / n
        b -= lr * err.sum() / n
    return StackerModel(float(w[0]), float(w[1]), float(b))


def stacker_loss(model, pairs, labels):
    X = np.asarray(pairs, dtype=float).reshape(-1, 2)
    y = np.array([Label.parse(lab).target for lab in labels], dtype=float)
    p = np.clip(_sigmoid(X @ np.array([model.w1, model.w2]) + model.b), 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def predict_stacker(model, s_char, s_phon):
    """``(label, fuzzy)`` with EN iff the fuzzy value is at least 0.5."""
    _check_score(s_char)
    _check_score(s_phon)
    fuzzy = float(_sigmoid(model.linear(s_char, s_phon)))
    return (Label.EN if fuzzy >= 0.5 else Label.BN), fuzzy


def ensemble_mean(s_char, s_phon):
    _check_score(s_char)
    _check_score(s_phon)
    return (s_char + s_phon) / 2.0
