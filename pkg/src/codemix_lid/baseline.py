"""Character n-gram bag-of-words features and a linear SVM trained with
Pegasos-style stochastic subgradient descent."""

from collections import Counter
from dataclasses import dataclass, field
import json
import random

import numpy as np

from .corpus import Label
from .errors import DegenerateInputError, InvalidInputError, ModelFormatError

NGRAM_SIZES = (2, 3, 4)
FORMAT = "codemix-lid/svm"
FORMAT_VERSION = 1


def extract_ngrams(word, n):
    if n not in NGRAM_SIZES:
        raise InvalidInputError(f"n-gram size must be one of {NGRAM_SIZES}, got {n}")
    return Counter(word[i:i + n] for i in range(len(word) - n + 1))


def word_ngrams(word):
    grams = Counter()
    for n in NGRAM_SIZES:
        grams.update(extract_ngrams(word, n))
    return grams


@dataclass
class NgramVocabulary:
    index: dict = field(default_factory=dict)

    @classmethod
    def build(cls, words):
        index = {}
        for w in words:
            for n in NGRAM_SIZES:
                for i in range(len(w) - n + 1):
                    index.setdefault(w[i:i + n], len(index))
        return cls(index)

    def __len__(self):
        return len(self.index)

    def grams(self):
        return sorted(self.index, key=self.index.get)


def vectorize(word, vocab):
    """Sparse count vector as a ``{feature index: count}`` dict."""
    out = {}
    for g, c in word_ngrams(word).items():
        k = vocab.index.get(g)
        if k is not None:
            out[k] = out.get(k, 0) + c
    return out


def _as_arrays(vec):
    keys = sorted(vec)
    return np.array(keys, dtype=int), np.array([vec[k] for k in keys], dtype=float)


@dataclass
class LinearSvmModel:
    vocab: NgramVocabulary
    weights: np.ndarray
    bias: float
    lam: float
    objective_history: list = field(default_factory=list)

    def margin(self, word):
        idx, val = _as_arrays(vectorize(word, self.vocab))
        return float(self.weights[idx] @ val + self.bias) if len(idx) else float(self.bias)


def hinge_objective(model, samples):
    w = model.weights
    losses = [max(0.0, 1.0 - y * (w[idx] @ val + model.bias)) for idx, val, y in samples]
    return 0.5 * model.lam * float(w @ w) + float(np.mean(losses))


def train_svm(words, lam=1e-4, epochs=50, seed=0):
    """Fit a linear SVM on labelled words (BN -> -1, EN -> +1).

    The bias is learned as the weight of a constant feature, so it shares
    the Pegasos step size 1/(lam * t).
    """
    labels = {lw.label for lw in words}
    if labels != {Label.BN, Label.EN}:
        raise DegenerateInputError("SVM training needs both BN and EN words")
    vocab = NgramVocabulary.build(lw.word for lw in words)
    samples = []
    for lw in words:
        idx, val = _as_arrays(vectorize(lw.word, vocab))
        samples.append((idx, val, 1.0 if lw.label is Label.EN else -1.0))

    d = len(vocab)
    v = np.zeros(d + 1)  # last slot is the bias
    scale = 1.0  # w = scale * v, so the shrink step is O(1)
    rng = random.Random(seed)
    order = list(range(len(samples)))
    t = 0
    history = []
    model = LinearSvmModel(vocab, np.zeros(d), 0.0, lam)
    for _ in range(epochs):
        rng.shuffle(order)
        for k in order:
            t += 1
            idx, val, y = samples[k]
            eta = 1.0 / (lam * t)
            m = y * scale * (v[idx] @ val + v[d])
            shrink = 1.0 - eta * lam
            if shrink <= 0.0:
                v[:] = 0.0
                scale = 1.0
            else:
                scale *= shrink
            if m < 1.0:
                step = eta * y / scale
                v[idx] += step * val
                v[d] += step
            if scale < 1e-9:
                v *= scale
                scale = 1.0
        model.weights = scale * v[:d]
        model.bias = float(scale * v[d])
        history.append(hinge_objective(model, samples))
    model.weights = model.weights.copy()
    model.objective_history = history
    return model


def predict_svm(model, word):
    """``(label, margin)``; a margin of exactly zero goes to BN."""
    m = model.margin(word)
    return (Label.EN if m > 0 else Label.BN), m


def save_svm(model, path):
    d = {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "lambda": model.lam,
        "vocabulary": model.vocab.grams(),
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "objective_history": model.objective_history,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d, fh)
        fh.write("\n")


def load_svm(path):
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        if d.get("format") != FORMAT:
            raise ModelFormatError(f"{path} is not an SVM model file")
        if d.get("version") != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported SVM model version {d.get('version')!r}")
        vocab = NgramVocabulary({g: i for i, g in enumerate(d["vocabulary"])})
        weights = np.array(d["weights"], dtype=float)
        if weights.shape != (len(vocab),):
            raise ModelFormatError("weight vector does not match the vocabulary")
        return LinearSvmModel(vocab, weights, float(d["bias"]), float(d["lambda"]),
                              list(d.get("objective_history", [])))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ModelFormatError(f"{path}: corrupt SVM model file ({exc})") from exc
