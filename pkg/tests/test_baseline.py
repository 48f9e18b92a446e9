from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from codemix_lid.baseline import (LinearSvmModel, NgramVocabulary, extract_ngrams, load_svm, predict_svm,
                                  save_svm, train_svm, vectorize)
from codemix_lid.corpus import Label, LabeledWord
from codemix_lid.errors import DegenerateInputError, InvalidInputError


def test_extract_examples():
    assert extract_ngrams("good", 2) == Counter({"go": 1, "oo": 1, "od": 1})
    assert extract_ngrams("good", 4) == Counter({"good": 1})
    assert extract_ngrams("abc", 4) == Counter()
    with pytest.raises(InvalidInputError):
        extract_ngrams("good", 5)


@given(st.text(alphabet="abcde", min_size=1, max_size=12), st.sampled_from([2, 3, 4]))
def test_extract_count(word, n):
    assert sum(extract_ngrams(word, n).values()) == max(0, len(word) - n + 1)


def test_vectorize():
    v = NgramVocabulary.build(["good"])
    counts = vectorize("good", v)
    assert sorted(counts.values()) == [1] * 6  # go oo od goo ood good
    assert vectorize("xyz", v) == {}
    assert vectorize("oooo", NgramVocabulary({"oo": 0})) == {0: 3}


def separable():
    # BN words use only a-m, EN words only n-z
    bn = ["abcab", "mikal", "gaddi", "halkim", "jemba", "bacfe", "elkim", "dagma"]
    en = ["tory", "wuzzy", "nopq", "sturv", "ryxtu", "vowst", "quorn", "zyptu"]
    return [LabeledWord(w, Label.BN) for w in bn] + [LabeledWord(w, Label.EN) for w in en]


def test_separable_training():
    words = separable()
    model = train_svm(words, lam=1e-3, epochs=30, seed=1)
    assert all(predict_svm(model, lw.word)[0] is lw.label for lw in words)


def test_objective_running_minimum():
    model = train_svm(separable(), lam=1e-3, epochs=30, seed=1)
    hist = model.objective_history
    assert len(hist) == 30 and all(np.isfinite(hist))
    running = np.minimum.accumulate(hist)
    assert (np.diff(running) <= 0).all()
    assert running[-1] < hist[0] or hist[0] == 0


def test_single_class():
    with pytest.raises(DegenerateInputError):
        train_svm([LabeledWord("abc", Label.BN), LabeledWord("abd", Label.BN)])


def test_deterministic():
    a = train_svm(separable(), seed=4)
    b = train_svm(separable(), seed=4)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_tie_goes_to_bn():
    v = NgramVocabulary.build(["abc"])
    model = LinearSvmModel(v, np.zeros(len(v)), 0.0, 1e-4)
    assert predict_svm(model, "abc") == (Label.BN, 0.0)
    model.bias = 0.5
    assert predict_svm(model, "zzz")[0] is Label.EN
    model.bias = -0.5
    assert predict_svm(model, "zzz")[0] is Label.BN


def test_save_load(tmp_path):
    model = train_svm(separable(), seed=2)
    path = str(tmp_path / "svm.json")
    save_svm(model, path)
    back = load_svm(path)
    assert back.vocab.index == model.vocab.index
    assert np.array_equal(back.weights, model.weights)
    for lw in separable():
        assert predict_svm(back, lw.word) == predict_svm(model, lw.word)
