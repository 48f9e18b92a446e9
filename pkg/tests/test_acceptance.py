"""Acceptance gate. Each test prints one PASS/FAIL line; the lines are also
repeated in the pytest terminal summary."""

import random
import string
import time

import pytest

from codemix_lid import cli
from codemix_lid.baseline import load_svm, predict_svm
from codemix_lid.corpus import Label, generate_synthetic, normalize_word, split_corpus, write_manifest
from codemix_lid.decision import fit_threshold
from codemix_lid.encoder import encode_char, encode_phonetic
from codemix_lid.metrics import ConfusionMatrix, compute_metrics
from codemix_lid.neural import NetworkConfig, gradient_check
from codemix_lid.phonelib import default_library, lookup, validate_library
from codemix_lid.pipeline import run_synthetic

BN, EN = Label.BN, Label.EN


def test_encoding_fidelity(criterion):
    t0 = time.perf_counter()
    lib = default_library()
    cases = [
        (encode_char("good"), [7, 15, 15, 4]),
        (encode_char("bad"), [2, 1, 4]),
        (encode_phonetic("khabar", lib), [10, 24, 4]),
        (encode_phonetic("khbr", lib), [10, 24, 4]),
        (encode_phonetic("korchi", lib), [9, 7, 4, 14, 2]),
        (encode_phonetic("krci", lib), [9, 4, 13, 2]),
    ]
    wrong = [(list(got.indices), want) for got, want in cases if list(got.indices) != want]
    secs = time.perf_counter() - t0
    criterion("encoding fidelity", not wrong and secs < 1, f"{len(cases) - len(wrong)}/{len(cases)} exact, {secs:.3f}s")


# (confusion cells bn_bn, bn_en, en_bn, en_en) -> published Acc / Prec / Rec
PUBLISHED = {
    "char test_thresh": ((641, 59, 57, 643), (91.71, 91.59, 91.85)),
    "phonetic test_thresh": ((644, 56, 78, 622), (90.42, 91.74, 88.85)),
    "ensem_stack": ((623, 77, 38, 662), (91.78, 89.58, 94.57)),
    "ensem_thresh": ((667, 33, 74, 626), (92.35, 94.99, 89.42)),
}


def test_metrics_reproduction(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for cells, target in PUBLISHED.values():
        r = compute_metrics(ConfusionMatrix(*cells), positive_class=EN)
        worst = max(worst, *(abs(a - b) for a, b in zip((r.accuracy, r.precision, r.recall), target)))
    secs = time.perf_counter() - t0
    criterion("metrics reproduction", worst <= 0.01 and secs < 1, f"max abs deviation {worst:.4f}, {secs:.3f}s")


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("pipeline")
    t0 = time.perf_counter()
    res = run_synthetic(seed=7, n_per_label=1000, counts=(700, 100, 200), out_dir=str(out))
    return res, out, time.perf_counter() - t0


def test_synthetic_lstm_dev_accuracy(criterion, pipeline_run):
    res, _, _ = pipeline_run
    char = res.reports["char_dev_thresh"].accuracy
    phon = res.reports["phonetic_dev_thresh"].accuracy
    criterion("synthetic: each LSTM >= 95% dev accuracy after tuning", min(char, phon) >= 95,
              f"char {char:.2f}%, phonetic {phon:.2f}%")


def test_synthetic_ensembles_not_worse(criterion, pipeline_run):
    res, _, _ = pipeline_run
    weaker = min(res.reports["char_test_thresh"].accuracy, res.reports["phonetic_test_thresh"].accuracy)
    stack = res.reports["ensem_stack"].accuracy
    mean = res.reports["ensem_thresh"].accuracy
    criterion("synthetic: both ensembles >= weaker single model", min(stack, mean) >= weaker,
              f"stack {stack:.2f}%, mean-threshold {mean:.2f}%, weaker single {weaker:.2f}%")


def test_synthetic_svm_end_to_end(criterion, pipeline_run):
    res, out, _ = pipeline_run
    back = load_svm(str(out / "svm.json"))
    agree = all(predict_svm(back, lw.word) == predict_svm(res.svm, lw.word) for lw in res.split.test)
    acc = res.reports["svm_baseline"].accuracy
    criterion("synthetic: SVM baseline trains and evaluates", agree and acc > 50,
              f"test accuracy {acc:.2f}%, reload agrees: {agree}")


def test_synthetic_pipeline_time(criterion, pipeline_run):
    _, _, secs = pipeline_run
    criterion("synthetic: full pipeline < 10 minutes", secs < 600, f"{secs:.1f}s")


def test_gradient_correctness(criterion):
    t0 = time.perf_counter()
    cfg = NetworkConfig(scheme="char", seq_len=4, vocab_dim=5, hidden=(3, 2))
    errors = [gradient_check(cfg, seed, step=1e-5) for seed in (0, 1, 2)]
    secs = time.perf_counter() - t0
    criterion("gradient check", max(errors) < 1e-4 and secs < 30,
              "max rel error " + ", ".join(f"{e:.2e}" for e in errors) + f", {secs:.2f}s")


def exhaustive_scan(scores, labels):
    best_theta, best_acc = None, -1.0
    for k in range(101):
        theta = k / 100
        acc = sum((BN if s <= theta else EN) is lab for s, lab in zip(scores, labels)) / len(scores)
        if acc > best_acc:
            best_theta, best_acc = theta, acc
    return best_theta, best_acc


def test_threshold_optimality(criterion):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n = rng.randint(2, 60)
        labels = [rng.choice((BN, EN)) for _ in range(n - 2)] + [BN, EN]
        # mix continuous scores with exact grid values to exercise ties
        scores = [rng.random() if rng.random() < 0.7 else rng.randint(0, 100) / 100 for _ in range(n)]
        rule, acc = fit_threshold(scores, labels)
        if exhaustive_scan(scores, labels) != (rule.theta, acc):
            mismatches += 1
    secs = time.perf_counter() - t0
    criterion("threshold optimality", mismatches == 0 and secs < 5, f"{200 - mismatches}/200 exact, {secs:.2f}s")


def test_determinism(criterion, tmp_path):
    split = split_corpus(generate_synthetic(11, 300), 11, (200, 50, 50))
    manifest = str(tmp_path / "split.tsv")
    write_manifest(split, manifest)
    same = []
    for scheme in ("char", "phonetic"):
        files = [tmp_path / f"{scheme}{k}.json" for k in (1, 2)]
        for path in files:
            code = cli.main(["train", "--model", "lstm", "--scheme", scheme, "--manifest", manifest,
                             "--seed", "3", "--epochs", "5", "--batch-size", "64", "--out", str(path)])
            assert code == 0
        same.append(files[0].read_bytes() == files[1].read_bytes())
    criterion("determinism: identical train runs give identical files", all(same),
              f"char {same[0]}, phonetic {same[1]}")


# Root phones and similar-phone groups as published, groups in listing order.
ROOTS = ("aa i u r e ai o au ka kha ga gha ca cha ja jha ta tha da dha na pa pha ba bha ma ya ra la sa ha").split()
GROUPS = [
    "aa a", "i ee", "u w", "r ri", "e", "ai oi", "o oo", "au ou ow", "ka k", "kha kh", "ga g", "gha gh",
    "ca c", "cha ch", "sa s sh", "jha jh", "bha bh v", "ta t", "tha th", "da d", "dha dh", "na n", "pa p",
    "pha ph f", "ba b", "ma m", "ya y", "ra rh", "la l", "ja j z", "ha h",
]


def test_phonelib_validation(criterion):
    lib = default_library()
    violations = validate_library(lib)
    expected = {m: ROOTS.index(g.split()[0]) + 1 for g in GROUPS for m in g.split()}
    wrong = [m for m, idx in expected.items() if lookup(lib, m) != idx]
    extra = sorted(set(lib.members()) - set(expected))
    ok = not violations and not wrong and not extra and tuple(lib.roots) == tuple(ROOTS)
    criterion("phonetic library validation", ok,
              f"{len(violations)} violations, {len(expected) - len(wrong)}/{len(expected)} members map to their root")


def random_raw(rng):
    pools = [string.ascii_lowercase, string.ascii_uppercase, "aeiou", string.digits, " -'_.!@",
             "éßİ"]
    out = []
    for _ in range(rng.randint(0, 14)):
        c = rng.choice(rng.choices(pools, weights=[60, 15, 15, 4, 3, 3])[0])
        out.append(c * rng.choice((1, 1, 1, 2, 3, 5)))
    return "".join(out)


def expected_normal(raw):
    w = raw.lower()
    if not w or any(c not in string.ascii_lowercase for c in w):
        return None
    squashed = []
    for c in w:
        if not (len(squashed) >= 2 and squashed[-1] == squashed[-2] == c):
            squashed.append(c)
    return "".join(squashed) if len(squashed) >= 3 else None


def test_normalization_property(criterion):
    rng = random.Random(99)
    failures = accepted = 0
    for _ in range(10_000):
        raw = random_raw(rng)
        w = normalize_word(raw)
        if w is None:
            failures += expected_normal(raw) is not None
            continue
        accepted += 1
        ok = (all(c in string.ascii_lowercase for c in w) and len(w) >= 3
              and not any(w[i] == w[i + 1] == w[i + 2] for i in range(len(w) - 2))
              and normalize_word(w) == w and w == expected_normal(raw))
        failures += not ok
    criterion("normalization property", failures == 0, f"10000 cases, {accepted} accepted, {failures} failures")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
