"""End-to-end experiment: both LSTMs, threshold tuning, the two ensembles and
the SVM baseline, evaluated on one corpus split."""

from dataclasses import dataclass, field
import logging
import os
import time

import numpy as np

from . import baseline, neural
from .corpus import generate_synthetic, root_phone_frequency, split_corpus, write_frequency_csv, write_manifest
from .decision import apply_threshold, fit_stacker, fit_threshold, round_predict
from .encoder import Scheme
from .ensemble import Ensemble, save_ensemble
from .metrics import compute_metrics, confusion, export_scatter, results_table

log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    split: object
    reports: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    networks: dict = field(default_factory=dict)
    ensemble: Ensemble = None
    svm: object = None
    seconds: float = 0.0

    def table(self):
        return results_table(list(self.reports.items()))


def _score(result, name, preds, truths, positive):
    cm = confusion(preds, truths)
    result.matrices[name] = cm
    result.reports[name] = compute_metrics(cm, positive)


def run_experiment(split, seed=0, epochs=500, batch_size=1658, lr=0.001,
                   svm_lambda=1e-4, svm_epochs=50, positive="EN", lib=None, out_dir=None):
    t0 = time.time()
    res = PipelineResult(split)
    dev_truth = [lw.label for lw in split.dev]
    test_truth = [lw.label for lw in split.test]
    dev_scores, test_scores = {}, {}

    for scheme in (Scheme.CHAR, Scheme.PHONETIC):
        cfg = neural.NetworkConfig(scheme=scheme, epochs=epochs, batch_size=batch_size, lr=lr, seed=seed)
        log.info("training %s LSTM on %d words", scheme.value, len(split.train))
        net = neural.train(cfg, split.train, split.dev, lib=lib).network
        ds = neural.score_words(net, split.dev, lib)
        ts = neural.score_words(net, split.test, lib)
        rule, _ = fit_threshold(ds, dev_truth)
        net.decision = {"method": "threshold", "theta": rule.theta}
        res.networks[scheme.value] = net
        res.thresholds[scheme.value] = rule.theta
        dev_scores[scheme.value], test_scores[scheme.value] = ds, ts
        _score(res, f"{scheme.value}_dev_round", [round_predict(s) for s in ds], dev_truth, positive)
        _score(res, f"{scheme.value}_dev_thresh", [apply_threshold(rule, s) for s in ds], dev_truth, positive)
        _score(res, f"{scheme.value}_test_thresh", [apply_threshold(rule, s) for s in ts], test_truth, positive)

    dev_pairs = np.stack([dev_scores["char"], dev_scores["phonetic"]], axis=1)
    stacker = fit_stacker(dev_pairs, dev_truth, seed=seed)
    mean_rule, _ = fit_threshold(dev_pairs.mean(axis=1), dev_truth)
    res.thresholds["mean"] = mean_rule.theta
    res.ensemble = Ensemble(res.networks["char"], res.networks["phonetic"], stacker, mean_rule)
    stack_lab, _ = res.ensemble.predict(split.test, "stack", lib)
    mean_lab, _ = res.ensemble.predict(split.test, "mean-threshold", lib)
    _score(res, "ensem_stack", stack_lab, test_truth, positive)
    _score(res, "ensem_thresh", mean_lab, test_truth, positive)

    log.info("training SVM baseline")
    res.svm = baseline.train_svm(split.train + split.dev, svm_lambda, svm_epochs, seed)
    _score(res, "svm_baseline", [baseline.predict_svm(res.svm, lw.word)[0] for lw in split.test],
           test_truth, positive)
    res.seconds = time.time() - t0

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_manifest(split, os.path.join(out_dir, "split.tsv"))
        for scheme, net in res.networks.items():
            neural.save_model(net, os.path.join(out_dir, f"{scheme}.lstm.json"))
            export_scatter(dev_scores[scheme], dev_truth, os.path.join(out_dir, f"{scheme}_dev_scatter.csv"))
        export_scatter(dev_pairs.mean(axis=1), dev_truth, os.path.join(out_dir, "ensemble_dev_scatter.csv"))
        save_ensemble(res.ensemble, os.path.join(out_dir, "ensemble.json"))
        baseline.save_svm(res.svm, os.path.join(out_dir, "svm.json"))
        for lab in ("BN", "EN"):
            words = [lw.word for lw in split.train if lw.label.value == lab]
            write_frequency_csv(root_phone_frequency(words, lib),
                                os.path.join(out_dir, f"root_phone_frequency_{lab}.csv"), lib)
        with open(os.path.join(out_dir, "results.txt"), "w", encoding="utf-8") as fh:
            fh.write(res.table())
    return res


# At 0.001 the phonetic net is still underfit after 500 epochs on 1400 words.
SYNTHETIC_LR = 0.01


def run_synthetic(seed=0, n_per_label=1000, counts=(700, 100, 200), **kw):
    kw.setdefault("lr", SYNTHETIC_LR)
    words = generate_synthetic(seed, n_per_label, kw.get("lib"))
    split = split_corpus(words, seed, counts)
    return run_experiment(split, seed=seed, **kw)
