"""Char + phonetic network pair with its tuned combiners, stored as one file."""

from dataclasses import dataclass
import json

import numpy as np

from . import neural
from .decision import StackerModel, ThresholdRule, apply_threshold, predict_stacker
from .encoder import Scheme
from .errors import ModelFormatError, SchemeMismatchError

FORMAT = "codemix-lid/ensemble"
FORMAT_VERSION = 1


@dataclass
class Ensemble:
    char_net: neural.LstmNetwork
    phon_net: neural.LstmNetwork
    stacker: StackerModel = None
    mean_rule: ThresholdRule = None

    def __post_init__(self):
        if self.char_net.config.scheme is not Scheme.CHAR:
            raise SchemeMismatchError("first ensemble member must be a char model")
        if self.phon_net.config.scheme is not Scheme.PHONETIC:
            raise SchemeMismatchError("second ensemble member must be a phonetic model")

    def pair_scores(self, words, lib=None):
        return np.stack([neural.score_words(self.char_net, words, lib),
                         neural.score_words(self.phon_net, words, lib)], axis=1).reshape(-1, 2)

    def predict(self, words, method, lib=None):
        """``(labels, fuzzy values)`` under ``stack`` or ``mean-threshold``."""
        pairs = self.pair_scores(words, lib)
        if method == "stack":
            if self.stacker is None:
                raise ModelFormatError("ensemble has no fitted stacker; run tune --method stack")
            out = [predict_stacker(self.stacker, a, b) for a, b in pairs]
            return [o[0] for o in out], np.array([o[1] for o in out])
        if method == "mean-threshold":
            if self.mean_rule is None:
                raise ModelFormatError("ensemble has no mean threshold; run tune --method mean-threshold")
            means = pairs.mean(axis=1)
            return [apply_threshold(self.mean_rule, m) for m in means], means
        raise ValueError(f"unknown ensemble method {method!r}")


def save_ensemble(ens, path):
    d = {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "char_model": neural.to_dict(ens.char_net),
        "phonetic_model": neural.to_dict(ens.phon_net),
        "stacker": None if ens.stacker is None else
        {"w1": ens.stacker.w1, "w2": ens.stacker.w2, "b": ens.stacker.b},
        "mean_threshold": None if ens.mean_rule is None else ens.mean_rule.theta,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d, fh)
        fh.write("\n")


def from_dict(d):
    if d.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported ensemble version {d.get('version')!r}")
    try:
        st = d.get("stacker")
        theta = d.get("mean_threshold")
        return Ensemble(
            neural.from_dict(d["char_model"]),
            neural.from_dict(d["phonetic_model"]),
            None if st is None else StackerModel(float(st["w1"]), float(st["w2"]), float(st["b"])),
            None if theta is None else ThresholdRule(float(theta)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt ensemble file: {exc}") from exc

