"""Word lists: normalization, loading, splitting, root-phone statistics and a
seeded synthetic corpus for desk-scale experiments."""

import csv
from dataclasses import dataclass, field
from enum import Enum
import random
import re

import numpy as np

from .encoder import encode_phonetic
from .errors import DegenerateInputError, InvalidInputError, SizingError
from .phonelib import N_ROOTS, default_library

MIN_LEN = 3

_ALPHA_RE = re.compile(r"^[a-z]*$")
_RUN_RE = re.compile(r"(.)\1{2,}")


class Label(str, Enum):
    BN = "BN"
    EN = "EN"

    @property
    def target(self):
        return 0 if self is Label.BN else 1

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().upper())
        except ValueError:
            raise InvalidInputError(f"unknown label {text!r} (expected BN or EN)") from None


class Reject(str, Enum):
    NON_ALPHA = "NonAlpha"
    TOO_SHORT = "TooShort"


@dataclass(frozen=True)
class LabeledWord:
    word: str
    label: Label


@dataclass
class DataSplit:
    train: list
    dev: list
    test: list
    counts: dict = field(default_factory=dict)

    def items(self):
        return (("train", self.train), ("dev", self.dev), ("test", self.test))


def check_word(raw):
    """Normalize ``raw``; returns ``(word, None)`` or ``(None, reason)``.

    Order: lowercase, reject non a-z, squash runs longer than two, reject
    words shorter than three.
    """
    w = raw.lower()
    if not _ALPHA_RE.match(w):
        return None, Reject.NON_ALPHA
    w = _RUN_RE.sub(lambda m: m.group(1) * 2, w)
    if len(w) < MIN_LEN:
        return None, Reject.TOO_SHORT
    return w, None


def normalize_word(raw):
    return check_word(raw)[0]


@dataclass
class LoadReport:
    words: list
    rejects: dict

    @property
    def n_rejected(self):
        return sum(self.rejects.values())


def read_words(path, label):
    label = Label.parse(label)
    words, rejects, seen = [], {}, set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            raw = line.strip()
            if not raw:
                continue
            w, why = check_word(raw)
            if why is not None:
                rejects[why] = rejects.get(why, 0) + 1
            elif w not in seen:
                seen.add(w)
                words.append(LabeledWord(w, label))
    return LoadReport(words, rejects)


def load_corpus(bn_path, en_path):
    """Load one BN and one EN word list; returns a LoadReport over both.

    Duplicates are removed within a label only; a word present in both
    files is kept once per label.
    """
    bn = read_words(bn_path, Label.BN)
    en = read_words(en_path, Label.EN)
    rejects = dict(bn.rejects)
    for k, v in en.rejects.items():
        rejects[k] = rejects.get(k, 0) + v
    return LoadReport(bn.words + en.words, rejects)


def split_corpus(words, seed, counts):
    """Seeded shuffle-and-partition into train/dev/test.

    ``counts`` is ``(n_train, n_dev, n_test)`` applied to each label, or a
    dict mapping Label to such a triple. A word string that occurs under
    both labels is pinned to a single split so the splits stay disjoint on
    word strings.
    """
    if not isinstance(counts, dict):
        counts = {Label.BN: tuple(counts), Label.EN: tuple(counts)}
    counts = {Label.parse(k): tuple(v) for k, v in counts.items()}
    rng = random.Random(seed)
    by_label = {lab: [] for lab in Label}
    for lw in words:
        by_label[lw.label].append(lw)

    parts = ([], [], [])
    pinned = {}
    for lab in Label:
        want = counts.get(lab, (0, 0, 0))
        pool = sorted(set(by_label[lab]), key=lambda lw: lw.word)
        if len(pool) < sum(want):
            raise SizingError(f"{lab.value}: requested {sum(want)} words but only {len(pool)} available")
        rng.shuffle(pool)
        room = list(want)
        rest = []
        for lw in pool:
            k = pinned.get(lw.word)
            if k is None:
                rest.append(lw)
            elif room[k] > 0:
                parts[k].append(lw)
                room[k] -= 1
        for lw in rest:
            for k in range(3):
                if room[k] > 0:
                    parts[k].append(lw)
                    room[k] -= 1
                    pinned[lw.word] = k
                    break
        if any(room):
            raise SizingError(f"{lab.value}: not enough words left after pinning shared words")

    split = DataSplit(*(list(p) for p in parts))
    split.counts = {
        name: {lab.value: sum(lw.label is lab for lw in part) for lab in Label}
        for name, part in split.items()
    }
    return split


def write_manifest(split, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for name, part in split.items():
            for lw in part:
                fh.write(f"{lw.word}\t{lw.label.value}\t{name}\n")


def read_manifest(path):
    parts = {"train": [], "dev": [], "test": []}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 3 or cols[2] not in parts:
                raise InvalidInputError(f"{path}:{lineno}: expected word<TAB>label<TAB>train|dev|test")
            w = normalize_word(cols[0])
            if w != cols[0]:
                raise InvalidInputError(f"{path}:{lineno}: {cols[0]!r} is not a normalized word")
            parts[cols[2]].append(LabeledWord(w, Label.parse(cols[1])))
    return DataSplit(parts["train"], parts["dev"], parts["test"])


def root_phone_frequency(words, lib=None):
    """Normalized frequency of each emitted root index over the word list.

    Returns 32 values: roots 1..31 in slots 0..30 and OOV in slot 31.
    """
    lib = lib or default_library()
    counts = np.zeros(N_ROOTS + 1)
    for w in words:
        w = w.word if isinstance(w, LabeledWord) else w
        for i in encode_phonetic(w, lib).indices:
            counts[N_ROOTS if i == lib.oov_index else i - 1] += 1
    total = counts.sum()
    if total == 0:
        raise DegenerateInputError("root-phone frequency is undefined for an empty word list")
    return counts / total


def write_frequency_csv(freq, path, lib=None):
    lib = lib or default_library()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["slot", "phone", "frequency"])
        for k, f in enumerate(freq):
            slot = lib.oov_index if k == N_ROOTS else k + 1
            out.writerow([slot, lib.root_for_index(slot), repr(float(f))])


# Synthetic corpus. Pseudo-BN words alternate consonant and vowel members of
# the phone library, with i/e/o favoured; pseudo-EN words come from a small
# English-like onset/nucleus/coda inventory that leans on a, u and y.
_BN_VOWELS = {"i": 6, "e": 6, "o": 6, "a": 4, "aa": 2, "ee": 1, "u": 2, "oo": 1, "ai": 1, "oi": 1, "ou": 1}
_EN_ONSETS = ("b", "bl", "br", "c", "cl", "cr", "d", "dr", "f", "fl", "fr", "g", "gl", "gr",
              "j", "l", "m", "n", "p", "pl", "pr", "qu", "s", "sc", "sk", "sl", "sm", "sn",
              "sp", "st", "str", "sw", "t", "th", "tr", "tw", "w", "wh", "wr", "y")
_EN_NUCLEI = {"a": 8, "u": 5, "ay": 2, "ea": 2, "y": 2, "oa": 1, "e": 1, "i": 1, "o": 1}
_EN_CODAS = ("ck", "ct", "ft", "ght", "ll", "lt", "mp", "nd", "ng", "nk", "nt", "pt", "rd",
             "rk", "rm", "rn", "rt", "ss", "st", "sk", "x", "ze", "ke", "ve", "ry", "ly", "ty",
             "sh", "tch", "ns", "ps", "ks", "wn", "wl", "")


def _weighted(rng, table):
    keys = list(table)
    return rng.choices(keys, weights=[table[k] for k in keys])[0]


def _pseudo_bn(rng, consonants):
    n = rng.randint(2, 4)
    vowel_next = rng.random() < 0.15
    parts = []
    for _ in range(n):
        parts.append(_weighted(rng, _BN_VOWELS) if vowel_next else rng.choice(consonants))
        vowel_next = not vowel_next
    return "".join(parts)


def _pseudo_en(rng):
    out = []
    for _ in range(rng.choice((1, 1, 2))):
        out.append(rng.choice(_EN_ONSETS) + _weighted(rng, _EN_NUCLEI) + rng.choice(_EN_CODAS))
    return "".join(out)


def generate_synthetic(seed, n, lib=None):
    """``n`` distinct pseudo-BN and ``n`` distinct pseudo-EN words.

    A test fixture with no claim to linguistic realism; no word appears
    under both labels.
    """
    if n < 1:
        raise SizingError("n must be at least 1")
    lib = lib or default_library()
    vowel_members = set(_BN_VOWELS)
    consonants = [m for g in lib.groups for m in g.members if m not in vowel_members
                  and g.root not in ("aa", "i", "u", "e", "ai", "o", "au")]
    rng = random.Random(seed)
    seen = set()
    out = []
    for label, make in ((Label.BN, lambda: _pseudo_bn(rng, consonants)), (Label.EN, lambda: _pseudo_en(rng))):
        got = 0
        while got < n:
            w = normalize_word(make())
            if w is None or w in seen or len(w) > 15:
                continue
            seen.add(w)
            out.append(LabeledWord(w, label))
            got += 1
    return out
