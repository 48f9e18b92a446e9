"""Word encoders: character-index and root-phone sequences, and their
pre-padded one-hot tensors for the LSTM."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .phonelib import MAX_PHONE_LEN, default_library

SEQ_LEN = 15


class Scheme(str, Enum):
    CHAR = "char"
    PHONETIC = "phonetic"

    @property
    def vocab_dim(self):
        # column 0 is never set: pads are all-zero rows
        return 27 if self is Scheme.CHAR else 36


@dataclass(frozen=True)
class EncodedWord:
    scheme: Scheme
    indices: tuple
    source_word: str


@dataclass(frozen=True)
class PaddedTensor:
    scheme: Scheme
    rows: np.ndarray  # (SEQ_LEN, vocab_dim)
    truncated: bool = False

    @property
    def seq_len(self):
        return self.rows.shape[0]

    @property
    def vocab_dim(self):
        return self.rows.shape[1]

    def indices(self):
        """Recover the index sequence from the non-pad rows."""
        live = self.rows.any(axis=1)
        return [int(i) for i in self.rows[live].argmax(axis=1)]


def _check_word(word):
    if not word or not all("a" <= ch <= "z" for ch in word):
        raise InvalidInputError(f"cannot encode {word!r}: need a non-empty word of a-z letters")


def encode_char(word):
    _check_word(word)
    return EncodedWord(Scheme.CHAR, tuple(ord(ch) - 96 for ch in word), word)


def phonetic_trace(word, lib=None):
    """Greedy scan yielding ``(position, window, index)`` per emitted index.

    ``window`` is the number of characters consumed. Windows of 3, 2, 1
    are tried in that order and the first library hit wins; a single
    character with no hit emits the OOV index.
    """
    _check_word(word)
    lib = lib or default_library()
    steps = []
    pos = 0
    n = len(word)
    while pos < n:
        for j in range(min(MAX_PHONE_LEN, n - pos), 0, -1):
            idx = lib.lookup(word[pos:pos + j])
            if idx is not None:
                steps.append((pos, j, idx))
                pos += j
                break
        else:
            steps.append((pos, 1, lib.oov_index))
            pos += 1
    return steps


def encode_phonetic(word, lib=None):
    steps = phonetic_trace(word, lib)
    return EncodedWord(Scheme.PHONETIC, tuple(s[2] for s in steps), word)


def encode(word, scheme, lib=None):
    scheme = Scheme(scheme)
    if scheme is Scheme.CHAR:
        return encode_char(word)
    return encode_phonetic(word, lib)


def pad_and_onehot(enc, seq_len=SEQ_LEN):
    """Pre-pad with zero rows to ``seq_len`` and one-hot each index.

    Sequences longer than ``seq_len`` keep their last ``seq_len`` indices
    and come back flagged ``truncated``.
    """
    idx = list(enc.indices)
    truncated = len(idx) > seq_len
    if truncated:
        idx = idx[-seq_len:]
    rows = np.zeros((seq_len, enc.scheme.vocab_dim))
    offset = seq_len - len(idx)
    for t, i in enumerate(idx):
        rows[offset + t, i] = 1.0
    return PaddedTensor(enc.scheme, rows, truncated)


def encode_batch(words, scheme, lib=None, seq_len=SEQ_LEN):
    """Stack padded one-hot encodings into an array of shape (N, seq_len, vocab)."""
    scheme = Scheme(scheme)
    out = np.zeros((len(words), seq_len, scheme.vocab_dim))
    for k, w in enumerate(words):
        out[k] = pad_and_onehot(encode(w, scheme, lib), seq_len).rows
    return out


def oov_count(words, lib=None):
    lib = lib or default_library()
    return sum(encode_phonetic(w, lib).indices.count(lib.oov_index) for w in words)
