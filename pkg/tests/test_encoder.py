import numpy as np
import pytest
from hypothesis import given, strategies as st

from codemix_lid.encoder import (EncodedWord, Scheme, encode_char, encode_phonetic, oov_count,
                                 pad_and_onehot, phonetic_trace)
from codemix_lid.errors import InvalidInputError
from codemix_lid.phonelib import default_library

words = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=20)


def brute_force_phonetic(word, table):
    """Reference greedy scan over a plain dict of member -> root index."""
    out, i = [], 0
    while i < len(word):
        for j in (3, 2, 1):
            piece = word[i:i + j]
            if len(piece) == j and piece in table:
                out.append(table[piece])
                i += j
                break
        else:
            out.append(35)
            i += 1
    return out


@pytest.fixture(scope="module")
def table():
    lib = default_library()
    return {m: k + 1 for k, g in enumerate(lib.groups) for m in g.members}


@pytest.mark.parametrize("word,expected", [("good", [7, 15, 15, 4]), ("bad", [2, 1, 4]), ("az", [1, 26])])
def test_encode_char(word, expected):
    assert list(encode_char(word).indices) == expected


@pytest.mark.parametrize("word,expected", [
    ("khabar", [10, 24, 4]),
    ("khbr", [10, 24, 4]),
    ("korchi", [9, 7, 4, 14, 2]),
    ("krci", [9, 4, 13, 2]),
    ("qxq", [35, 35, 35]),
])
def test_encode_phonetic_reference_examples(word, expected):
    assert list(encode_phonetic(word).indices) == expected


def test_good_matches_brute_force(table):
    # g -> ga (11), oo -> o (7), d -> da (19)
    assert brute_force_phonetic("good", table) == [11, 7, 19]
    assert list(encode_phonetic("good").indices) == [11, 7, 19]


@pytest.mark.parametrize("bad", ["", "Good", "ri8", "a b", "é"])
def test_rejects_non_letters(bad):
    with pytest.raises(InvalidInputError):
        encode_char(bad)
    with pytest.raises(InvalidInputError):
        encode_phonetic(bad)


@given(words)
def test_phonetic_agrees_with_brute_force(word):
    lib = default_library()
    table = {m: k + 1 for k, g in enumerate(lib.groups) for m in g.members}
    assert list(encode_phonetic(word, lib).indices) == brute_force_phonetic(word, table)


@given(words)
def test_lengths_and_ranges(word):
    c = encode_char(word)
    p = encode_phonetic(word)
    assert len(c.indices) == len(word)
    assert 1 <= len(p.indices) <= len(word)
    assert all(1 <= i <= 26 for i in c.indices)
    assert all(1 <= i <= 31 or i == 35 for i in p.indices)


@given(words)
def test_trace_tiles_word(word):
    trace = phonetic_trace(word)
    assert sum(w for _, w, _ in trace) == len(word)
    pos = 0
    for p, w, _ in trace:
        assert p == pos
        pos += w


@given(words)
def test_greedy_prefers_three_grams(word):
    lib = default_library()
    for pos, width, idx in phonetic_trace(word, lib):
        tri = word[pos:pos + 3]
        if len(tri) == 3 and lib.lookup(tri) is not None:
            assert width == 3 and idx == lib.lookup(tri)


def test_pad_char_good():
    t = pad_and_onehot(encode_char("good"))
    assert t.rows.shape == (15, 27)
    assert not t.rows[:11].any()
    assert [int(np.argmax(r)) for r in t.rows[11:]] == [7, 15, 15, 4]
    assert (t.rows[11:].sum(axis=1) == 1).all()
    assert not t.truncated


def test_pad_single_oov():
    t = pad_and_onehot(EncodedWord(Scheme.PHONETIC, (35,), "q"))
    assert t.rows.shape == (15, 36)
    assert not t.rows[:14].any()
    assert t.rows[14, 35] == 1 and t.rows[14].sum() == 1


def test_pad_full_length():
    t = pad_and_onehot(encode_char("abcdefghijklmno"))
    assert (t.rows.sum(axis=1) == 1).all()
    assert t.indices() == list(range(1, 16))


def test_pad_truncates_keeping_tail():
    word = "abcdefghijklmnopqrst"
    t = pad_and_onehot(encode_char(word))
    assert t.truncated
    assert t.indices() == list(range(6, 21))


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=30),
       st.sampled_from(["char", "phonetic"]))
def test_onehot_round_trip(word, scheme):
    enc = encode_char(word) if scheme == "char" else encode_phonetic(word)
    t = pad_and_onehot(enc)
    assert t.rows.shape[0] == 15
    sums = t.rows.sum(axis=1)
    assert set(np.unique(sums)) <= {0.0, 1.0}
    assert t.indices() == list(enc.indices)[-15:]


def test_oov_count():
    assert oov_count(["khabar", "khbr"]) == 0
    assert oov_count(["qxq"]) == 3
    assert oov_count([]) == 0
